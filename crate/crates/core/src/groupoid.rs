//! Words over `E(Ĝ)`, free reduction, and graph groupoid elements.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{EdgeIdx, ShadowedGraph, SignedEdge, VertexIdx};

/// A finite sequence of signed edges, not necessarily admissible.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeWord(pub Vec<SignedEdge>);

impl EdgeWord {
    pub fn new(letters: Vec<SignedEdge>) -> Self {
        EdgeWord(letters)
    }

    pub fn letters(&self) -> &[SignedEdge] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Consecutive letters meet: `target(w[i]) = source(w[i+1])`.
    pub fn is_admissible(&self, g: &ShadowedGraph) -> bool {
        self.0.windows(2).all(|p| g.target(p[0]) == g.source(p[1]))
    }

    /// Admissible, nonempty, and ends where it starts.
    pub fn is_loop(&self, g: &ShadowedGraph) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&a), Some(&b)) => self.is_admissible(g) && g.source(a) == g.target(b),
            _ => false,
        }
    }

    /// All letters share one base edge.
    pub fn is_single_edge(&self) -> bool {
        self.0.windows(2).all(|p| p[0].edge == p[1].edge)
    }

    pub fn concat(&self, other: &EdgeWord) -> EdgeWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        EdgeWord(v)
    }

    /// Reversed word with every letter flipped.
    pub fn inverse(&self) -> EdgeWord {
        EdgeWord(self.0.iter().rev().map(|x| x.inv()).collect())
    }

    pub fn render(&self, g: &ShadowedGraph) -> Vec<String> {
        self.0.iter().map(|&x| g.signed_id(x)).collect()
    }
}

/// An element of the graph groupoid: a vertex, a nonempty reduced admissible
/// word, or the empty element `∅`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupoidElement {
    Vertex(VertexIdx),
    Path(Vec<SignedEdge>),
    Empty,
}

impl GroupoidElement {
    pub fn edge(x: SignedEdge) -> Self {
        GroupoidElement::Path(vec![x])
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, GroupoidElement::Empty)
    }

    pub fn is_vertex(&self) -> bool {
        matches!(self, GroupoidElement::Vertex(_))
    }

    /// Word length; vertices have length 0, `∅` has none.
    pub fn length(&self) -> Option<usize> {
        match self {
            GroupoidElement::Vertex(_) => Some(0),
            GroupoidElement::Path(p) => Some(p.len()),
            GroupoidElement::Empty => None,
        }
    }

    pub fn source(&self, g: &ShadowedGraph) -> Option<VertexIdx> {
        match self {
            GroupoidElement::Vertex(v) => Some(*v),
            GroupoidElement::Path(p) => Some(g.source(p[0])),
            GroupoidElement::Empty => None,
        }
    }

    pub fn target(&self, g: &ShadowedGraph) -> Option<VertexIdx> {
        match self {
            GroupoidElement::Vertex(v) => Some(*v),
            GroupoidElement::Path(p) => Some(g.target(*p.last().unwrap())),
            GroupoidElement::Empty => None,
        }
    }

    /// The underlying word (empty for vertices and `∅`).
    pub fn letters(&self) -> &[SignedEdge] {
        match self {
            GroupoidElement::Path(p) => p,
            _ => &[],
        }
    }

    pub fn inverse(&self) -> GroupoidElement {
        match self {
            GroupoidElement::Path(p) => GroupoidElement::Path(p.iter().rev().map(|x| x.inv()).collect()),
            other => other.clone(),
        }
    }

    pub fn display<'a>(&'a self, g: &'a ShadowedGraph) -> DisplayElement<'a> {
        DisplayElement { element: self, graph: g }
    }
}

pub struct DisplayElement<'a> {
    element: &'a GroupoidElement,
    graph: &'a ShadowedGraph,
}

impl fmt::Display for DisplayElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.element {
            GroupoidElement::Vertex(v) => write!(f, "{}", self.graph.vertex_id(*v)),
            GroupoidElement::Empty => write!(f, "∅"),
            GroupoidElement::Path(p) => {
                let parts: Vec<String> = p.iter().map(|&x| self.graph.signed_id(x)).collect();
                write!(f, "{}", parts.join(" "))
            }
        }
    }
}

/// Free reduction with a single stack pass. Non-admissible words map to `∅`;
/// a word that cancels completely maps to its starting vertex.
pub fn reduce(g: &ShadowedGraph, word: &EdgeWord) -> GroupoidElement {
    let Some(&first) = word.0.first() else {
        return GroupoidElement::Empty;
    };
    if !word.is_admissible(g) {
        return GroupoidElement::Empty;
    }
    let mut stack: Vec<SignedEdge> = Vec::with_capacity(word.len());
    for &x in &word.0 {
        if stack.last() == Some(&x.inv()) {
            stack.pop();
        } else {
            stack.push(x);
        }
    }
    if stack.is_empty() {
        GroupoidElement::Vertex(g.source(first))
    } else {
        GroupoidElement::Path(stack)
    }
}

/// Groupoid product `a b`: defined when `r(a) = s(b)`, otherwise `∅`.
pub fn concat(g: &ShadowedGraph, a: &GroupoidElement, b: &GroupoidElement) -> GroupoidElement {
    let (Some(ra), Some(sb)) = (a.target(g), b.source(g)) else {
        return GroupoidElement::Empty;
    };
    if ra != sb {
        return GroupoidElement::Empty;
    }
    match (a, b) {
        (GroupoidElement::Vertex(_), _) => b.clone(),
        (_, GroupoidElement::Vertex(_)) => a.clone(),
        (GroupoidElement::Path(p), GroupoidElement::Path(q)) => {
            // both operands are already reduced, so cancellation only happens at the seam
            let mut out = p.clone();
            let mut rest = q.as_slice();
            while let (Some(&x), Some(&y)) = (out.last(), rest.first()) {
                if x.inv() != y {
                    break;
                }
                out.pop();
                rest = &rest[1..];
            }
            out.extend_from_slice(rest);
            if out.is_empty() {
                GroupoidElement::Vertex(g.source(p[0]))
            } else {
                GroupoidElement::Path(out)
            }
        }
        _ => GroupoidElement::Empty,
    }
}

/// Base edges traversed by an element, orientation and multiplicity forgotten.
pub type Diagram = BTreeSet<EdgeIdx>;

pub fn diagram(a: &GroupoidElement) -> Result<Diagram> {
    match a {
        GroupoidElement::Empty => Err(Error::EmptyOperand),
        other => Ok(other.letters().iter().map(|x| x.edge).collect()),
    }
}

/// `a ≠ b⁻¹` and `diagram(a) ≠ diagram(b)`.
pub fn diagram_distinct(a: &GroupoidElement, b: &GroupoidElement) -> Result<bool> {
    let (da, db) = (diagram(a)?, diagram(b)?);
    Ok(*a != b.inverse() && da != db)
}

/// Streams the admissible words of length `n` in lexicographic signed-edge
/// order, without materializing `E(Ĝ)ⁿ`.
pub struct AdmissibleWords<'g> {
    graph: &'g ShadowedGraph,
    n: usize,
    firsts: Vec<SignedEdge>,
    // cursor[i] indexes the candidate list for position i
    cursor: Vec<usize>,
    word: Vec<SignedEdge>,
    started: bool,
}

impl<'g> AdmissibleWords<'g> {
    fn candidates(&self, pos: usize) -> &[SignedEdge] {
        if pos == 0 {
            &self.firsts
        } else {
            self.graph.out_edges(self.graph.target(self.word[pos - 1]))
        }
    }

    // Fill positions from `pos` on with first candidates. Returns false if a
    // dead end is hit (only possible if some position has no candidate).
    fn descend(&mut self, mut pos: usize) -> bool {
        while pos < self.n {
            let Some(&x) = self.candidates(pos).first() else {
                return false;
            };
            self.cursor.truncate(pos);
            self.word.truncate(pos);
            self.cursor.push(0);
            self.word.push(x);
            pos += 1;
        }
        true
    }

    // Advance the deepest position that still has an unused candidate.
    fn advance(&mut self) -> bool {
        loop {
            let Some(pos) = self.cursor.len().checked_sub(1) else {
                return false;
            };
            let next = self.cursor[pos] + 1;
            self.word.truncate(pos);
            if let Some(&x) = self.candidates(pos).get(next) {
                self.cursor[pos] = next;
                self.word.push(x);
                if self.descend(pos + 1) {
                    return true;
                }
            } else {
                self.cursor.truncate(pos);
            }
        }
    }
}

impl Iterator for AdmissibleWords<'_> {
    type Item = EdgeWord;

    fn next(&mut self) -> Option<EdgeWord> {
        if self.n == 0 {
            return None;
        }
        let ok = if self.started {
            self.advance()
        } else {
            self.started = true;
            self.descend(0) || self.advance()
        };
        ok.then(|| EdgeWord(self.word.clone()))
    }
}

pub fn admissible_words(g: &ShadowedGraph, n: usize) -> AdmissibleWords<'_> {
    AdmissibleWords { graph: g, n, firsts: g.signed_edges(), cursor: Vec::new(), word: Vec::new(), started: false }
}

/// Admissible length-`n` words with `s(w) = r(w)`.
pub fn loop_words(g: &ShadowedGraph, n: usize) -> impl Iterator<Item = EdgeWord> + '_ {
    admissible_words(g, n).filter(move |w| w.is_loop(g))
}

/// Loop words written in a single base edge and its shadow.
pub fn d_loop_words(g: &ShadowedGraph, n: usize) -> impl Iterator<Item = EdgeWord> + '_ {
    loop_words(g, n).filter(EdgeWord::is_single_edge)
}

/// Every groupoid element of length `≤ max_len`: vertices (sorted) then
/// reduced paths by length, lexicographic within a length. Closed under
/// inverse.
pub fn reduced_elements(g: &ShadowedGraph, max_len: usize) -> Vec<GroupoidElement> {
    let mut out: Vec<GroupoidElement> = g.vertex_indices().map(GroupoidElement::Vertex).collect();
    let mut layer: Vec<Vec<SignedEdge>> = g.signed_edges().into_iter().map(|x| vec![x]).collect();
    for _ in 0..max_len {
        if layer.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for w in &layer {
            let last = *w.last().unwrap();
            for &x in g.out_edges(g.target(last)) {
                if x != last.inv() {
                    let mut v = w.clone();
                    v.push(x);
                    next.push(v);
                }
            }
        }
        out.extend(layer.drain(..).map(GroupoidElement::Path));
        layer = next;
    }
    out
}

/// Category axiom checks on concrete elements. Each returns `None` when the
/// axiom does not apply (some operand or intermediate product is `∅`).
pub mod axioms {
    use super::*;

    pub fn associativity(
        g: &ShadowedGraph,
        a: &GroupoidElement,
        b: &GroupoidElement,
        c: &GroupoidElement,
    ) -> Option<bool> {
        let ab = concat(g, a, b);
        let bc = concat(g, b, c);
        if ab.is_empty() || bc.is_empty() {
            return None;
        }
        Some(concat(g, &ab, c) == concat(g, a, &bc))
    }

    /// `s(x) x = x = x r(x)`.
    pub fn identity(g: &ShadowedGraph, x: &GroupoidElement) -> Option<bool> {
        let (s, r) = (x.source(g)?, x.target(g)?);
        Some(concat(g, &GroupoidElement::Vertex(s), x) == *x && concat(g, x, &GroupoidElement::Vertex(r)) == *x)
    }

    /// `x x⁻¹ = s(x)` and `x⁻¹ x = r(x)`.
    pub fn inverse(g: &ShadowedGraph, x: &GroupoidElement) -> Option<bool> {
        let (s, r) = (x.source(g)?, x.target(g)?);
        let inv = x.inverse();
        Some(concat(g, x, &inv) == GroupoidElement::Vertex(s) && concat(g, &inv, x) == GroupoidElement::Vertex(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::EdgeIdx;

    fn fwd(i: u32) -> SignedEdge {
        SignedEdge::forward(EdgeIdx(i))
    }

    #[test]
    fn cancel_pair_gives_source_vertex() {
        let g = fixtures::single_edge();
        let e = fwd(0);
        let r = reduce(&g, &EdgeWord(vec![e, e.inv()]));
        assert_eq!(r, GroupoidElement::Vertex(g.vertex("v1").unwrap()));
        let r = reduce(&g, &EdgeWord(vec![e.inv(), e]));
        assert_eq!(r, GroupoidElement::Vertex(g.vertex("v2").unwrap()));
    }

    #[test]
    fn non_admissible_is_empty() {
        let g = fixtures::single_edge();
        assert_eq!(reduce(&g, &EdgeWord(vec![fwd(0), fwd(0)])), GroupoidElement::Empty);
    }

    #[test]
    fn nested_cancellation() {
        // two loops a, b and a third c at one vertex
        let g = fixtures::bouquet(3);
        let (a, b, c) = (fwd(0), fwd(1), fwd(2));
        let w = EdgeWord(vec![a, b, b.inv(), a.inv(), c]);
        assert_eq!(reduce(&g, &w), reduce(&g, &EdgeWord(vec![c])));
    }

    #[test]
    fn concat_rules() {
        let g = fixtures::circulant(4);
        let (e1, e3) = (fwd(0), fwd(2));
        let w = GroupoidElement::edge(e1);
        let v = GroupoidElement::Vertex(g.source(e1));
        assert_eq!(concat(&g, &v, &w), w);
        assert_eq!(concat(&g, &w, &w.inverse()), v);
        // e1: v1 -> v2, e3: v3 -> v4
        assert_eq!(concat(&g, &w, &GroupoidElement::edge(e3)), GroupoidElement::Empty);
        assert_eq!(concat(&g, &GroupoidElement::Empty, &w), GroupoidElement::Empty);
    }

    #[test]
    fn inverse_basics() {
        let g = fixtures::circulant(3);
        let v = GroupoidElement::Vertex(VertexIdx(0));
        assert_eq!(v.inverse(), v);
        assert_eq!(GroupoidElement::Empty.inverse(), GroupoidElement::Empty);
        let w = GroupoidElement::Path(vec![fwd(0), fwd(1)]);
        assert_eq!(w.inverse(), GroupoidElement::Path(vec![fwd(1).inv(), fwd(0).inv()]));
        assert_eq!(axioms::inverse(&g, &w), Some(true));
        assert_eq!(axioms::identity(&g, &w), Some(true));
    }

    #[test]
    fn diagrams() {
        let g = fixtures::bouquet(2);
        let l = GroupoidElement::edge(fwd(0));
        let l2 = GroupoidElement::Path(vec![fwd(0), fwd(0)]);
        assert_eq!(diagram(&l).unwrap(), diagram(&l2).unwrap());
        assert!(!diagram_distinct(&l, &l2).unwrap());
        let e2 = GroupoidElement::edge(fwd(1));
        assert!(diagram_distinct(&l, &e2).unwrap());
        assert!(diagram_distinct(&l, &e2.inverse()).unwrap());
        assert!(!diagram_distinct(&l, &l.inverse()).unwrap());
        assert_eq!(diagram_distinct(&l, &GroupoidElement::Empty), Err(Error::EmptyOperand));
        let _ = g;
    }

    #[test]
    fn one_loop_words_of_length_two() {
        let g = fixtures::bouquet(1);
        let words: Vec<EdgeWord> = admissible_words(&g, 2).collect();
        let e = fwd(0);
        assert_eq!(
            words,
            vec![
                EdgeWord(vec![e, e]),
                EdgeWord(vec![e, e.inv()]),
                EdgeWord(vec![e.inv(), e]),
                EdgeWord(vec![e.inv(), e.inv()]),
            ]
        );
        assert_eq!(loop_words(&g, 2).count(), 4);
    }

    #[test]
    fn three_vertex_word_counts() {
        let g = fixtures::three_vertex(true);
        assert_eq!(admissible_words(&g, 1).count(), 8);
        let dl: Vec<EdgeWord> = d_loop_words(&g, 2).collect();
        assert_eq!(dl.len(), 10);
        assert!(dl.iter().all(|w| w.is_loop(&g) && w.is_single_edge()));
    }

    #[test]
    fn admissible_count_matches_adjacency_power() {
        for g in [fixtures::three_vertex(true), fixtures::circulant(3), fixtures::bouquet(2)] {
            let a = g.adjacency_hat();
            let n = a.len();
            let mut p = a.clone();
            for len in 1..=4usize {
                let total: u64 = p.iter().flatten().sum();
                assert_eq!(admissible_words(&g, len).count() as u64, total, "len {len}");
                let mut q = vec![vec![0u64; n]; n];
                for i in 0..n {
                    for k in 0..n {
                        for j in 0..n {
                            q[i][j] += p[i][k] * a[k][j];
                        }
                    }
                }
                p = q;
            }
        }
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let g = fixtures::three_vertex(true);
        let words: Vec<EdgeWord> = admissible_words(&g, 3).collect();
        assert!(words.windows(2).all(|p| p[0] < p[1]));
        assert!(words.iter().all(|w| w.is_admissible(&g)));
    }

    #[test]
    fn bouquet_reduced_words_match_free_group_spheres() {
        for n_loops in 1..=3usize {
            let g = fixtures::bouquet(n_loops);
            let elems = reduced_elements(&g, 4);
            let mut expected = 1usize;
            for len in 1..=4u32 {
                expected += 2 * n_loops * (2 * n_loops - 1).pow(len - 1);
            }
            assert_eq!(elems.len(), expected);
            let set: BTreeSet<&GroupoidElement> = elems.iter().collect();
            assert!(elems.iter().all(|e| set.contains(&e.inverse())));
        }
    }

    #[test]
    fn dead_end_graph_enumerates_nothing_long() {
        // single edge: only alternating words exist
        let g = fixtures::single_edge();
        assert_eq!(admissible_words(&g, 3).count(), 2);
        assert_eq!(admissible_words(&g, 0).count(), 0);
    }
}

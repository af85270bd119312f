//! Edge labels, weights of words, balance vectors and axis-path counts.
//!
//! A label is a signed index `k`; the lattice height `eᵏ` it stands for is
//! never evaluated. Because the heights are linearly independent, a label word
//! returns to its starting height exactly when every `+k` is matched by a `-k`,
//! which is what [`BalanceVector`] records.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{ShadowedGraph, SignedEdge, VertexIdx};
use crate::groupoid::{EdgeWord, GroupoidElement};

/// A signed label index; `0` is the vertex label `l₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub i32);

impl Label {
    pub const VERTEX: Label = Label(0);
}

impl std::ops::Neg for Label {
    type Output = Label;

    fn neg(self) -> Label {
        Label(-self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelWord(pub Vec<Label>);

impl LabelWord {
    pub fn concat(&self, other: &LabelWord) -> LabelWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        LabelWord(v)
    }

    pub fn as_ints(&self) -> Vec<i32> {
        self.0.iter().map(|l| l.0).collect()
    }
}

impl fmt::Display for LabelWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// How base edges receive their positive labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelingMode {
    /// Forward edges out of each vertex get `1..=deg_out(v)` in edge-id order.
    PerVertex,
    /// Label is the index of the edge among parallel edges with the same
    /// `(source, target)` pair, in edge-id order.
    MultiedgeIndex,
    /// Labels given per edge id. With `require_per_vertex`, labels of edges
    /// leaving one vertex must be pairwise distinct.
    Explicit { labels: BTreeMap<String, i64>, require_per_vertex: bool },
}

impl LabelingMode {
    pub fn name(&self) -> &'static str {
        match self {
            LabelingMode::PerVertex => "per-vertex",
            LabelingMode::MultiedgeIndex => "multiedge-index",
            LabelingMode::Explicit { .. } => "explicit",
        }
    }
}

/// A shadowed graph with a positive label on every base edge. Shadows carry
/// the negated label.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    graph: ShadowedGraph,
    labels: Vec<u32>,
    max_label: u32,
    mode: &'static str,
}

impl LabeledGraph {
    pub fn new(graph: ShadowedGraph, mode: LabelingMode) -> Result<Self> {
        if graph.num_edges() == 0 {
            return Err(Error::NoEdges);
        }
        let labels: Vec<u32> = match &mode {
            LabelingMode::PerVertex => {
                let mut next = vec![0u32; graph.num_vertices()];
                graph
                    .edge_indices()
                    .map(|e| {
                        let s = graph.source(SignedEdge::forward(e)).index();
                        next[s] += 1;
                        next[s]
                    })
                    .collect()
            }
            LabelingMode::MultiedgeIndex => {
                let mut next: BTreeMap<(VertexIdx, VertexIdx), u32> = BTreeMap::new();
                graph
                    .edge_indices()
                    .map(|e| {
                        let x = SignedEdge::forward(e);
                        let c = next.entry((graph.source(x), graph.target(x))).or_default();
                        *c += 1;
                        *c
                    })
                    .collect()
            }
            LabelingMode::Explicit { labels, require_per_vertex } => {
                let mut out = Vec::with_capacity(graph.num_edges());
                for e in graph.edge_indices() {
                    let id = graph.edge_id(e);
                    let &l = labels.get(id).ok_or_else(|| Error::Labeling(format!("edge `{id}` has no label")))?;
                    if l < 1 || l > i32::MAX as i64 {
                        return Err(Error::Labeling(format!("edge `{id}` has label {l}; labels must be positive")));
                    }
                    out.push(l as u32);
                }
                for id in labels.keys() {
                    graph.edge(id)?;
                }
                if *require_per_vertex {
                    check_per_vertex(&graph, &out)?;
                }
                out
            }
        };
        let max_label = labels.iter().copied().max().unwrap_or(0);
        Ok(LabeledGraph { graph, labels, max_label, mode: mode.name() })
    }

    pub fn graph(&self) -> &ShadowedGraph {
        &self.graph
    }

    /// `N`, the largest assigned label.
    pub fn max_label(&self) -> u32 {
        self.max_label
    }

    pub fn mode_name(&self) -> &'static str {
        self.mode
    }

    pub fn label(&self, x: SignedEdge) -> Label {
        let l = self.labels[x.edge.index()] as i32;
        if x.inverse {
            Label(-l)
        } else {
            Label(l)
        }
    }

    /// Whether labels of forward edges leaving each vertex are distinct.
    pub fn is_per_vertex_bijective(&self) -> bool {
        check_per_vertex(&self.graph, &self.labels).is_ok()
    }

    /// Signed edges carrying label `k`, in canonical order.
    pub fn edges_with_label(&self, k: i32) -> Vec<SignedEdge> {
        self.graph.signed_edges().into_iter().filter(|&x| self.label(x).0 == k).collect()
    }

    pub fn check_label(&self, k: i32) -> Result<()> {
        if k == 0 || k.unsigned_abs() > self.max_label {
            Err(Error::LabelOutOfRange { label: k as i64, max: self.max_label })
        } else {
            Ok(())
        }
    }

    pub fn label_word(&self, letters: &[SignedEdge]) -> LabelWord {
        LabelWord(letters.iter().map(|&x| self.label(x)).collect())
    }

    /// Weight of a word: endpoints plus per-letter labels, or the empty
    /// weight when the word is empty or not admissible.
    pub fn weight_of_word(&self, w: &EdgeWord) -> Weight {
        match (w.letters().first(), w.letters().last()) {
            (Some(&a), Some(&b)) if w.is_admissible(&self.graph) => Weight::Element(WeightedElement {
                source: self.graph.source(a),
                target: self.graph.target(b),
                labels: self.label_word(w.letters()),
            }),
            _ => Weight::Empty,
        }
    }

    pub fn weight(&self, a: &GroupoidElement) -> Weight {
        match a {
            GroupoidElement::Vertex(v) => Weight::Element(WeightedElement::vertex(*v)),
            GroupoidElement::Path(p) => self.weight_of_word(&EdgeWord(p.clone())),
            GroupoidElement::Empty => Weight::Empty,
        }
    }

    pub fn weight_of_edge(&self, x: SignedEdge) -> WeightedElement {
        WeightedElement {
            source: self.graph.source(x),
            target: self.graph.target(x),
            labels: LabelWord(vec![self.label(x)]),
        }
    }
}

fn check_per_vertex(graph: &ShadowedGraph, labels: &[u32]) -> Result<()> {
    let mut seen: BTreeSet<(VertexIdx, u32)> = BTreeSet::new();
    for e in graph.edge_indices() {
        let s = graph.source(SignedEdge::forward(e));
        if !seen.insert((s, labels[e.index()])) {
            return Err(Error::Labeling(format!(
                "label {} repeats on edges leaving `{}`",
                labels[e.index()],
                graph.vertex_id(s)
            )));
        }
    }
    Ok(())
}

/// A weight `((v, v′), l_{i₁}…l_{iₙ})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightedElement {
    pub source: VertexIdx,
    pub target: VertexIdx,
    pub labels: LabelWord,
}

impl WeightedElement {
    pub fn vertex(v: VertexIdx) -> Self {
        WeightedElement { source: v, target: v, labels: LabelWord(vec![Label::VERTEX]) }
    }

    pub fn display<'a>(&'a self, g: &'a ShadowedGraph) -> String {
        format!("(({}, {}), {})", g.vertex_id(self.source), g.vertex_id(self.target), self.labels)
    }
}

/// A weight or the empty weight `∅_G`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    Empty,
    Element(WeightedElement),
}

impl Weight {
    pub fn element(&self) -> Option<&WeightedElement> {
        match self {
            Weight::Element(w) => Some(w),
            Weight::Empty => None,
        }
    }

    pub fn terminal(&self) -> Option<VertexIdx> {
        self.element().map(|w| w.target)
    }
}

/// Per-label signed counts: `k ↦ #(+k) − #(−k)`. Zero entries are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BalanceVector(BTreeMap<u32, i64>);

impl BalanceVector {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: u32) -> i64 {
        self.0.get(&k).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> &BTreeMap<u32, i64> {
        &self.0
    }

    pub fn add_label(&mut self, l: Label) {
        if l.0 == 0 {
            return;
        }
        let k = l.0.unsigned_abs();
        let c = self.0.entry(k).or_default();
        *c += l.0.signum() as i64;
        if *c == 0 {
            self.0.remove(&k);
        }
    }

    pub fn add(&self, other: &BalanceVector) -> BalanceVector {
        let mut out = self.clone();
        for (&k, &c) in &other.0 {
            let e = out.0.entry(k).or_default();
            *e += c;
            if *e == 0 {
                out.0.remove(&k);
            }
        }
        out
    }

    pub fn from_pairs(pairs: &[(u32, i64)]) -> Self {
        BalanceVector(pairs.iter().copied().filter(|&(_, c)| c != 0).collect())
    }
}

/// Balance vector of a label word.
pub fn theta(lw: &LabelWord) -> BalanceVector {
    let mut b = BalanceVector::default();
    for &l in &lw.0 {
        b.add_label(l);
    }
    b
}

/// The integer reading `Σ iⱼ` of a label word. Diagnostic only: it can vanish
/// on words whose balance vector does not.
pub fn theta_sum(lw: &LabelWord) -> i64 {
    lw.0.iter().map(|l| l.0 as i64).sum()
}

/// `ω₊`: keep the endpoints, replace the label word by its balance vector.
/// `None` for the empty weight.
pub fn omega_plus(w: &Weight) -> Option<((VertexIdx, VertexIdx), BalanceVector)> {
    w.element().map(|we| ((we.source, we.target), theta(&we.labels)))
}

/// Number of length-`k` words over `{±1..±N}` with zero balance vector:
/// `Σ_{m₁+…+m_N = k/2} k! / Π (m_j!)²` for even `k`, `0` for odd `k`.
pub fn count_axis_paths(max_label: u32, k: u32) -> BigUint {
    if k % 2 == 1 || max_label == 0 {
        return if k == 0 { BigUint::one() } else { BigUint::zero() };
    }
    let half = k / 2;
    let fact: Vec<BigUint> = std::iter::once(BigUint::one())
        .chain((1..=k).scan(BigUint::one(), |acc, i| {
            *acc *= i;
            Some(acc.clone())
        }))
        .collect();
    let mut total = BigUint::zero();
    let mut parts = vec![0u32; max_label as usize];
    sum_compositions(&mut parts, 0, half, &mut |ms| {
        let denom = ms.iter().fold(BigUint::one(), |acc, &m| {
            let f = &fact[m as usize];
            acc * f * f
        });
        total += &fact[k as usize] / denom;
    });
    total
}

fn sum_compositions(parts: &mut [u32], pos: usize, remaining: u32, f: &mut impl FnMut(&[u32])) {
    if pos + 1 == parts.len() {
        parts[pos] = remaining;
        f(parts);
        return;
    }
    for m in 0..=remaining {
        parts[pos] = m;
        sum_compositions(parts, pos + 1, remaining - m, f);
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

    fn lw(xs: &[i32]) -> LabelWord {
        LabelWord(xs.iter().map(|&x| Label(x)).collect())
    }

    #[test]
    fn circulant_labels_all_one() {
        let lg = fixtures::labeled(fixtures::circulant(3));
        assert_eq!(lg.max_label(), 1);
        assert!(lg.graph().edge_indices().all(|e| lg.label(SignedEdge::forward(e)) == Label(1)));
        assert!(lg.graph().edge_indices().all(|e| lg.label(SignedEdge::backward(e)) == Label(-1)));
    }

    #[test]
    fn three_vertex_multiedge_mode() {
        let lg = LabeledGraph::new(fixtures::three_vertex(true), LabelingMode::MultiedgeIndex).unwrap();
        let got: Vec<i32> = lg.graph().edge_indices().map(|e| lg.label(SignedEdge::forward(e)).0).collect();
        assert_eq!(got, vec![1, 2, 1, 1]);
        assert_eq!(lg.max_label(), 2);
        // explicit fixture labels agree
        let ex = fixtures::three_vertex_labeled(true);
        let got2: Vec<i32> = ex.graph().edge_indices().map(|e| ex.label(SignedEdge::forward(e)).0).collect();
        assert_eq!(got, got2);
        assert!(!ex.is_per_vertex_bijective());
    }

    #[test]
    fn three_vertex_per_vertex_mode() {
        let lg = fixtures::labeled(fixtures::three_vertex(true));
        let got: Vec<i32> = lg.graph().edge_indices().map(|e| lg.label(SignedEdge::forward(e)).0).collect();
        assert_eq!(got, vec![1, 2, 3, 1]);
        assert_eq!(lg.max_label(), 3);
        assert!(lg.is_per_vertex_bijective());
    }

    #[test]
    fn explicit_label_errors() {
        let g = fixtures::three_vertex(false);
        let mut labels = fixtures::three_vertex_labels(false);
        labels.remove("e13:1");
        let mode = LabelingMode::Explicit { labels: labels.clone(), require_per_vertex: false };
        assert!(matches!(LabeledGraph::new(g.clone(), mode), Err(Error::Labeling(_))));
        labels.insert("e13:1".into(), 0);
        let mode = LabelingMode::Explicit { labels, require_per_vertex: false };
        assert!(matches!(LabeledGraph::new(g.clone(), mode), Err(Error::Labeling(_))));
        let mode = LabelingMode::Explicit { labels: fixtures::three_vertex_labels(false), require_per_vertex: true };
        assert!(matches!(LabeledGraph::new(g, mode), Err(Error::Labeling(_))));
    }

    #[test]
    fn no_edges_no_labeling() {
        let g = ShadowedGraph::new(crate::graph::DirectedGraph::new(["v"], vec![])).unwrap();
        assert_eq!(LabeledGraph::new(g, LabelingMode::PerVertex).err(), Some(Error::NoEdges));
    }

    #[test]
    fn circulant_weights() {
        let lg = fixtures::labeled(fixtures::circulant(3));
        let g = lg.graph();
        let v2 = g.vertex("v2").unwrap();
        let v3 = g.vertex("v3").unwrap();
        // w = e2 e3 e1
        let w = EdgeWord(vec![fwd(1), fwd(2), fwd(0)]);
        let we = lg.weight_of_word(&w);
        assert_eq!(we, Weight::Element(WeightedElement { source: v2, target: v2, labels: lw(&[1, 1, 1]) }));
        // y = e1⁻¹ e3⁻¹
        let y = EdgeWord(vec![fwd(0).inv(), fwd(2).inv()]);
        assert_eq!(
            lg.weight_of_word(&y),
            Weight::Element(WeightedElement { source: v2, target: v3, labels: lw(&[-1, -1]) })
        );
        assert_eq!(lg.weight(&GroupoidElement::Vertex(v2)), Weight::Element(WeightedElement::vertex(v2)));
        assert_eq!(lg.weight(&GroupoidElement::Empty), Weight::Empty);
        assert_eq!(lg.weight_of_word(&EdgeWord(vec![fwd(0), fwd(0)])), Weight::Empty);

        let w2 = w.concat(&w);
        let (ends, b) = omega_plus(&lg.weight_of_word(&w2)).unwrap();
        assert_eq!(ends, (v2, v2));
        assert_eq!(b, BalanceVector::from_pairs(&[(1, 6)]));
    }

    #[test]
    fn omega_plus_of_vertex_and_balanced_loop() {
        let lg = fixtures::labeled(fixtures::circulant(3));
        let v = VertexIdx(0);
        assert_eq!(omega_plus(&lg.weight(&GroupoidElement::Vertex(v))), Some(((v, v), BalanceVector::default())));
        let w = EdgeWord(vec![fwd(0), fwd(1)]);
        let ww = w.concat(&w.inverse());
        let (ends, b) = omega_plus(&lg.weight_of_word(&ww)).unwrap();
        assert_eq!(ends, (v, v));
        assert!(b.is_zero());
    }

    #[test]
    fn theta_readings() {
        assert!(theta(&lw(&[1, -1])).is_zero());
        let b = theta(&lw(&[2, -1, -1]));
        assert_eq!(b, BalanceVector::from_pairs(&[(1, -2), (2, 1)]));
        assert_eq!(theta_sum(&lw(&[2, -1, -1])), 0);
        assert_eq!(theta(&lw(&[1, 1, 1])), BalanceVector::from_pairs(&[(1, 3)]));
    }

    #[test]
    fn inverse_weight_is_reversed_negation() {
        let lg = fixtures::three_vertex_labeled(true);
        let g = lg.graph();
        for w in crate::groupoid::admissible_words(g, 3) {
            let a = lg.weight_of_word(&w);
            let b = lg.weight_of_word(&w.inverse());
            let (a, b) = (a.element().unwrap(), b.element().unwrap());
            let expect: Vec<Label> = a.labels.0.iter().rev().map(|&l| -l).collect();
            assert_eq!(b.labels.0, expect);
            assert_eq!((a.source, a.target), (b.target, b.source));
        }
    }

    fn brute_axis(n: i32, k: u32) -> u64 {
        let alphabet: Vec<i32> = (1..=n).flat_map(|i| [i, -i]).collect();
        let mut count = 0;
        let total = (alphabet.len() as u64).pow(k);
        for mut code in 0..total {
            let mut word = Vec::with_capacity(k as usize);
            for _ in 0..k {
                word.push(Label(alphabet[(code % alphabet.len() as u64) as usize]));
                code /= alphabet.len() as u64;
            }
            if theta(&LabelWord(word)).is_zero() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn axis_counts_closed_form_vs_enumeration() {
        assert_eq!(count_axis_paths(2, 4), BigUint::from(36u32));
        assert_eq!(brute_axis(2, 4), 36);
        let pascal: Vec<BigUint> = [2u32, 4, 6, 8].iter().map(|&k| count_axis_paths(1, k)).collect();
        assert_eq!(pascal, [2u32, 6, 20, 70].map(BigUint::from).to_vec());
        assert_eq!(count_axis_paths(3, 5), BigUint::zero());
        for n in 1..=2 {
            for k in 1..=6 {
                assert_eq!(count_axis_paths(n, k), BigUint::from(brute_axis(n as i32, k)), "N={n} k={k}");
            }
        }
    }
}

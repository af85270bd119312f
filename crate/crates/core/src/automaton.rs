//! The graph automaton of a labeled graph, its actions, automaton trees, and
//! the bounded-depth fractaloid test.
//!
//! States are weights (elements of `V(G)² × ±X₀*` or the empty weight) and the
//! input alphabet is `E(Ĝ)`. The labeling map `φ` returns the weight of the
//! incoming edge when it can follow the state, and the shifting map `ψ`
//! returns the edge (or path) itself. Everything else maps to the empty
//! weight.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{SignedEdge, VertexIdx};
use crate::groupoid::{EdgeWord, GroupoidElement};
use crate::labeling::{Label, LabeledGraph, Weight, WeightedElement};

#[derive(Debug, Clone, Copy)]
pub struct GraphAutomaton<'a> {
    lg: &'a LabeledGraph,
}

impl<'a> GraphAutomaton<'a> {
    pub fn new(lg: &'a LabeledGraph) -> Self {
        GraphAutomaton { lg }
    }

    pub fn labeled_graph(&self) -> &'a LabeledGraph {
        self.lg
    }

    /// `φ(x, e) = ω(e)` when `x` ends where `e` starts, else `∅_G`.
    pub fn phi_edge(&self, state: &Weight, e: SignedEdge) -> Weight {
        match state.terminal() {
            Some(t) if t == self.lg.graph().source(e) => Weight::Element(self.lg.weight_of_edge(e)),
            _ => Weight::Empty,
        }
    }

    /// Path form: the weight of the last edge of `w` when `x·w ≠ ∅`.
    pub fn phi_path(&self, state: &Weight, w: &EdgeWord) -> Weight {
        let g = self.lg.graph();
        match (state.terminal(), w.letters().first(), w.letters().last()) {
            (Some(t), Some(&a), Some(&b)) if t == g.source(a) && w.is_admissible(g) => {
                Weight::Element(self.lg.weight_of_edge(b))
            }
            _ => Weight::Empty,
        }
    }

    /// Path form on groupoid elements; a vertex continuation returns its own
    /// weight `ω(v)`.
    pub fn phi_element(&self, state: &Weight, w: &GroupoidElement) -> Weight {
        match w {
            GroupoidElement::Vertex(v) if state.terminal() == Some(*v) => Weight::Element(WeightedElement::vertex(*v)),
            GroupoidElement::Path(p) => self.phi_path(state, &EdgeWord(p.clone())),
            _ => Weight::Empty,
        }
    }

    /// `ψ(x, e) = e` exactly when `φ(x, e) ≠ ∅_G`.
    pub fn psi_edge(&self, state: &Weight, e: SignedEdge) -> Option<SignedEdge> {
        (self.phi_edge(state, e) != Weight::Empty).then_some(e)
    }

    /// Path form: returns the whole continuation `w` when `x·w ≠ ∅`.
    pub fn psi_path(&self, state: &Weight, w: &EdgeWord) -> Option<EdgeWord> {
        (self.phi_path(state, w) != Weight::Empty).then(|| w.clone())
    }

    pub fn act(&self, w: EdgeWord) -> AutomatonAction<'a> {
        AutomatonAction { aut: *self, word: w }
    }

    /// `𝒜_v = 𝒜_{e e⁻¹}` for the first signed edge `e` leaving `v` in `Ĝ`.
    pub fn vertex_action(&self, v: VertexIdx) -> Option<AutomatonAction<'a>> {
        let &e = self.lg.graph().out_edges(v).first()?;
        Some(self.act(EdgeWord(vec![e, e.inv()])))
    }

    /// Breadth-first automaton tree rooted at `((v, v), l₀)`, cut at `depth`.
    pub fn build_tree(&self, root: VertexIdx, depth: usize) -> Result<AutomatonTree> {
        let g = self.lg.graph();
        if root.index() >= g.num_vertices() {
            return Err(Error::UnknownVertex(format!("#{}", root.0)));
        }
        let mut nodes = vec![TreeNode {
            parent: None,
            depth: 0,
            weight: WeightedElement::vertex(root),
            edge: None,
            children: Vec::new(),
        }];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if nodes[i].depth == depth {
                continue;
            }
            let state = Weight::Element(nodes[i].weight.clone());
            for &e in g.out_edges(nodes[i].weight.target) {
                let Weight::Element(w) = self.phi_edge(&state, e) else {
                    continue;
                };
                let child = nodes.len();
                nodes.push(TreeNode {
                    parent: Some(i),
                    depth: nodes[i].depth + 1,
                    weight: w,
                    edge: self.psi_edge(&state, e),
                    children: Vec::new(),
                });
                nodes[i].children.push(child);
                queue.push_back(child);
            }
        }
        Ok(AutomatonTree { root, depth, nodes })
    }

    /// The full signed label set `{±1..±N}` appears exactly once among the
    /// edges leaving `v` in `Ĝ`.
    pub fn full_labels_at(&self, v: VertexIdx) -> bool {
        let n = self.lg.max_label() as i32;
        let mut labels: Vec<i32> = self.lg.graph().out_edges(v).iter().map(|&e| self.lg.label(e).0).collect();
        labels.sort_unstable();
        let expected: Vec<i32> = (-n..=n).filter(|&k| k != 0).collect();
        labels == expected
    }

    /// Decides whether the automaton acts fully on the `2N`-regular tree, as
    /// far as trees of the given depth can tell. Checks every root vertex and
    /// returns the first offending node as witness.
    pub fn is_fractaloid(&self, depth: usize) -> Result<FractaloidVerdict> {
        if depth < 1 {
            return Err(Error::Precondition("fractaloid depth must be at least 1".into()));
        }
        let g = self.lg.graph();
        let local = g.vertex_indices().all(|v| self.full_labels_at(v));
        let branching = 2 * self.lg.max_label() as usize;
        let n = self.lg.max_label() as i32;
        let full: Vec<i32> = (-n..=n).filter(|&k| k != 0).collect();
        for root in g.vertex_indices() {
            let tree = self.build_tree(root, depth)?;
            for (i, node) in tree.nodes.iter().enumerate() {
                if node.depth == depth {
                    continue;
                }
                let mut labels: Vec<i32> = node.children.iter().map(|&c| tree.nodes[c].weight.labels.0[0].0).collect();
                labels.sort_unstable();
                if node.children.len() != branching || labels != full {
                    let witness = Witness {
                        root: g.vertex_id(root).to_string(),
                        path: tree.path_to(i).iter().map(|&e| g.signed_id(e)).collect(),
                        vertex: g.vertex_id(node.weight.target).to_string(),
                        children: node.children.len(),
                        child_labels: labels,
                    };
                    return Ok(FractaloidVerdict {
                        fractaloid: false,
                        depth,
                        branching,
                        local_criterion: local,
                        witness: Some(witness),
                    });
                }
            }
        }
        Ok(FractaloidVerdict { fractaloid: true, depth, branching, local_criterion: local, witness: None })
    }
}

/// An automaton action `𝒜_w`, evaluated pointwise on states.
#[derive(Debug, Clone)]
pub struct AutomatonAction<'a> {
    aut: GraphAutomaton<'a>,
    word: EdgeWord,
}

impl AutomatonAction<'_> {
    pub fn word(&self) -> &EdgeWord {
        &self.word
    }

    pub fn apply(&self, state: &Weight) -> Weight {
        self.aut.phi_path(state, &self.word)
    }

    /// `self ∘ inner`, which is `𝒜_{w_inner w_self}`.
    pub fn after(&self, inner: &Self) -> Self {
        AutomatonAction { aut: self.aut, word: inner.word.concat(&self.word) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub depth: usize,
    /// `φ`-output carried by the node.
    pub weight: WeightedElement,
    /// `ψ`-output: the edge leading into the node (none at the root).
    pub edge: Option<SignedEdge>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonTree {
    pub root: VertexIdx,
    pub depth: usize,
    pub nodes: Vec<TreeNode>,
}

impl AutomatonTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Signed edges from the root down to node `i`.
    pub fn path_to(&self, mut i: usize) -> Vec<SignedEdge> {
        let mut path = Vec::new();
        while let (Some(p), Some(e)) = (self.nodes[i].parent, self.nodes[i].edge) {
            path.push(e);
            i = p;
        }
        path.reverse();
        path
    }

    /// Nodes per depth level.
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.depth + 1];
        for n in &self.nodes {
            sizes[n.depth] += 1;
        }
        sizes
    }

    pub fn to_dot(&self, lg: &LabeledGraph) -> String {
        let g = lg.graph();
        let mut out = String::from("digraph automaton_tree {\n  node [shape=box];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", n.weight.display(g));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let (Some(p), Some(e)) = (n.parent, n.edge) {
                let _ = writeln!(out, "  n{p} -> n{i} [label=\"{}\"];", g.signed_id(e));
            }
        }
        out.push_str("}\n");
        out
    }

    /// Histogram of child labels over all internal nodes.
    pub fn child_label_counts(&self) -> BTreeMap<Label, usize> {
        let mut m = BTreeMap::new();
        for n in self.nodes.iter().skip(1) {
            *m.entry(n.weight.labels.0[0]).or_default() += 1;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub root: String,
    /// Signed edge ids from the root to the offending node.
    pub path: Vec<String>,
    /// Terminal vertex of the offending node.
    pub vertex: String,
    pub children: usize,
    pub child_labels: Vec<i32>,
}

/// Outcome of [`GraphAutomaton::is_fractaloid`]; valid to `depth` only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractaloidVerdict {
    pub fractaloid: bool,
    pub depth: usize,
    pub branching: usize,
    /// Per-vertex full-label criterion, independent of depth.
    pub local_criterion: bool,
    pub witness: Option<Witness>,
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
    fn phi_on_circulant() {
        let lg = fixtures::labeled(fixtures::circulant(3));
        let aut = GraphAutomaton::new(&lg);
        let g = lg.graph();
        let v2 = g.vertex("v2").unwrap();
        let v3 = g.vertex("v3").unwrap();
        let state = Weight::Element(WeightedElement::vertex(v2));
        let e2 = fwd(1);
        assert_eq!(
            aut.phi_edge(&state, e2),
            Weight::Element(WeightedElement { source: v2, target: v3, labels: lg.label_word(&[e2]) })
        );
        assert_eq!(aut.phi_edge(&Weight::Empty, e2), Weight::Empty);
        assert_eq!(aut.phi_edge(&state, fwd(0)), Weight::Empty);
        assert_eq!(aut.psi_edge(&state, e2), Some(e2));
        assert_eq!(aut.psi_edge(&Weight::Empty, e2), None);
        let w = EdgeWord(vec![e2, fwd(2)]);
        assert_eq!(aut.psi_path(&state, &w), Some(w.clone()));
        assert_eq!(aut.phi_path(&state, &w), Weight::Element(lg.weight_of_edge(fwd(2))));
        assert_eq!(aut.psi_path(&Weight::Empty, &w), None);
        assert_eq!(aut.phi_element(&state, &GroupoidElement::Vertex(v2)), Weight::Element(WeightedElement::vertex(v2)));
    }

    #[test]
    fn composition_law_on_circulant() {
        let lg = fixtures::labeled(fixtures::circulant(3));
        let aut = GraphAutomaton::new(&lg);
        let g = lg.graph();
        let mut states: Vec<Weight> = vec![Weight::Empty];
        states.extend(g.vertex_indices().map(|v| Weight::Element(WeightedElement::vertex(v))));
        states.extend(g.signed_edges().into_iter().map(|e| Weight::Element(lg.weight_of_edge(e))));
        for e1 in g.signed_edges() {
            for e2 in g.signed_edges() {
                let a1 = aut.act(EdgeWord(vec![e1]));
                let a2 = aut.act(EdgeWord(vec![e2]));
                let composed = aut.act(EdgeWord(vec![e2, e1]));
                for s in &states {
                    assert_eq!(a1.apply(&a2.apply(s)), composed.apply(s));
                    assert_eq!(a1.after(&a2).apply(s), composed.apply(s));
                }
            }
        }
    }

    #[test]
    fn vertex_action_keeps_terminal_vertex() {
        let lg = fixtures::labeled(fixtures::three_vertex(true));
        let aut = GraphAutomaton::new(&lg);
        let g = lg.graph();
        for v in g.vertex_indices() {
            let av = aut.vertex_action(v).unwrap();
            for u in g.vertex_indices() {
                let s = Weight::Element(WeightedElement::vertex(u));
                let out = av.apply(&s);
                if u == v {
                    assert_eq!(out.terminal(), Some(v));
                } else {
                    assert_eq!(out, Weight::Empty);
                }
            }
            assert_eq!(av.apply(&Weight::Empty), Weight::Empty);
        }
    }

    #[test]
    fn trees() {
        let lg = fixtures::labeled(fixtures::bouquet(1));
        let t = GraphAutomaton::new(&lg).build_tree(VertexIdx(0), 2).unwrap();
        assert_eq!(t.len(), 7);
        assert_eq!(t.level_sizes(), vec![1, 2, 4]);

        let lg = fixtures::labeled(fixtures::single_edge());
        let v1 = lg.graph().vertex("v1").unwrap();
        let t = GraphAutomaton::new(&lg).build_tree(v1, 1).unwrap();
        assert_eq!(t.nodes[0].children.len(), 1);

        let lg = fixtures::labeled(fixtures::circulant(3));
        let t = GraphAutomaton::new(&lg).build_tree(VertexIdx(0), 3).unwrap();
        assert!(t.nodes.iter().filter(|n| n.depth < 3).all(|n| n.children.len() == 2));
        assert!(GraphAutomaton::new(&lg).build_tree(VertexIdx(7), 1).is_err());
    }

    #[test]
    fn tree_is_depth_monotone() {
        let lg = fixtures::three_vertex_labeled(true);
        let aut = GraphAutomaton::new(&lg);
        let small = aut.build_tree(VertexIdx(1), 2).unwrap();
        let big = aut.build_tree(VertexIdx(1), 3).unwrap();
        for (i, n) in small.nodes.iter().enumerate() {
            assert_eq!(n.weight, big.nodes[i].weight);
            assert_eq!(n.edge, big.nodes[i].edge);
        }
    }

    #[test]
    fn fractaloid_verdicts() {
        for lg in [
            fixtures::labeled(fixtures::circulant(3)),
            fixtures::labeled(fixtures::circulant(5)),
            fixtures::labeled(fixtures::bouquet(2)),
        ] {
            let v = GraphAutomaton::new(&lg).is_fractaloid(3).unwrap();
            assert!(v.fractaloid && v.local_criterion && v.witness.is_none());
        }
        let lg = fixtures::three_vertex_labeled(true);
        let v = GraphAutomaton::new(&lg).is_fractaloid(3).unwrap();
        assert!(!v.fractaloid && !v.local_criterion);
        assert!(v.witness.is_some());
        assert!(GraphAutomaton::new(&lg).is_fractaloid(0).is_err());
    }

    #[test]
    fn dot_export_mentions_every_node() {
        let lg = fixtures::labeled(fixtures::bouquet(1));
        let t = GraphAutomaton::new(&lg).build_tree(VertexIdx(0), 1).unwrap();
        let dot = t.to_dot(&lg);
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("~l1"));
    }
}

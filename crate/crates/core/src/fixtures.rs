//! Built-in example graphs. The same graphs ship as JSON under `fixtures/`.

use std::collections::BTreeMap;

use crate::graph::{DirectedGraph, ShadowedGraph};
use crate::labeling::{LabeledGraph, LabelingMode};

fn build(vertices: &[String], edges: Vec<(String, String, String)>) -> ShadowedGraph {
    ShadowedGraph::new(DirectedGraph::new(vertices.iter().cloned(), edges)).expect("fixture graphs are valid")
}

/// One-flow circulant graph `C_n`: `e_j : v_j → v_{j+1}` (indices mod n).
pub fn circulant(n: usize) -> ShadowedGraph {
    assert!((1..=9).contains(&n), "fixture ids assume 1..=9 vertices");
    let vs: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let es = (1..=n).map(|i| (format!("e{i}"), format!("v{i}"), format!("v{}", i % n + 1))).collect();
    build(&vs, es)
}

/// One vertex `v` carrying `n` loop edges `l1..ln`.
pub fn bouquet(n: usize) -> ShadowedGraph {
    assert!((1..=9).contains(&n), "fixture ids assume 1..=9 loops");
    let es = (1..=n).map(|i| (format!("l{i}"), "v".into(), "v".into())).collect();
    build(&["v".to_string()], es)
}

/// The three-vertex graph with edges `e12:1, e12:2 : v1 → v2`,
/// `e13:1 : v1 → v3` and, when `with_loop`, the loop `e22:1` at `v2`.
pub fn three_vertex(with_loop: bool) -> ShadowedGraph {
    let vs: Vec<String> = ["v1", "v2", "v3"].iter().map(|s| s.to_string()).collect();
    let mut es = vec![
        ("e12:1".into(), "v1".into(), "v2".into()),
        ("e12:2".into(), "v1".into(), "v2".into()),
        ("e13:1".into(), "v1".into(), "v3".into()),
    ];
    if with_loop {
        es.push(("e22:1".into(), "v2".into(), "v2".into()));
    }
    build(&vs, es)
}

/// Labels of the three-vertex graph: the parallel-edge index `k` of `e_{ij:k}`.
pub fn three_vertex_labels(with_loop: bool) -> BTreeMap<String, i64> {
    let mut m = BTreeMap::from([("e12:1".to_string(), 1), ("e12:2".to_string(), 2), ("e13:1".to_string(), 1)]);
    if with_loop {
        m.insert("e22:1".to_string(), 1);
    }
    m
}

/// A single non-loop edge `e : v1 → v2`.
pub fn single_edge() -> ShadowedGraph {
    build(&["v1".to_string(), "v2".to_string()], vec![("e".into(), "v1".into(), "v2".into())])
}

/// Default per-vertex labeling of a fixture graph.
pub fn labeled(g: ShadowedGraph) -> LabeledGraph {
    LabeledGraph::new(g, LabelingMode::PerVertex).expect("fixture graphs have edges")
}

/// The three-vertex graph with its explicit parallel-edge labels.
pub fn three_vertex_labeled(with_loop: bool) -> LabeledGraph {
    LabeledGraph::new(
        three_vertex(with_loop),
        LabelingMode::Explicit { labels: three_vertex_labels(with_loop), require_per_vertex: false },
    )
    .expect("fixture labels are valid")
}

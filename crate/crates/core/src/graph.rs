//! Directed multigraphs and their shadowed graphs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Position of a vertex in the sorted vertex list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexIdx(pub u32);

/// Position of a base edge in the sorted edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIdx(pub u32);

impl VertexIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRecord {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// A finite directed multigraph with opaque string ids. Loops and parallel
/// edges are allowed. Vertices and edges are kept sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyVertexSet,
    DuplicateVertex(String),
    DuplicateEdge(String),
    DanglingEdge { edge: String, endpoint: String },
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyVertexSet => write!(f, "vertex set is empty"),
            Violation::DuplicateVertex(v) => write!(f, "duplicate vertex id `{v}`"),
            Violation::DuplicateEdge(e) => write!(f, "duplicate edge id `{e}`"),
            Violation::DanglingEdge { edge, endpoint } => {
                write!(f, "edge `{edge}` references unknown vertex `{endpoint}`")
            }
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
        }
    }
}

/// Result of [`DirectedGraph::validate`]. An empty violation list means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

impl DirectedGraph {
    /// Builds a graph from raw ids. Nothing is checked here; call
    /// [`validate`](Self::validate) or go through [`ShadowedGraph::new`].
    pub fn new<V, E>(vertices: V, edges: E) -> Self
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let mut vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        vertices.sort();
        let mut edges: Vec<EdgeRecord> = edges.into_iter().map(|(id, src, dst)| EdgeRecord { id, src, dst }).collect();
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        DirectedGraph { vertices, edges }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    /// Lists every structural problem: empty vertex set, duplicate ids,
    /// dangling edges, and disconnectedness of the underlying undirected graph.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.vertices.is_empty() {
            violations.push(Violation::EmptyVertexSet);
        }
        for pair in self.vertices.windows(2) {
            if pair[0] == pair[1] {
                violations.push(Violation::DuplicateVertex(pair[0].clone()));
            }
        }
        for pair in self.edges.windows(2) {
            if pair[0].id == pair[1].id {
                violations.push(Violation::DuplicateEdge(pair[0].id.clone()));
            }
        }
        let known: BTreeSet<&str> = self.vertices.iter().map(String::as_str).collect();
        let mut dangling = false;
        for e in &self.edges {
            for endpoint in [&e.src, &e.dst] {
                if !known.contains(endpoint.as_str()) {
                    dangling = true;
                    violations.push(Violation::DanglingEdge { edge: e.id.clone(), endpoint: endpoint.clone() });
                }
            }
        }
        if !self.vertices.is_empty() && !dangling {
            let components = self.weak_components(&known);
            if components > 1 {
                violations.push(Violation::Disconnected { components });
            }
        }
        ValidationReport { violations }
    }

    fn weak_components(&self, known: &BTreeSet<&str>) -> usize {
        let index: BTreeMap<&str, usize> = known.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut adj = vec![Vec::new(); index.len()];
        for e in &self.edges {
            let (a, b) = (index[e.src.as_str()], index[e.dst.as_str()]);
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; adj.len()];
        let mut components = 0;
        for start in 0..adj.len() {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    fn check_vertex(&self, v: &str) -> Result<()> {
        if self.vertices.binary_search_by(|x| x.as_str().cmp(v)).is_ok() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }

    pub fn out_degree(&self, v: &str) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.edges.iter().filter(|e| e.src == v).count())
    }

    pub fn in_degree(&self, v: &str) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.edges.iter().filter(|e| e.dst == v).count())
    }

    pub fn degree(&self, v: &str) -> Result<usize> {
        Ok(self.out_degree(v)? + self.in_degree(v)?)
    }

    /// Largest raw out-edge count over all vertices.
    pub fn max_out_degree(&self) -> Result<usize> {
        if self.edges.is_empty() {
            return Err(Error::NoEdges);
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for e in &self.edges {
            *counts.entry(e.src.as_str()).or_default() += 1;
        }
        Ok(counts.values().copied().max().unwrap_or(0))
    }
}

/// An edge of `Ĝ`: a base edge together with an orientation.
///
/// Ordering is by base edge index, forward before inverse. Every enumeration
/// in the crate uses this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedEdge {
    pub edge: EdgeIdx,
    pub inverse: bool,
}

impl SignedEdge {
    pub fn forward(edge: EdgeIdx) -> Self {
        SignedEdge { edge, inverse: false }
    }

    pub fn backward(edge: EdgeIdx) -> Self {
        SignedEdge { edge, inverse: true }
    }

    pub fn inv(self) -> Self {
        SignedEdge { edge: self.edge, inverse: !self.inverse }
    }
}

/// The shadowed graph `Ĝ = G ∪ G⁻¹` of a validated graph, with index-based
/// adjacency. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ShadowedGraph {
    graph: DirectedGraph,
    src: Vec<VertexIdx>,
    dst: Vec<VertexIdx>,
    // signed edges leaving each vertex of Ĝ, sorted
    out: Vec<Vec<SignedEdge>>,
}

impl ShadowedGraph {
    /// Validates `graph` and builds its shadowed graph.
    pub fn new(graph: DirectedGraph) -> Result<Self> {
        let report = graph.validate();
        if !report.is_valid() {
            return Err(Error::InvalidGraph(report.to_string()));
        }
        let lookup = |v: &str| -> VertexIdx {
            VertexIdx(graph.vertices.binary_search_by(|x| x.as_str().cmp(v)).unwrap() as u32)
        };
        let src: Vec<VertexIdx> = graph.edges.iter().map(|e| lookup(&e.src)).collect();
        let dst: Vec<VertexIdx> = graph.edges.iter().map(|e| lookup(&e.dst)).collect();
        let mut out = vec![Vec::new(); graph.vertices.len()];
        for i in 0..graph.edges.len() {
            let e = EdgeIdx(i as u32);
            out[src[i].index()].push(SignedEdge::forward(e));
            out[dst[i].index()].push(SignedEdge::backward(e));
        }
        for list in &mut out {
            list.sort();
        }
        Ok(ShadowedGraph { graph, src, dst, out })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.edges.len()
    }

    pub fn vertex_indices(&self) -> impl Iterator<Item = VertexIdx> {
        (0..self.num_vertices() as u32).map(VertexIdx)
    }

    pub fn edge_indices(&self) -> impl Iterator<Item = EdgeIdx> {
        (0..self.num_edges() as u32).map(EdgeIdx)
    }

    /// All signed edges of `Ĝ` in canonical order. Its length is `2·|E(G)|`.
    pub fn signed_edges(&self) -> Vec<SignedEdge> {
        self.edge_indices().flat_map(|e| [SignedEdge::forward(e), SignedEdge::backward(e)]).collect()
    }

    pub fn source(&self, x: SignedEdge) -> VertexIdx {
        if x.inverse {
            self.dst[x.edge.index()]
        } else {
            self.src[x.edge.index()]
        }
    }

    pub fn target(&self, x: SignedEdge) -> VertexIdx {
        self.source(x.inv())
    }

    pub fn is_loop_edge(&self, e: EdgeIdx) -> bool {
        self.src[e.index()] == self.dst[e.index()]
    }

    /// Signed edges of `Ĝ` starting at `v`, sorted.
    pub fn out_edges(&self, v: VertexIdx) -> &[SignedEdge] {
        &self.out[v.index()]
    }

    /// Out-degree of `v` in `Ĝ`, equal to `deg_out_G(v) + deg_in_G(v)`.
    pub fn out_degree_hat(&self, v: VertexIdx) -> usize {
        self.out[v.index()].len()
    }

    pub fn out_degree(&self, v: VertexIdx) -> usize {
        self.src.iter().filter(|&&s| s == v).count()
    }

    pub fn in_degree(&self, v: VertexIdx) -> usize {
        self.dst.iter().filter(|&&d| d == v).count()
    }

    pub fn vertex_id(&self, v: VertexIdx) -> &str {
        &self.graph.vertices[v.index()]
    }

    pub fn edge_id(&self, e: EdgeIdx) -> &str {
        &self.graph.edges[e.index()].id
    }

    pub fn vertex(&self, id: &str) -> Result<VertexIdx> {
        self.graph
            .vertices
            .binary_search_by(|x| x.as_str().cmp(id))
            .map(|i| VertexIdx(i as u32))
            .map_err(|_| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge(&self, id: &str) -> Result<EdgeIdx> {
        self.graph
            .edges
            .binary_search_by(|x| x.id.as_str().cmp(id))
            .map(|i| EdgeIdx(i as u32))
            .map_err(|_| Error::UnknownEdge(id.to_string()))
    }

    /// Text form of a signed edge: the edge id, prefixed by `~` for a shadow.
    pub fn signed_id(&self, x: SignedEdge) -> String {
        if x.inverse {
            format!("~{}", self.edge_id(x.edge))
        } else {
            self.edge_id(x.edge).to_string()
        }
    }

    pub fn parse_signed(&self, text: &str) -> Result<SignedEdge> {
        match text.strip_prefix('~') {
            Some(id) => Ok(SignedEdge::backward(self.edge(id)?)),
            None => Ok(SignedEdge::forward(self.edge(text)?)),
        }
    }

    /// The shadow `G⁻¹` as a directed graph (every edge reversed, same ids).
    pub fn reversed(&self) -> DirectedGraph {
        DirectedGraph::new(
            self.graph.vertices.iter().cloned(),
            self.graph.edges.iter().map(|e| (e.id.clone(), e.dst.clone(), e.src.clone())),
        )
    }

    /// Adjacency count matrix of `Ĝ`: entry `[u][v]` counts signed edges `u → v`.
    pub fn adjacency_hat(&self) -> Vec<Vec<u64>> {
        let n = self.num_vertices();
        let mut a = vec![vec![0u64; n]; n];
        for x in self.signed_edges() {
            a[self.source(x).index()][self.target(x).index()] += 1;
        }
        a
    }
}

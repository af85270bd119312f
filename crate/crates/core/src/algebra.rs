//! Exact formal sums of right multiplication operators and the diagonal
//! subalgebra they project onto.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::graph::{ShadowedGraph, SignedEdge, VertexIdx};
use crate::groupoid::{concat, GroupoidElement};

/// `Σ_v m_v R_v`, stored as `v ↦ m_v` with zero coefficients dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiagonalElement(BTreeMap<VertexIdx, BigInt>);

impl DiagonalElement {
    pub fn zero() -> Self {
        DiagonalElement::default()
    }

    /// `1_{D_G} = Σ_v R_v`.
    pub fn one(g: &ShadowedGraph) -> Self {
        DiagonalElement(g.vertex_indices().map(|v| (v, BigInt::one())).collect())
    }

    pub fn unit(v: VertexIdx) -> Self {
        DiagonalElement(BTreeMap::from([(v, BigInt::one())]))
    }

    pub fn from_pairs<I, N>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (VertexIdx, N)>,
        N: Into<BigInt>,
    {
        let mut d = DiagonalElement::zero();
        for (v, c) in pairs {
            d.add_at(v, &c.into());
        }
        d
    }

    /// Coefficients keyed by vertex id, e.g. `{"v1": 3, "v2": 2}`.
    pub fn from_ids(g: &ShadowedGraph, pairs: &[(&str, i64)]) -> Self {
        Self::from_pairs(pairs.iter().map(|&(id, c)| (g.vertex(id).expect("known vertex"), c)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: VertexIdx) -> BigInt {
        self.0.get(&v).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexIdx, &BigInt)> {
        self.0.iter()
    }

    pub fn add_at(&mut self, v: VertexIdx, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(v).or_default();
        *e += c;
        if e.is_zero() {
            self.0.remove(&v);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&v, c) in &other.0 {
            out.add_at(v, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        DiagonalElement(self.0.iter().map(|(&v, c)| (v, c * k)).collect())
    }

    /// Componentwise product (`R_v R_u = δ_{uv} R_v`).
    pub fn mul(&self, other: &Self) -> Self {
        DiagonalElement(self.0.iter().filter_map(|(v, a)| other.0.get(v).map(|b| (*v, a * b))).collect())
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> BigInt {
        self.0.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Vertex id ↦ coefficient for every vertex of `g`, zeros included.
    pub fn render(&self, g: &ShadowedGraph) -> BTreeMap<String, BigInt> {
        g.vertex_indices().map(|v| (g.vertex_id(v).to_string(), self.get(v))).collect()
    }

    pub fn display<'a>(&'a self, g: &'a ShadowedGraph) -> impl fmt::Display + 'a {
        DisplayDiagonal { d: self, g }
    }
}

struct DisplayDiagonal<'a> {
    d: &'a DiagonalElement,
    g: &'a ShadowedGraph,
}

impl fmt::Display for DisplayDiagonal<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.d.0.iter().map(|(&v, c)| format!("{c}·R[{}]", self.g.vertex_id(v))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A finite integer combination `Σ c_w R_w` of right multiplication
/// operators. The product follows `R_a R_b = R_{ba}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormalSum(BTreeMap<GroupoidElement, BigInt>);

impl FormalSum {
    pub fn zero() -> Self {
        FormalSum::default()
    }

    pub fn single(w: GroupoidElement) -> Self {
        let mut s = FormalSum::zero();
        s.add_term(w, &BigInt::one());
        s
    }

    /// `Σ R_e` over the given signed edges.
    pub fn of_edges(edges: &[SignedEdge]) -> Self {
        let mut s = FormalSum::zero();
        for &e in edges {
            s.add_term(GroupoidElement::edge(e), &BigInt::one());
        }
        s
    }

    pub fn from_diagonal(d: &DiagonalElement) -> Self {
        let mut s = FormalSum::zero();
        for (&v, c) in d.iter() {
            s.add_term(GroupoidElement::Vertex(v), c);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupoidElement, &BigInt)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Adds `c·R_w`; `R_∅ = 0`.
    pub fn add_term(&mut self, w: GroupoidElement, c: &BigInt) {
        if w.is_empty() || c.is_zero() {
            return;
        }
        let e = self.0.entry(w.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.0.remove(&w);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.0 {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        FormalSum(self.0.iter().map(|(w, c)| (w.clone(), c * k)).collect())
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self, g: &ShadowedGraph) -> Self {
        let mut out = FormalSum::zero();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                let ba = concat(g, b, a);
                if !ba.is_empty() {
                    out.add_term(ba, &(ca * cb));
                }
            }
        }
        out
    }

    /// The canonical conditional expectation: keep the vertex terms.
    pub fn expectation(&self) -> DiagonalElement {
        let mut d = DiagonalElement::zero();
        for (w, c) in &self.0 {
            if let GroupoidElement::Vertex(v) = w {
                d.add_at(*v, c);
            }
        }
        d
    }

    /// Adjoint: `R_w* = R_{w⁻¹}`.
    pub fn adjoint(&self) -> Self {
        FormalSum(self.0.iter().map(|(w, c)| (w.inverse(), c.clone())).collect())
    }
}

//! Right multiplication and labeling operators on the truncated graph Hilbert
//! space, as exact sparse integer matrices.
//!
//! The basis holds `ξ_v` for every vertex and `ξ_w` for every reduced path of
//! length `≤ L`. `R_w` sends `ξ_{w'}` to `ξ_{w'w}` (or to `0` when `w'w = ∅`).
//! Images that fall outside the truncation are dropped and the column is
//! flagged.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::DiagonalElement;
use crate::error::{Error, Result};
use crate::graph::{ShadowedGraph, SignedEdge};
use crate::groupoid::{concat, reduced_elements, GroupoidElement};
use crate::labeling::LabeledGraph;

pub const DEFAULT_MAX_BASIS: usize = 100_000;

/// Ordered basis of the truncated Hilbert space.
#[derive(Debug, Clone)]
pub struct Basis {
    max_len: usize,
    elements: Vec<GroupoidElement>,
    index: HashMap<GroupoidElement, usize>,
}

impl Basis {
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupoidElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupoidElement {
        &self.elements[i]
    }

    pub fn position(&self, w: &GroupoidElement) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Word length of the `i`-th basis element.
    pub fn length_of(&self, i: usize) -> usize {
        self.elements[i].length().unwrap_or(0)
    }
}

/// Number of reduced words of each length `0..=max_len` (index 0 counts
/// vertices), without building them.
pub fn reduced_word_counts(g: &ShadowedGraph, max_len: usize) -> Vec<u128> {
    let letters = g.signed_edges();
    let pos: HashMap<SignedEdge, usize> = letters.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut out = vec![g.num_vertices() as u128];
    // ending[i]: reduced words of the current length ending in letters[i]
    let mut ending = vec![1u128; letters.len()];
    for len in 1..=max_len {
        if len > 1 {
            let mut next = vec![0u128; letters.len()];
            for (i, &x) in letters.iter().enumerate() {
                if ending[i] == 0 {
                    continue;
                }
                for &y in g.out_edges(g.target(x)) {
                    if y != x.inv() {
                        let j = pos[&y];
                        next[j] = next[j].saturating_add(ending[i]);
                    }
                }
            }
            ending = next;
        }
        out.push(ending.iter().fold(0u128, |a, &b| a.saturating_add(b)));
    }
    out
}

/// All vertices and reduced paths of length `≤ max_len`. Fails without
/// allocating when the size would exceed `max_size`.
pub fn build_basis(g: &ShadowedGraph, max_len: usize, max_size: usize) -> Result<Basis> {
    let total = reduced_word_counts(g, max_len).iter().fold(0u128, |a, &b| a.saturating_add(b));
    if total > max_size as u128 {
        return Err(Error::BudgetExceeded { what: "basis size", limit: max_size as u64 });
    }
    let elements = reduced_elements(g, max_len);
    let index = elements.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    Ok(Basis { max_len, elements, index })
}

/// Sparse vector over the basis.
pub type SparseVector = BTreeMap<usize, BigInt>;

fn add_into(v: &mut SparseVector, i: usize, c: BigInt) {
    if c.is_zero() {
        return;
    }
    let e = v.entry(i).or_default();
    *e += c;
    if e.is_zero() {
        v.remove(&i);
    }
}

/// Square integer matrix stored by columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseOperator {
    cols: Vec<SparseVector>,
    // columns whose true image was cut by the truncation
    boundary: BTreeSet<usize>,
}

impl SparseOperator {
    pub fn zero(dim: usize) -> Self {
        SparseOperator { cols: vec![SparseVector::new(); dim], boundary: BTreeSet::new() }
    }

    pub fn identity(dim: usize) -> Self {
        let cols = (0..dim).map(|i| SparseVector::from([(i, BigInt::one())])).collect();
        SparseOperator { cols, boundary: BTreeSet::new() }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &SparseVector {
        &self.cols[j]
    }

    pub fn get(&self, row: usize, col: usize) -> BigInt {
        self.cols[col].get(&row).cloned().unwrap_or_default()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn is_boundary(&self, col: usize) -> bool {
        self.boundary.contains(&col)
    }

    pub fn boundary_columns(&self) -> &BTreeSet<usize> {
        &self.boundary
    }

    /// Whether any entry was dropped by the truncation.
    pub fn is_truncated(&self) -> bool {
        !self.boundary.is_empty()
    }

    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        let mut out = SparseVector::new();
        for (&j, c) in v {
            for (&i, a) in &self.cols[j] {
                add_into(&mut out, i, a * c);
            }
        }
        out
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let mut boundary = BTreeSet::new();
        let cols = other
            .cols
            .iter()
            .enumerate()
            .map(|(j, col)| {
                if other.is_boundary(j) || col.keys().any(|&k| self.is_boundary(k)) {
                    boundary.insert(j);
                }
                self.apply(col)
            })
            .collect();
        SparseOperator { cols, boundary }
    }

    pub fn pow(&self, n: u32) -> SparseOperator {
        let mut acc = SparseOperator::identity(self.dim());
        for _ in 0..n {
            acc = self.mul(&acc);
        }
        acc
    }

    pub fn add(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let mut out = self.clone();
        for (j, col) in other.cols.iter().enumerate() {
            for (&i, c) in col {
                add_into(&mut out.cols[j], i, c.clone());
            }
        }
        out.boundary.extend(other.boundary.iter().copied());
        out
    }

    /// Transpose (the adjoint, entries being integers). Boundary flags are
    /// not carried over.
    pub fn transpose(&self) -> SparseOperator {
        let mut out = SparseOperator::zero(self.dim());
        for (j, col) in self.cols.iter().enumerate() {
            for (&i, c) in col {
                out.cols[i].insert(j, c.clone());
            }
        }
        out
    }

    /// Entrywise equality, ignoring boundary flags.
    pub fn same_entries(&self, other: &SparseOperator) -> bool {
        self.cols == other.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.same_entries(&self.transpose())
    }

    /// Entrywise equality restricted to the given columns.
    pub fn agrees_on(&self, other: &SparseOperator, cols: impl IntoIterator<Item = usize>) -> bool {
        cols.into_iter().all(|j| self.cols[j] == other.cols[j])
    }
}

/// `R_w` on the basis.
pub fn right_mult(w: &GroupoidElement, basis: &Basis, g: &ShadowedGraph) -> Result<SparseOperator> {
    if w.is_empty() {
        return Err(Error::EmptyOperand);
    }
    let mut op = SparseOperator::zero(basis.len());
    for (j, u) in basis.elements().iter().enumerate() {
        let uw = concat(g, u, w);
        if uw.is_empty() {
            continue;
        }
        match basis.position(&uw) {
            Some(i) => {
                op.cols[j].insert(i, BigInt::one());
            }
            None => {
                op.boundary.insert(j);
            }
        }
    }
    Ok(op)
}

/// `T_k = Σ_{label(e) = k} R_e`.
pub fn labeling_operator(lg: &LabeledGraph, k: i32, basis: &Basis) -> Result<SparseOperator> {
    lg.check_label(k)?;
    let g = lg.graph();
    let mut op = SparseOperator::zero(basis.len());
    for x in lg.edges_with_label(k) {
        op = op.add(&right_mult(&GroupoidElement::edge(x), basis, g)?);
    }
    Ok(op)
}

/// `T_G = Σ_{k=±1..±N} T_k`, i.e. the sum of `R_e` over all signed edges.
pub fn graph_operator(lg: &LabeledGraph, basis: &Basis) -> Result<SparseOperator> {
    let g = lg.graph();
    let mut op = SparseOperator::zero(basis.len());
    for x in g.signed_edges() {
        op = op.add(&right_mult(&GroupoidElement::edge(x), basis, g)?);
    }
    Ok(op)
}

/// Diagonal entries of `op` at the vertex positions of the basis.
pub fn vertex_diagonal(op: &SparseOperator, basis: &Basis, g: &ShadowedGraph) -> DiagonalElement {
    DiagonalElement::from_pairs(g.vertex_indices().map(|v| {
        let i = basis.position(&GroupoidElement::Vertex(v)).expect("vertices are in the basis");
        (v, op.get(i, i))
    }))
}

/// `E(T_Gⁿ)` read off the truncated matrix.
///
/// `R_w` is diagonal on the basis exactly when `w` is a vertex, so the
/// diagonal entry of `T_Gⁿ` at `ξ_v` is the coefficient of `R_v` in
/// `E(T_Gⁿ)`. Only the columns at vertices are computed, by applying `T_G`
/// `n` times to `ξ_v`; a vertex column reaches words of length at most `n`,
/// so for `max_len ≥ n` the truncation never touches it.
pub fn oracle_expectation_power(
    lg: &LabeledGraph,
    n: usize,
    max_len: usize,
    max_basis: usize,
) -> Result<DiagonalElement> {
    if max_len < n {
        return Err(Error::Precondition(format!("truncation length {max_len} is below the power {n}")));
    }
    let g = lg.graph();
    let basis = build_basis(g, max_len, max_basis)?;
    let t = graph_operator(lg, &basis)?;
    Ok(DiagonalElement::from_pairs(g.vertex_indices().map(|v| {
        let i = basis.position(&GroupoidElement::Vertex(v)).expect("vertices are in the basis");
        let mut x = SparseVector::from([(i, BigInt::one())]);
        for _ in 0..n {
            x = t.apply(&x);
        }
        (v, x.get(&i).cloned().unwrap_or_default())
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::EdgeIdx;
    use crate::groupoid::reduce;
    use crate::groupoid::EdgeWord;

    fn all_fixtures() -> Vec<LabeledGraph> {
        vec![
            fixtures::labeled(fixtures::circulant(3)),
            fixtures::labeled(fixtures::bouquet(1)),
            fixtures::labeled(fixtures::bouquet(2)),
            fixtures::three_vertex_labeled(true),
            fixtures::three_vertex_labeled(false),
            fixtures::labeled(fixtures::single_edge()),
        ]
    }

    #[test]
    fn basis_sizes() {
        let b1 = build_basis(&fixtures::bouquet(1), 3, DEFAULT_MAX_BASIS).unwrap();
        assert_eq!(b1.len(), 7);
        let b2 = build_basis(&fixtures::bouquet(2), 2, DEFAULT_MAX_BASIS).unwrap();
        assert_eq!(b2.len(), 17);
        let b0 = build_basis(&fixtures::three_vertex(true), 0, DEFAULT_MAX_BASIS).unwrap();
        assert_eq!(b0.len(), 3);
        assert!(b0.elements().iter().all(GroupoidElement::is_vertex));
    }

    #[test]
    fn basis_closed_under_inverse_and_ordered() {
        let g = fixtures::three_vertex(true);
        let b = build_basis(&g, 4, DEFAULT_MAX_BASIS).unwrap();
        for w in b.elements() {
            assert!(b.position(&w.inverse()).is_some());
        }
        let lens: Vec<usize> = (0..b.len()).map(|i| b.length_of(i)).collect();
        assert!(lens.windows(2).all(|p| p[0] <= p[1]));
        let counts = reduced_word_counts(&g, 4);
        assert_eq!(counts.iter().sum::<u128>() as usize, b.len());
    }

    #[test]
    fn basis_budget() {
        let err = build_basis(&fixtures::bouquet(3), 8, 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn vertex_projections() {
        let g = fixtures::three_vertex(true);
        let b = build_basis(&g, 3, DEFAULT_MAX_BASIS).unwrap();
        for v in g.vertex_indices() {
            let r = right_mult(&GroupoidElement::Vertex(v), &b, &g).unwrap();
            assert!(r.mul(&r).same_entries(&r));
            assert!(r.is_symmetric());
            assert!(!r.is_truncated());
        }
    }

    #[test]
    fn partial_isometry_off_boundary() {
        let g = fixtures::three_vertex(true);
        let l = 5;
        let b = build_basis(&g, l, DEFAULT_MAX_BASIS).unwrap();
        for w in reduced_elements(&g, 2).into_iter().filter(|w| !w.is_vertex()) {
            let r = right_mult(&w, &b, &g).unwrap();
            let rs = right_mult(&w.inverse(), &b, &g).unwrap();
            assert!(r.transpose().same_entries(&rs));
            let rrr = r.mul(&rs).mul(&r);
            let k = w.length().unwrap();
            let safe = (0..b.len()).filter(|&i| b.length_of(i) + 3 * k <= l);
            assert!(rrr.agrees_on(&r, safe));
        }
    }

    #[test]
    fn product_of_right_multiplications() {
        // R_{w1} R_{w2} = R_{w2 w1}
        let g = fixtures::bouquet(2);
        let l = 6;
        let b = build_basis(&g, l, DEFAULT_MAX_BASIS).unwrap();
        let short = reduced_elements(&g, 2);
        for w1 in &short {
            for w2 in &short {
                let lhs = right_mult(w1, &b, &g).unwrap().mul(&right_mult(w2, &b, &g).unwrap());
                let prod = concat(&g, w2, w1);
                let rhs = right_mult(&prod, &b, &g).unwrap();
                let reach = w1.length().unwrap() + w2.length().unwrap();
                let safe = (0..b.len()).filter(|&i| b.length_of(i) + reach <= l);
                assert!(lhs.agrees_on(&rhs, safe));
            }
        }
    }

    #[test]
    fn three_vertex_labeling_operators() {
        let lg = fixtures::three_vertex_labeled(true);
        let g = lg.graph();
        let b = build_basis(g, 2, DEFAULT_MAX_BASIS).unwrap();
        let r = |id: &str| right_mult(&GroupoidElement::edge(SignedEdge::forward(g.edge(id).unwrap())), &b, g).unwrap();
        let t1 = labeling_operator(&lg, 1, &b).unwrap();
        assert!(t1.same_entries(&r("e12:1").add(&r("e13:1")).add(&r("e22:1"))));
        let t2 = labeling_operator(&lg, 2, &b).unwrap();
        assert!(t2.same_entries(&r("e12:2")));
        assert!(matches!(labeling_operator(&lg, 3, &b), Err(Error::LabelOutOfRange { .. })));
        assert!(labeling_operator(&lg, 0, &b).is_err());
    }

    #[test]
    fn adjoints_on_every_fixture() {
        for lg in all_fixtures() {
            let b = build_basis(lg.graph(), 4, DEFAULT_MAX_BASIS).unwrap();
            let n = lg.max_label() as i32;
            for k in 1..=n {
                let tk = labeling_operator(&lg, k, &b).unwrap();
                let tmk = labeling_operator(&lg, -k, &b).unwrap();
                assert!(tk.transpose().same_entries(&tmk));
            }
            assert!(graph_operator(&lg, &b).unwrap().is_symmetric());
        }
    }

    #[test]
    fn oracle_small_cases() {
        let lg = fixtures::labeled(fixtures::bouquet(1));
        let v = lg.graph().vertex("v").unwrap();
        let m = oracle_expectation_power(&lg, 2, 2, DEFAULT_MAX_BASIS).unwrap();
        assert_eq!(m, DiagonalElement::from_pairs([(v, 2)]));

        let lg = fixtures::three_vertex_labeled(true);
        let m = oracle_expectation_power(&lg, 2, 2, DEFAULT_MAX_BASIS).unwrap();
        assert_eq!(m, DiagonalElement::from_ids(lg.graph(), &[("v1", 3), ("v2", 4), ("v3", 1)]));

        assert!(oracle_expectation_power(&lg, 3, 2, DEFAULT_MAX_BASIS).is_err());
    }

    #[test]
    fn oracle_odd_powers_vanish() {
        for lg in all_fixtures() {
            for n in [1, 3, 5] {
                assert!(oracle_expectation_power(&lg, n, n, DEFAULT_MAX_BASIS).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn oracle_matches_full_matrix_power() {
        for lg in all_fixtures() {
            let b = build_basis(lg.graph(), 4, DEFAULT_MAX_BASIS).unwrap();
            let t = graph_operator(&lg, &b).unwrap();
            for n in 0..=4 {
                let full = vertex_diagonal(&t.pow(n), &b, lg.graph());
                let fast = oracle_expectation_power(&lg, n as usize, 4, DEFAULT_MAX_BASIS).unwrap();
                assert_eq!(full, fast);
            }
        }
    }

    #[test]
    fn oracle_is_truncation_stable() {
        for lg in all_fixtures() {
            for n in 0..=4 {
                let base = oracle_expectation_power(&lg, n, n, DEFAULT_MAX_BASIS).unwrap();
                for l in n + 1..=n + 2 {
                    assert_eq!(base, oracle_expectation_power(&lg, n, l, DEFAULT_MAX_BASIS).unwrap());
                }
            }
        }
    }

    #[test]
    fn oracle_counts_vertex_reducing_words() {
        // brute force: count words of length n reducing to a vertex
        use crate::groupoid::admissible_words;
        for lg in all_fixtures() {
            let g = lg.graph();
            for n in 1..=4 {
                let mut expect = DiagonalElement::zero();
                for w in admissible_words(g, n) {
                    if let GroupoidElement::Vertex(v) = reduce(g, &w) {
                        expect.add_at(v, &BigInt::one());
                    }
                }
                assert_eq!(oracle_expectation_power(&lg, n, n, DEFAULT_MAX_BASIS).unwrap(), expect);
            }
        }
    }

    #[test]
    fn right_mult_columns_are_unit_or_zero() {
        let g = fixtures::circulant(3);
        let b = build_basis(&g, 3, DEFAULT_MAX_BASIS).unwrap();
        let w = reduce(&g, &EdgeWord::new(vec![SignedEdge::forward(EdgeIdx(0))]));
        let r = right_mult(&w, &b, &g).unwrap();
        for j in 0..b.len() {
            let col = r.column(j);
            assert!(col.len() <= 1);
            assert!(col.values().all(|c| c.is_one()));
        }
        assert!(r.is_truncated());
        assert!(matches!(right_mult(&GroupoidElement::Empty, &b, &g), Err(Error::EmptyOperand)));
    }
}

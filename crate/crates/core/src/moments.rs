//! Diagonal-valued moments and free cumulants of labeling operators.
//!
//! Moments are tallies of edge words: `E(T_Gⁿ) = Σ_v m_v R_v` where `m_v`
//! counts admissible length-`n` words starting at `v` that reduce to the
//! vertex `v`. Cumulants are computed by Möbius inversion over `NC(n)`, with
//! nested expectations evaluated on exact formal sums of `R_w`.
//!
//! Operator products follow `R_a R_b = R_{ba}`, so `T_{i₁} ⋯ T_{iₙ}` expands
//! into words `x₁ ⋯ xₙ` whose letter `x_j` carries label `i_{n+1−j}`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::algebra::{DiagonalElement, FormalSum};
use crate::error::{Error, Result};
use crate::graph::{ShadowedGraph, SignedEdge, VertexIdx};
use crate::groupoid::{diagram_distinct, reduce, EdgeWord, GroupoidElement};
use crate::labeling::{BalanceVector, LabeledGraph};
use crate::ncpartitions::{e_pi, nc_with_moebius, nested_eval, NoncrossingPartition};

pub const DEFAULT_MAX_WORDS: u64 = 10_000_000;

/// `E(R_w)` for a single word: unit mass at `v` when `w` reduces to the
/// vertex `v`, zero otherwise.
pub fn expectation_of_word(g: &ShadowedGraph, w: &EdgeWord) -> DiagonalElement {
    match reduce(g, w) {
        GroupoidElement::Vertex(v) => DiagonalElement::unit(v),
        _ => DiagonalElement::zero(),
    }
}

/// Number of admissible length-`n` words, `Σ (Âⁿ)_{uv}`.
pub fn count_admissible(g: &ShadowedGraph, n: usize) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    let a = g.adjacency_hat();
    // paths[v]: admissible words of the current length ending at v
    let mut paths = vec![BigUint::zero(); a.len()];
    for row in &a {
        for (v, &c) in row.iter().enumerate() {
            paths[v] += c;
        }
    }
    for _ in 1..n {
        let mut next = vec![BigUint::zero(); paths.len()];
        for (u, row) in a.iter().enumerate() {
            for (v, &c) in row.iter().enumerate() {
                if c != 0 {
                    next[v] += &paths[u] * c;
                }
            }
        }
        paths = next;
    }
    paths.into_iter().sum()
}

/// Which words make up the moment word set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordSetMode {
    /// Admissible words that reduce to a vertex.
    Reduction,
    /// Loop words whose label word has zero balance vector.
    Balance,
}

impl WordSetMode {
    pub fn name(self) -> &'static str {
        match self {
            WordSetMode::Reduction => "reduction",
            WordSetMode::Balance => "balance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSetReport {
    pub n: usize,
    pub mode: WordSetMode,
    /// Qualifying words in canonical enumeration order.
    pub words: Vec<EdgeWord>,
    /// Words tallied by their source vertex.
    pub tallies: DiagonalElement,
}

struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Budget { limit, used: AtomicU64::new(0) }
    }

    fn spend(&self) -> Result<()> {
        if self.used.fetch_add(1, Ordering::Relaxed) >= self.limit {
            Err(Error::BudgetExceeded { what: "enumerated words", limit: self.limit })
        } else {
            Ok(())
        }
    }
}

// Depth-first walk over admissible words with an incrementally reduced stack.
// `allowed(j, x)` filters letter `x` at position `j`; branches that can no
// longer reach an accepted leaf are pruned before they are expanded.
struct Walk<'a, F: Fn(usize, SignedEdge) -> bool> {
    g: &'a ShadowedGraph,
    lg: &'a LabeledGraph,
    n: usize,
    mode: WordSetMode,
    allowed: F,
    budget: &'a Budget,
    collect: bool,
}

struct WalkState {
    start: VertexIdx,
    word: Vec<SignedEdge>,
    stack: Vec<SignedEdge>,
    balance: BalanceVector,
}

impl<F: Fn(usize, SignedEdge) -> bool + Sync> Walk<'_, F> {
    fn prunable(&self, st: &WalkState) -> bool {
        let remaining = self.n - st.word.len();
        match self.mode {
            WordSetMode::Reduction => st.stack.len() > remaining,
            WordSetMode::Balance => {
                st.balance.entries().values().map(|c| c.unsigned_abs()).sum::<u64>() > remaining as u64
            }
        }
    }

    fn accepts(&self, st: &WalkState) -> bool {
        match self.mode {
            WordSetMode::Reduction => st.stack.is_empty(),
            WordSetMode::Balance => st.balance.is_zero() && self.g.target(*st.word.last().unwrap()) == st.start,
        }
    }

    fn go(&self, st: &mut WalkState, count: &mut u64, out: &mut Vec<EdgeWord>) -> Result<()> {
        if st.word.len() == self.n {
            self.budget.spend()?;
            if self.accepts(st) {
                *count += 1;
                if self.collect {
                    out.push(EdgeWord::new(st.word.clone()));
                }
            }
            return Ok(());
        }
        let j = st.word.len();
        let here = self.g.target(*st.word.last().unwrap());
        for &x in self.g.out_edges(here) {
            if !(self.allowed)(j, x) {
                continue;
            }
            let popped = st.stack.last() == Some(&x.inv());
            if popped {
                st.stack.pop();
            } else {
                st.stack.push(x);
            }
            st.word.push(x);
            let mut b = None;
            if self.mode == WordSetMode::Balance {
                b = Some(st.balance.clone());
                st.balance.add_label(self.lg.label(x));
            }
            let res = if self.prunable(st) { Ok(()) } else { self.go(st, count, out) };
            if let Some(b) = b {
                st.balance = b;
            }
            st.word.pop();
            if popped {
                st.stack.push(x.inv());
            } else {
                st.stack.pop();
            }
            res?;
        }
        Ok(())
    }

    fn run(&self) -> Result<(DiagonalElement, Vec<EdgeWord>)> {
        let firsts: Vec<SignedEdge> = self.g.signed_edges().into_iter().filter(|&x| (self.allowed)(0, x)).collect();
        let parts: Vec<(VertexIdx, u64, Vec<EdgeWord>)> = firsts
            .par_iter()
            .map(|&x| {
                let mut balance = BalanceVector::default();
                if self.mode == WordSetMode::Balance {
                    balance.add_label(self.lg.label(x));
                }
                let mut st = WalkState { start: self.g.source(x), word: vec![x], stack: vec![x], balance };
                let mut count = 0;
                let mut out = Vec::new();
                if !self.prunable(&st) {
                    self.go(&mut st, &mut count, &mut out)?;
                }
                Ok((st.start, count, out))
            })
            .collect::<Result<_>>()?;
        let mut tallies = DiagonalElement::zero();
        let mut words = Vec::new();
        for (v, c, w) in parts {
            tallies.add_at(v, &BigInt::from(c));
            words.extend(w);
        }
        Ok((tallies, words))
    }
}

fn walk<F>(
    lg: &LabeledGraph,
    n: usize,
    mode: WordSetMode,
    allowed: F,
    max_words: u64,
    collect: bool,
) -> Result<(DiagonalElement, Vec<EdgeWord>)>
where
    F: Fn(usize, SignedEdge) -> bool + Sync,
{
    if n == 0 {
        return Err(Error::Precondition("word length must be at least 1".into()));
    }
    let budget = Budget::new(max_words);
    Walk { g: lg.graph(), lg, n, mode, allowed, budget: &budget, collect }.run()
}

/// The moment word set in the given mode.
pub fn w_m_set(lg: &LabeledGraph, n: usize, mode: WordSetMode, max_words: u64) -> Result<WordSetReport> {
    let (tallies, words) = walk(lg, n, mode, |_, _| true, max_words, true)?;
    Ok(WordSetReport { n, mode, words, tallies })
}

/// `E(T_Gⁿ)`, the per-vertex count of length-`n` words reducing to a vertex.
pub fn moment(lg: &LabeledGraph, n: usize, max_words: u64) -> Result<DiagonalElement> {
    Ok(walk(lg, n, WordSetMode::Reduction, |_, _| true, max_words, false)?.0)
}

/// Per-vertex count of balanced loop words of length `n`.
pub fn balance_count(lg: &LabeledGraph, n: usize, max_words: u64) -> Result<DiagonalElement> {
    Ok(walk(lg, n, WordSetMode::Balance, |_, _| true, max_words, false)?.0)
}

/// `E(T_Gⁿ)` by memoized counting on (current vertex, reduced stack,
/// remaining length). Experimental; cross-checked against [`moment`].
pub fn moment_memoized(lg: &LabeledGraph, n: usize) -> DiagonalElement {
    fn completions(
        g: &ShadowedGraph,
        here: VertexIdx,
        stack: &mut Vec<SignedEdge>,
        remaining: usize,
        memo: &mut HashMap<(VertexIdx, Vec<SignedEdge>, usize), BigUint>,
    ) -> BigUint {
        if stack.len() > remaining || (remaining - stack.len()) % 2 == 1 {
            return BigUint::zero();
        }
        if remaining == 0 {
            return BigUint::one();
        }
        let key = (here, stack.clone(), remaining);
        if let Some(c) = memo.get(&key) {
            return c.clone();
        }
        let mut total = BigUint::zero();
        for &x in g.out_edges(here) {
            let popped = stack.last() == Some(&x.inv());
            if popped {
                stack.pop();
            } else {
                stack.push(x);
            }
            total += completions(g, g.target(x), stack, remaining - 1, memo);
            if popped {
                stack.push(x.inv());
            } else {
                stack.pop();
            }
        }
        memo.insert(key, total.clone());
        total
    }
    let g = lg.graph();
    let mut memo = HashMap::new();
    DiagonalElement::from_pairs(g.vertex_indices().map(|v| {
        let c = completions(g, v, &mut Vec::new(), n, &mut memo);
        (v, BigInt::from(c))
    }))
}

fn check_indices(lg: &LabeledGraph, indices: &[i32]) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::Precondition("empty index tuple".into()));
    }
    indices.iter().try_for_each(|&k| lg.check_label(k))
}

/// `E(T_{i₁} ⋯ T_{iₙ})`: words `x₁ ⋯ xₙ` reducing to a vertex with
/// `label(x_j) = i_{n+1−j}`.
pub fn joint_moment(lg: &LabeledGraph, indices: &[i32], max_words: u64) -> Result<DiagonalElement> {
    check_indices(lg, indices)?;
    let n = indices.len();
    let allowed = |j: usize, x: SignedEdge| lg.label(x).0 == indices[n - 1 - j];
    Ok(walk(lg, n, WordSetMode::Reduction, allowed, max_words, false)?.0)
}

/// `T_k` as a formal sum.
pub fn labeling_sum(lg: &LabeledGraph, k: i32) -> Result<FormalSum> {
    lg.check_label(k)?;
    Ok(FormalSum::of_edges(&lg.edges_with_label(k)))
}

/// `T_G` as a formal sum.
pub fn graph_sum(lg: &LabeledGraph) -> FormalSum {
    FormalSum::of_edges(&lg.graph().signed_edges())
}

/// `E(a₁ ⋯ aₙ)` of formal sums.
pub fn expectation_of_product(g: &ShadowedGraph, operands: &[FormalSum]) -> Result<DiagonalElement> {
    let (first, rest) = operands.split_first().ok_or(Error::EmptyOperand)?;
    let mut prod = first.clone();
    for a in rest {
        prod = prod.mul(a, g);
    }
    Ok(prod.expectation())
}

/// `E_π(a₁, …, aₙ)`.
pub fn e_pi_sums(g: &ShadowedGraph, pi: &NoncrossingPartition, operands: &[FormalSum]) -> Result<DiagonalElement> {
    let expect = |s: &FormalSum| -> Result<FormalSum> { Ok(FormalSum::from_diagonal(&s.expectation())) };
    let mul = |a: &FormalSum, b: &FormalSum| -> Result<FormalSum> { Ok(a.mul(b, g)) };
    Ok(e_pi(pi, operands, &expect, &mul)?.expectation())
}

/// Operator-valued free cumulant
/// `k_n(a₁, …, aₙ) = Σ_{π ∈ NC(n)} μ(π, 1ₙ) E_π(a₁, …, aₙ)`.
pub fn cumulant_of(g: &ShadowedGraph, operands: &[FormalSum]) -> Result<DiagonalElement> {
    if operands.is_empty() {
        return Err(Error::EmptyOperand);
    }
    let mut k = DiagonalElement::zero();
    for (pi, mu) in nc_with_moebius(operands.len())?.iter() {
        k = k.add(&e_pi_sums(g, pi, operands)?.scale(mu));
    }
    Ok(k)
}

/// `k_n(T_G, …, T_G)`.
pub fn cumulant_direct(lg: &LabeledGraph, n: usize) -> Result<DiagonalElement> {
    cumulant_of(lg.graph(), &vec![graph_sum(lg); n])
}

/// `k_n(T_{i₁}, …, T_{iₙ})`.
pub fn joint_cumulant(lg: &LabeledGraph, indices: &[i32]) -> Result<DiagonalElement> {
    check_indices(lg, indices)?;
    let ops = indices.iter().map(|&k| labeling_sum(lg, k)).collect::<Result<Vec<_>>>()?;
    cumulant_of(lg.graph(), &ops)
}

/// Partition-dependent cumulant `k_π(a₁, …, aₙ)`: cumulants of the blocks,
/// nested along `π` the same way as `E_π`.
pub fn kappa_pi(g: &ShadowedGraph, pi: &NoncrossingPartition, operands: &[FormalSum]) -> Result<DiagonalElement> {
    let block = |ops: &[FormalSum]| -> Result<FormalSum> { Ok(FormalSum::from_diagonal(&cumulant_of(g, ops)?)) };
    let mul = |a: &FormalSum, b: &FormalSum| -> Result<FormalSum> { Ok(a.mul(b, g)) };
    Ok(nested_eval(pi, operands, &block, &mul)?.expectation())
}

/// `Σ_{π ∈ NC(n)} k_π(T_G, …, T_G)`, which equals `E(T_Gⁿ)`.
pub fn moment_from_cumulants(lg: &LabeledGraph, n: usize) -> Result<DiagonalElement> {
    let ops = vec![graph_sum(lg); n];
    let mut m = DiagonalElement::zero();
    for (pi, _) in nc_with_moebius(n)?.iter() {
        m = m.add(&kappa_pi(lg.graph(), pi, &ops)?);
    }
    Ok(m)
}

/// `μ_w = Σ μ(π, 1ₙ)` over the partitions `π` with
/// `E_π(R_{e₁}, …, R_{eₙ}) = E(R_w) ≠ 0`, where `w = eₙ ⋯ e₁`.
pub fn mu_w(lg: &LabeledGraph, w: &EdgeWord) -> Result<BigInt> {
    let g = lg.graph();
    let target = expectation_of_word(g, w);
    if target.is_zero() {
        return Err(Error::Precondition(format!("word ({}) does not reduce to a vertex", w.render(g).join(","))));
    }
    let ops: Vec<FormalSum> = w.letters().iter().rev().map(|&x| FormalSum::single(GroupoidElement::edge(x))).collect();
    let mut mu = BigInt::zero();
    for (pi, m) in nc_with_moebius(ops.len())?.iter() {
        if e_pi_sums(g, pi, &ops)? == target {
            mu += m;
        }
    }
    Ok(mu)
}

/// Cumulant computed as a weighted word sum, next to the direct value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordCumulantReport {
    pub n: usize,
    /// `Σ μ_w` over vertex-reducing words written in one base edge.
    pub single_edge: DiagonalElement,
    pub single_edge_words: usize,
    /// `Σ μ_w` over all vertex-reducing words.
    pub all_words: DiagonalElement,
    pub all_words_count: usize,
    pub direct: DiagonalElement,
}

impl WordCumulantReport {
    pub fn single_edge_agrees(&self) -> bool {
        self.single_edge == self.direct
    }

    pub fn all_words_agree(&self) -> bool {
        self.all_words == self.direct
    }

    /// `single_edge − direct`.
    pub fn single_edge_diff(&self) -> DiagonalElement {
        self.single_edge.sub(&self.direct)
    }
}

/// Vertex-reducing words of length `n` written in a single base edge and its
/// shadow.
pub fn single_edge_cumulant_words(g: &ShadowedGraph, n: usize) -> Vec<EdgeWord> {
    let mut out = Vec::new();
    if n == 0 || n >= 64 {
        return out;
    }
    for e in g.edge_indices() {
        let pos = SignedEdge::forward(e);
        for mask in 0u64..(1 << n) {
            let w = EdgeWord::new((0..n).map(|j| if mask >> (n - 1 - j) & 1 == 1 { pos.inv() } else { pos }).collect());
            if matches!(reduce(g, &w), GroupoidElement::Vertex(_)) {
                out.push(w);
            }
        }
    }
    out
}

pub fn cumulant_via_wc(lg: &LabeledGraph, n: usize, max_words: u64) -> Result<WordCumulantReport> {
    let g = lg.graph();
    let tally = |words: &[EdgeWord]| -> Result<DiagonalElement> {
        let parts =
            words.par_iter().map(|w| Ok((g.source(w.letters()[0]), mu_w(lg, w)?))).collect::<Result<Vec<_>>>()?;
        Ok(DiagonalElement::from_pairs(parts))
    };
    let single = single_edge_cumulant_words(g, n);
    let all = w_m_set(lg, n, WordSetMode::Reduction, max_words)?.words;
    Ok(WordCumulantReport {
        n,
        single_edge: tally(&single)?,
        single_edge_words: single.len(),
        all_words: tally(&all)?,
        all_words_count: all.len(),
        direct: cumulant_direct(lg, n)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreenessReport {
    pub families: (i32, i32),
    pub max_n: usize,
    /// Mixed index tuples examined.
    pub checked: usize,
    pub nonzero: usize,
    pub max_abs: BigInt,
    /// First tuple with a nonzero mixed cumulant.
    pub witness: Option<(Vec<i32>, DiagonalElement)>,
    /// Every edge of one family is diagram-distinct from every edge of the
    /// other.
    pub diagram_distinct: bool,
}

impl FreenessReport {
    pub fn free_to_order(&self) -> bool {
        self.nonzero == 0
    }
}

/// Mixed joint cumulants of `{T_{k₁}, T_{−k₁}}` and `{T_{k₂}, T_{−k₂}}` up to
/// order `max_n`.
pub fn check_freeness(lg: &LabeledGraph, k1: i32, k2: i32, max_n: usize) -> Result<FreenessReport> {
    if k1 <= 0 || k2 <= 0 || k1 == k2 {
        return Err(Error::Precondition(format!("families must be distinct positive labels, got {k1} and {k2}")));
    }
    lg.check_label(k1)?;
    lg.check_label(k2)?;
    let letters = [k1, -k1, k2, -k2];
    let mut report = FreenessReport {
        families: (k1, k2),
        max_n,
        checked: 0,
        nonzero: 0,
        max_abs: BigInt::zero(),
        witness: None,
        diagram_distinct: families_diagram_distinct(lg, k1, k2)?,
    };
    for n in 2..=max_n {
        let tuples: Vec<Vec<i32>> = (0..4usize.pow(n as u32))
            .map(|mut code| {
                (0..n)
                    .map(|_| {
                        let l = letters[code % 4];
                        code /= 4;
                        l
                    })
                    .collect::<Vec<i32>>()
            })
            .filter(|t| t.iter().any(|l| l.abs() == k1) && t.iter().any(|l| l.abs() == k2))
            .collect();
        let values = tuples.par_iter().map(|t| joint_cumulant(lg, t)).collect::<Result<Vec<_>>>()?;
        for (t, k) in tuples.into_iter().zip(values) {
            report.checked += 1;
            if !k.is_zero() {
                report.nonzero += 1;
                report.max_abs = report.max_abs.clone().max(k.max_abs());
                if report.witness.is_none() {
                    report.witness = Some((t, k));
                }
            }
        }
    }
    Ok(report)
}

fn families_diagram_distinct(lg: &LabeledGraph, k1: i32, k2: i32) -> Result<bool> {
    let fam = |k: i32| -> Vec<GroupoidElement> {
        lg.edges_with_label(k).into_iter().chain(lg.edges_with_label(-k)).map(GroupoidElement::edge).collect()
    };
    let (a, b) = (fam(k1), fam(k2));
    for x in &a {
        for y in &b {
            if !diagram_distinct(x, y)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

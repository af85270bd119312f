//! Noncrossing partitions, their Möbius function, and nested evaluation of
//! partition-dependent functionals.
//!
//! `μ(π, 1_n)` is computed from the factorization of the interval
//! `[π, 1_n]`: through the Kreweras complement `K(π)` it is isomorphic to
//! `Π_{V ∈ K(π)} NC(|V|)`, so `μ(π, 1_n) = Π_V μ(0_{|V|}, 1_{|V|})`. The values
//! `μ(0_k, 1_k)` come from zeta inversion, `Σ_{σ ∈ NC(k)} μ(0_k, σ) = 0`, with
//! the sum over `σ` evaluated by a recursion on the block containing the first
//! element.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`enumerate_nc`]; `|NC(12)| = 208012`.
pub const DEFAULT_NC_LIMIT: usize = 12;

/// A noncrossing partition of `{0..n}` (displayed 1-based). Blocks are sorted
/// by their minimum and each block is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NoncrossingPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl NoncrossingPartition {
    /// Validates and canonicalizes. Elements are 0-based.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::NotNoncrossing("empty block".into()));
            }
            for &x in b {
                if x >= n || seen[x] {
                    return Err(Error::NotNoncrossing(format!("element {} repeated or out of range", x + 1)));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::NotNoncrossing("blocks do not cover 1..n".into()));
        }
        let p = Self::canonical(n, blocks);
        if let Some((a, b)) = p.crossing() {
            return Err(Error::NotNoncrossing(format!("blocks {a} and {b} cross")));
        }
        Ok(p)
    }

    /// Parses 1-based blocks like `[[1, 4], [2, 3], [5]]`.
    pub fn from_one_based(n: usize, blocks: &[&[usize]]) -> Result<Self> {
        let blocks =
            blocks.iter().map(|b| b.iter().map(|&x| x.checked_sub(1).unwrap_or(usize::MAX)).collect()).collect();
        Self::from_blocks(n, blocks)
    }

    fn canonical(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        NoncrossingPartition { n, blocks }
    }

    fn crossing(&self) -> Option<(usize, usize)> {
        let owner = self.block_of();
        // a < b < c < d with a, c in one block and b, d in another
        for (i, blk) in self.blocks.iter().enumerate() {
            for w in blk.windows(2) {
                let (a, c) = (w[0], w[1]);
                let inside: Vec<usize> = (a + 1..c).map(|x| owner[x]).collect();
                for &j in &inside {
                    if j != i && self.blocks[j].iter().any(|&d| d > c || d < a) {
                        return Some((i + 1, j + 1));
                    }
                }
            }
        }
        None
    }

    pub fn zero(n: usize) -> Self {
        NoncrossingPartition { n, blocks: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn one(n: usize) -> Self {
        NoncrossingPartition { n, blocks: if n == 0 { vec![] } else { vec![(0..n).collect()] } }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self) -> Vec<usize> {
        let mut owner = vec![0; self.n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                owner[x] = i;
            }
        }
        owner
    }

    /// Refinement order: every block of `self` lies in a block of `other`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        let owner = other.block_of();
        Ok(self.blocks.iter().all(|b| b.iter().all(|&x| owner[x] == owner[b[0]])))
    }

    /// Kreweras complement, the cycles of `π⁻¹ γ` with `γ = (0 1 … n−1)` and
    /// `π` the permutation sending each element to the next one of its block.
    pub fn kreweras(&self) -> Self {
        let n = self.n;
        let mut prev_in_block = vec![0; n];
        for b in &self.blocks {
            for (i, &x) in b.iter().enumerate() {
                let y = b[(i + 1) % b.len()];
                prev_in_block[y] = x;
            }
        }
        let perm: Vec<usize> = (0..n).map(|i| prev_in_block[(i + 1) % n]).collect();
        let mut seen = vec![false; n];
        let mut blocks = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = perm[x];
            }
            blocks.push(cycle);
        }
        Self::canonical(n, blocks)
    }
}

impl fmt::Display for NoncrossingPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let xs: Vec<String> = b.iter().map(|x| (x + 1).to_string()).collect();
                format!("({})", xs.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Catalan number `c_k = (2k choose k) / (k + 1)`.
pub fn catalan(k: u32) -> BigUint {
    let mut c = BigUint::one();
    // c_{i+1} = c_i · 2(2i+1) / (i+2)
    for i in 0..k {
        c = c * (2 * (2 * i + 1)) / (i + 2);
    }
    c
}

/// All of `NC(n)`, subject to the default size limit.
pub fn enumerate_nc(n: usize) -> Result<Vec<NoncrossingPartition>> {
    enumerate_nc_limited(n, DEFAULT_NC_LIMIT)
}

pub fn enumerate_nc_limited(n: usize, limit: usize) -> Result<Vec<NoncrossingPartition>> {
    if n == 0 || n > limit {
        return Err(Error::BudgetExceeded { what: "noncrossing partition size", limit: limit as u64 });
    }
    let mut memo: HashMap<usize, Vec<Vec<Vec<usize>>>> = HashMap::new();
    Ok(nc_of_len(n, &mut memo).into_iter().map(|blocks| NoncrossingPartition::canonical(n, blocks)).collect())
}

// Noncrossing partitions of {0..len}: choose the block holding 0, then fill
// each gap independently.
fn nc_of_len(len: usize, memo: &mut HashMap<usize, Vec<Vec<Vec<usize>>>>) -> Vec<Vec<Vec<usize>>> {
    if len == 0 {
        return vec![vec![]];
    }
    if let Some(v) = memo.get(&len) {
        return v.clone();
    }
    let mut out = Vec::new();
    // subsets of 1..len join 0's block; enumerate in increasing bitmask order
    for mask in 0u32..(1 << (len - 1)) {
        let mut block = vec![0];
        block.extend((1..len).filter(|i| mask & (1 << (i - 1)) != 0));
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block.clone()]];
        let mut bounds: Vec<usize> = block.clone();
        bounds.push(len);
        for w in bounds.windows(2) {
            let (lo, hi) = (w[0] + 1, w[1]);
            if hi <= lo {
                continue;
            }
            let gap = nc_of_len(hi - lo, memo);
            let mut next = Vec::with_capacity(partial.len() * gap.len());
            for p in &partial {
                for q in &gap {
                    let mut r = p.clone();
                    r.extend(q.iter().map(|b| b.iter().map(|x| x + lo).collect::<Vec<_>>()));
                    next.push(r);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    memo.insert(len, out.clone());
    out
}

/// `μ(0_k, 1_k)` for `k = 0..=n` (index 0 unused, set to 1).
pub fn moebius_bottom_top(n: usize) -> Vec<BigInt> {
    let mut m: Vec<BigInt> = vec![BigInt::one(); n + 1];
    for k in 2..=n {
        // with m[k] = 0 the weighted sum over NC(k) leaves out σ = 1_k
        m[k] = BigInt::zero();
        m[k] = -weighted_nc_sums(k, &m)[k].clone();
    }
    m
}

// f[L] = Σ_{σ ∈ NC(L)} Π_{B ∈ σ} weight[|B|], for L = 0..=max.
fn weighted_nc_sums(max: usize, weight: &[BigInt]) -> Vec<BigInt> {
    let mut f: Vec<BigInt> = vec![BigInt::zero(); max + 1];
    f[0] = BigInt::one();
    for len in 1..=max {
        // block containing the first element has size s; the remaining len - s
        // elements split into s gaps (after each block element)
        let mut total = BigInt::zero();
        for (s, w) in weight.iter().enumerate().take(len + 1).skip(1) {
            total += w * gap_products(s, len - s, &f);
        }
        f[len] = total;
    }
    f
}

// Σ over (g_1..g_s) with Σ g_i = r of Π f[g_i].
fn gap_products(s: usize, r: usize, f: &[BigInt]) -> BigInt {
    let mut dp: Vec<BigInt> = vec![BigInt::zero(); r + 1];
    dp[0] = BigInt::one();
    for _ in 0..s {
        let mut next = vec![BigInt::zero(); r + 1];
        for (used, val) in dp.iter().enumerate() {
            if val.is_zero() {
                continue;
            }
            for g in 0..=(r - used) {
                next[used + g] += val * &f[g];
            }
        }
        dp = next;
    }
    dp[r].clone()
}

/// `μ(π, 1_n)`.
pub fn moebius(pi: &NoncrossingPartition) -> BigInt {
    let m = moebius_bottom_top(pi.size());
    moebius_with_table(pi, &m)
}

fn moebius_with_table(pi: &NoncrossingPartition, m: &[BigInt]) -> BigInt {
    pi.kreweras().blocks().iter().map(|b| m[b.len()].clone()).product()
}

pub type MoebiusRow = Arc<Vec<(NoncrossingPartition, BigInt)>>;

/// `NC(n)` paired with `μ(π, 1_n)`, cached per `n` behind a lock.
pub fn nc_with_moebius(n: usize) -> Result<MoebiusRow> {
    static CACHE: OnceLock<Mutex<HashMap<usize, MoebiusRow>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&n) {
        return Ok(v.clone());
    }
    let m = moebius_bottom_top(n);
    let row: Vec<(NoncrossingPartition, BigInt)> = enumerate_nc(n)?
        .into_iter()
        .map(|p| {
            let mu = moebius_with_table(&p, &m);
            (p, mu)
        })
        .collect();
    let row = Arc::new(row);
    cache.lock().unwrap().insert(n, row.clone());
    Ok(row)
}

/// Nested evaluation of a multiplicative functional along `π`.
///
/// Blocks are evaluated innermost first. For a block `b₁ < … < b_k`, the value
/// of everything nested strictly between `bᵢ` and `bᵢ₊₁` is multiplied onto
/// `a_{bᵢ}` from the right, and `block_fn` receives the resulting `k`
/// operands. The values of the outermost blocks are multiplied left to right.
pub fn nested_eval<T, E, B, M>(
    pi: &NoncrossingPartition,
    operands: &[T],
    block_fn: &B,
    mul: &M,
) -> std::result::Result<T, E>
where
    T: Clone,
    E: From<Error>,
    B: Fn(&[T]) -> std::result::Result<T, E>,
    M: Fn(&T, &T) -> std::result::Result<T, E>,
{
    if operands.len() != pi.size() || pi.size() == 0 {
        return Err(Error::SizeMismatch(operands.len(), pi.size()).into());
    }
    let owner = pi.block_of();
    let value = eval_range(pi, &owner, operands, 0, pi.size(), block_fn, mul)?;
    Ok(value.expect("nonempty range has a value"))
}

fn eval_range<T, E, B, M>(
    pi: &NoncrossingPartition,
    owner: &[usize],
    operands: &[T],
    lo: usize,
    hi: usize,
    block_fn: &B,
    mul: &M,
) -> std::result::Result<Option<T>, E>
where
    T: Clone,
    B: Fn(&[T]) -> std::result::Result<T, E>,
    M: Fn(&T, &T) -> std::result::Result<T, E>,
{
    let mut acc: Option<T> = None;
    let mut i = lo;
    while i < hi {
        let block = &pi.blocks()[owner[i]];
        let mut ops = Vec::with_capacity(block.len());
        for w in block.windows(2) {
            let inner = eval_range(pi, owner, operands, w[0] + 1, w[1], block_fn, mul)?;
            ops.push(match inner {
                Some(d) => mul(&operands[w[0]], &d)?,
                None => operands[w[0]].clone(),
            });
        }
        let last = *block.last().unwrap();
        ops.push(operands[last].clone());
        let value = block_fn(&ops)?;
        acc = Some(match acc {
            Some(a) => mul(&a, &value)?,
            None => value,
        });
        i = last + 1;
    }
    Ok(acc)
}

/// `E_π(a₁, …, aₙ)`: nested expectations along `π`.
pub fn e_pi<T, E, X, M>(pi: &NoncrossingPartition, operands: &[T], expect: &X, mul: &M) -> std::result::Result<T, E>
where
    T: Clone,
    E: From<Error>,
    X: Fn(&T) -> std::result::Result<T, E>,
    M: Fn(&T, &T) -> std::result::Result<T, E>,
{
    let block_fn = |ops: &[T]| -> std::result::Result<T, E> {
        let mut prod = ops[0].clone();
        for x in &ops[1..] {
            prod = mul(&prod, x)?;
        }
        expect(&prod)
    };
    nested_eval(pi, operands, &block_fn, mul)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Möbius values by plain zeta inversion over the whole lattice.
    fn naive_moebius_row(n: usize) -> Vec<(NoncrossingPartition, BigInt)> {
        let all = enumerate_nc(n).unwrap();
        let top = NoncrossingPartition::one(n);
        let mut order: Vec<usize> = (0..all.len()).collect();
        // coarser partitions first
        order.sort_by_key(|&i| all[i].num_blocks());
        let mut mu: Vec<Option<BigInt>> = vec![None; all.len()];
        for &i in &order {
            if all[i] == top {
                mu[i] = Some(BigInt::one());
                continue;
            }
            let mut s = BigInt::zero();
            for j in 0..all.len() {
                if j != i && all[i].leq(&all[j]).unwrap() {
                    s += mu[j].as_ref().expect("coarser computed first");
                }
            }
            mu[i] = Some(-s);
        }
        all.into_iter().zip(mu.into_iter().map(Option::unwrap)).collect()
    }

    fn all_set_partitions(n: usize) -> Vec<Vec<usize>> {
        // restricted growth strings
        let mut out = Vec::new();
        let mut rgs = vec![0usize; n];
        loop {
            out.push(rgs.clone());
            let mut i = n;
            loop {
                if i <= 1 {
                    return out;
                }
                i -= 1;
                let max_prev = rgs[..i].iter().copied().max().unwrap();
                if rgs[i] <= max_prev {
                    rgs[i] += 1;
                    for r in rgs.iter_mut().skip(i + 1) {
                        *r = 0;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn counts_and_catalan() {
        assert_eq!(enumerate_nc(1).unwrap().len(), 1);
        assert_eq!(enumerate_nc(3).unwrap().len(), 5);
        assert_eq!(enumerate_nc(4).unwrap().len(), 14);
        assert_eq!(catalan(0), BigUint::one());
        assert_eq!(catalan(3), BigUint::from(5u32));
        assert_eq!(catalan(5), BigUint::from(42u32));
        assert!(enumerate_nc(13).is_err());
        assert!(enumerate_nc(0).is_err());
    }

    #[test]
    fn crossing_filter_agrees() {
        for n in 1..=6 {
            let filtered = all_set_partitions(n)
                .into_iter()
                .filter(|rgs| {
                    let k = rgs.iter().max().unwrap() + 1;
                    let blocks: Vec<Vec<usize>> = (0..k).map(|b| (0..n).filter(|&i| rgs[i] == b).collect()).collect();
                    NoncrossingPartition::from_blocks(n, blocks).is_ok()
                })
                .count();
            assert_eq!(filtered, enumerate_nc(n).unwrap().len());
        }
    }

    #[test]
    fn enumeration_is_distinct_and_noncrossing() {
        let all = enumerate_nc(6).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        for p in &all {
            assert!(NoncrossingPartition::from_blocks(6, p.blocks().to_vec()).is_ok());
        }
    }

    #[test]
    fn rejects_crossing() {
        assert!(NoncrossingPartition::from_one_based(4, &[&[1, 3], &[2, 4]]).is_err());
        assert!(NoncrossingPartition::from_one_based(4, &[&[1, 3], &[2]]).is_err());
    }

    #[test]
    fn order() {
        let z = NoncrossingPartition::zero(4);
        for p in enumerate_nc(4).unwrap() {
            assert!(z.leq(&p).unwrap());
            assert!(p.leq(&NoncrossingPartition::one(4)).unwrap());
        }
        let a = NoncrossingPartition::from_one_based(4, &[&[1, 2], &[3, 4]]).unwrap();
        assert!(a.leq(&NoncrossingPartition::one(4)).unwrap());
        let b = NoncrossingPartition::from_one_based(4, &[&[1, 3], &[2], &[4]]).unwrap();
        assert!(!b.leq(&a).unwrap());
        assert_eq!(a.leq(&NoncrossingPartition::one(3)), Err(Error::SizeMismatch(4, 3)));
    }

    #[test]
    fn moebius_matches_naive_inversion() {
        for n in 1..=6 {
            let fast = nc_with_moebius(n).unwrap();
            let naive = naive_moebius_row(n);
            assert_eq!(fast.len(), naive.len());
            let lookup: HashMap<_, _> = naive.into_iter().collect();
            for (p, mu) in fast.iter() {
                assert_eq!(&lookup[p], mu, "n={n} pi={p}");
            }
        }
    }

    #[test]
    fn moebius_identities() {
        assert_eq!(moebius(&NoncrossingPartition::zero(4)), BigInt::from(-5));
        assert_eq!(moebius(&NoncrossingPartition::one(4)), BigInt::one());
        let s: BigInt = nc_with_moebius(4).unwrap().iter().map(|(_, m)| m.clone()).sum();
        assert!(s.is_zero());
    }

    #[test]
    fn kreweras_extremes() {
        assert_eq!(NoncrossingPartition::zero(5).kreweras(), NoncrossingPartition::one(5));
        assert_eq!(NoncrossingPartition::one(5).kreweras(), NoncrossingPartition::zero(5));
        for p in enumerate_nc(6).unwrap() {
            // |π| + |K(π)| = n + 1
            assert_eq!(p.num_blocks() + p.kreweras().num_blocks(), 7);
        }
    }

    type Sym = std::result::Result<String, Error>;

    fn sym_mul(a: &String, b: &String) -> Sym {
        Ok(format!("{a} {b}"))
    }

    fn sym_e(a: &String) -> Sym {
        Ok(format!("E({a})"))
    }

    #[test]
    fn e_pi_symbolic_nesting() {
        let ops: Vec<String> = (1..=5).map(|i| format!("a{i}")).collect();
        let pi = NoncrossingPartition::from_one_based(5, &[&[1, 4], &[2, 3], &[5]]).unwrap();
        assert_eq!(e_pi(&pi, &ops, &sym_e, &sym_mul).unwrap(), "E(a1 E(a2 a3) a4) E(a5)");
        let one = NoncrossingPartition::one(5);
        assert_eq!(e_pi(&one, &ops, &sym_e, &sym_mul).unwrap(), "E(a1 a2 a3 a4 a5)");
        let zero = NoncrossingPartition::zero(3);
        assert_eq!(e_pi(&zero, &ops[..3], &sym_e, &sym_mul).unwrap(), "E(a1) E(a2) E(a3)");
        assert!(e_pi(&zero, &ops, &sym_e, &sym_mul).is_err());
    }

    #[test]
    fn e_pi_commutative_reduces_to_block_moments() {
        // functions on a three-point space; E sums over the points
        type F = Vec<i64>;
        let mul = |x: &F, y: &F| -> std::result::Result<F, Error> { Ok(x.iter().zip(y).map(|(a, b)| a * b).collect()) };
        let e = |x: &F| -> std::result::Result<F, Error> { Ok(vec![x.iter().sum(); 3]) };
        let ops: Vec<F> =
            vec![vec![1, 2, 3], vec![-1, 0, 2], vec![4, 1, 1], vec![2, 2, -3], vec![0, 5, 1], vec![1, -1, 1]];
        for p in enumerate_nc(6).unwrap() {
            let nested = e_pi(&p, &ops, &e, &mul).unwrap();
            let expected: i64 = p
                .blocks()
                .iter()
                .map(|b| {
                    let prod = b.iter().fold(vec![1; 3], |acc, &i| mul(&acc, &ops[i]).unwrap());
                    prod.iter().sum::<i64>()
                })
                .product();
            assert_eq!(nested, vec![expected; 3], "pi={p}");
        }
    }
}

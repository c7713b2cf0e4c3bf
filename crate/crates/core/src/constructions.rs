//! Explicit block-family constructions. Every output is meant to pass the
//! matching verifier in [`crate::setsys`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::setsys::{all_subsets, count_u128, Block, Kind, SetSystem, DEFAULT_BUDGET};
use crate::{Error, Result};

/// `{1..n}` split into `l` bins of consecutive elements, larger bins first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionScheme {
    pub n: usize,
    pub l: usize,
    pub bins: Vec<Block>,
    /// `bin_of[x]` is the bin index of element `x` (index 0 unused).
    pub bin_of: Vec<usize>,
}

/// Weight, empty-bin count and full-bin count of one subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinStats {
    pub w: usize,
    pub e: usize,
    pub f: usize,
}

pub fn partition_bins(n: usize, l: usize) -> Result<PartitionScheme> {
    if l == 0 || l > n {
        return Err(Error::params(format!("bin count must satisfy 1 <= l <= n, got n={n} l={l}")));
    }
    let (q, r) = (n / l, n % l);
    let mut bins = Vec::with_capacity(l);
    let mut bin_of = vec![0; n + 1];
    let mut next = 1;
    for i in 0..l {
        let size = q + usize::from(i < r);
        let mut b = Block::empty();
        for x in next..next + size {
            b.insert(x);
            bin_of[x] = i;
        }
        next += size;
        bins.push(b);
    }
    Ok(PartitionScheme { n, l, bins, bin_of })
}

impl PartitionScheme {
    pub fn weight(&self, x: &Block) -> usize {
        x.iter().map(|e| self.bin_of[e]).sum()
    }

    pub fn stats(&self, x: &Block) -> BinStats {
        let mut e = 0;
        let mut f = 0;
        for bin in &self.bins {
            let k = bin.intersection_len(x);
            if k == 0 {
                e += 1;
            }
            if k == bin.len() {
                f += 1;
            }
        }
        BinStats {
            w: self.weight(x),
            e,
            f,
        }
    }

    fn bin_size(&self, i: usize) -> usize {
        self.bins[i].len()
    }

    /// The `m` smallest elements of bin `i`.
    fn smallest_of(&self, i: usize, m: usize) -> impl Iterator<Item = usize> + '_ {
        self.bins[i].iter().take(m)
    }
}

fn guard_enumeration(n: usize, t: usize) -> Result<()> {
    let needed = count_u128(n, t);
    if needed > DEFAULT_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "t-subsets to enumerate",
            needed,
            budget: DEFAULT_BUDGET,
        });
    }
    Ok(())
}

/// `X` misses some bin `N_m` while not containing all of `N_{m-1}`
/// (indices mod `l`).
fn in_z(p: &PartitionScheme, x: &Block) -> bool {
    (0..p.l).any(|m| {
        let prev = (m + p.l - 1) % p.l;
        p.bins[m].intersection_len(x) == 0 && !p.bins[prev].is_subset(x)
    })
}

/// `B_j = Z ∪ {X : w(X) ≡ j mod l}` over the t-subsets of `{1..n}`.
pub fn construct_weighted_partition(n: usize, t: usize, l: usize, j: usize) -> Result<SetSystem> {
    if t == 0 || t + 2 >= n {
        return Err(Error::params(format!("need 0 < t < n-2, got n={n} t={t}")));
    }
    if l * (n - t - 2) < n || l > n {
        return Err(Error::params(format!(
            "need n/(n-t-2) <= l <= n, got n={n} t={t} l={l}"
        )));
    }
    if j >= l {
        return Err(Error::params(format!("need 0 <= j < l, got j={j} l={l}")));
    }
    guard_enumeration(n, t)?;
    let p = partition_bins(n, l)?;
    let blocks = all_subsets(n, t)
        .filter(|x| p.weight(x) % l == j || in_z(&p, x))
        .collect();
    SetSystem::new(n, t, Kind::Se, blocks)
}

/// Index sets `I` with `Σ_{m∈I} |N_m| > t` that fall to `<= t` once some
/// bin is removed, each listed in increasing order. With equal bins these
/// are exactly the minimal ones.
pub fn patch_index_sets(p: &PartitionScheme, t: usize) -> Vec<Vec<usize>> {
    // `sum − largest` never decreases as bins are added, so it prunes
    fn walk(p: &PartitionScheme, t: usize, start: usize, cur: &mut Vec<usize>, sum: usize, largest: usize, out: &mut Vec<Vec<usize>>) {
        for m in start..p.l {
            let (s, big) = (sum + p.bin_size(m), largest.max(p.bin_size(m)));
            if s - big > t {
                continue;
            }
            cur.push(m);
            if s > t {
                out.push(cur.clone());
            }
            walk(p, t, m + 1, cur, s, big, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    walk(p, t, 0, &mut Vec::new(), 0, 0, &mut out);
    out
}

/// The patch family `F` for the bin-parity construction: for each index
/// set `I` and ordered pair `i != j` in `I` with `Σ_{I∖{j}} <= t`, all of
/// the other bins, `N_i` minus its largest element and the smallest
/// `t+1−Σ_{I∖{j}}` elements of `N_j`.
pub fn bin_parity_patch(p: &PartitionScheme, t: usize) -> Vec<Block> {
    let mut out = Vec::new();
    for set in patch_index_sets(p, t) {
        let total: usize = set.iter().map(|&m| p.bin_size(m)).sum();
        for &j in &set {
            if total - p.bin_size(j) > t {
                continue;
            }
            for &i in &set {
                if i == j {
                    continue;
                }
                let mut b = Block::empty();
                for &m in &set {
                    if m != i && m != j {
                        for x in p.bins[m].iter() {
                            b.insert(x);
                        }
                    }
                }
                for x in p.smallest_of(i, p.bin_size(i) - 1) {
                    b.insert(x);
                }
                let from_j = t + 1 - (total - p.bin_size(j));
                for x in p.smallest_of(j, from_j) {
                    b.insert(x);
                }
                debug_assert_eq!(b.len(), t);
                out.push(b);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// `B_j = F ∪ {X : (w(X)+j) mod l <= max(e(X), f(X))}`.
pub fn construct_bin_parity(n: usize, t: usize, l: usize, j: usize) -> Result<SetSystem> {
    if t == 0 || t >= n {
        return Err(Error::params(format!("need 0 < t < n, got n={n} t={t}")));
    }
    if j >= l {
        return Err(Error::params(format!("need 0 <= j < l, got j={j} l={l}")));
    }
    guard_enumeration(n, t)?;
    let p = partition_bins(n, l)?;
    let mut blocks: Vec<Block> = all_subsets(n, t)
        .filter(|x| {
            let s = p.stats(x);
            (s.w + j) % l <= s.e.max(s.f)
        })
        .collect();
    blocks.extend(bin_parity_patch(&p, t));
    SetSystem::from_blocks_dedup(n, t, Kind::Se, blocks)
}

/// `k`-subsets of `{1..n}` whose element sum is `≡ residue (mod n)`.
fn residue_class(n: usize, k: usize, residue: usize) -> Vec<Block> {
    all_subsets(n, k)
        .filter(|y| y.iter().sum::<usize>() % n == residue)
        .collect()
}

/// `(k-1)`-subsets lying in no block of `q`.
fn uncovered_faces(n: usize, k: usize, q: &[Block]) -> Vec<Block> {
    let mut covered = std::collections::HashSet::new();
    for y in q {
        for x in y.iter() {
            covered.insert(y.without(x));
        }
    }
    all_subsets(n, k - 1).filter(|x| !covered.contains(x)).collect()
}

/// Covering design `C(n,k,k-1)` from the best residue class of element
/// sums, completed by one block per uncovered `(k-1)`-subset.
pub fn construct_kuzjurin(n: usize, k: usize) -> Result<SetSystem> {
    if k == 0 || k > n {
        return Err(Error::params(format!("need 1 <= k <= n, got n={n} k={k}")));
    }
    guard_enumeration(n, k)?;
    let mut counts = vec![0usize; n];
    for y in all_subsets(n, k) {
        counts[y.iter().sum::<usize>() % n] += 1;
    }
    // |Q_i| + |C_i| = C(n,k-1) - (k-1)|Q_i|, so the largest class wins.
    let best = (0..n).max_by_key(|&i| (counts[i], std::cmp::Reverse(i))).unwrap_or(0);
    let mut blocks = residue_class(n, k, best);
    for x in uncovered_faces(n, k, &blocks) {
        let extra = (1..=n).find(|e| !x.contains(*e)).expect("k <= n leaves a free element");
        blocks.push(x.with(extra));
    }
    SetSystem::from_blocks_dedup(n, k, Kind::Covering { covered: k - 1 }, blocks)
}

/// SE system built by peeling off element `n` repeatedly: an `(n-1,t-1)`
/// system lifted by `n`, plus a Turán `(n-1,t+1,t)` system obtained by
/// complementing a covering design.
pub fn construct_recurrent_se(n: usize, t: usize) -> Result<SetSystem> {
    if t == 0 || t + 1 >= n {
        return Err(Error::params(format!("need 0 < t < n-1, got n={n} t={t}")));
    }
    recurrent_level(n, t)
}

fn recurrent_level(n: usize, t: usize) -> Result<SetSystem> {
    if t == 0 {
        return SetSystem::new(n, 0, Kind::Se, vec![Block::empty()]);
    }
    let k = n - 1 - t;
    let inner = recurrent_level(n - 1, t - 1)?;
    let covering = construct_kuzjurin(n - 1, k)?;
    let mut blocks: Vec<Block> = inner.blocks().iter().map(|b| b.with(n)).collect();
    blocks.extend(covering.blocks().iter().map(|b| b.complement(n - 1)));
    SetSystem::new(n, t, Kind::Se, blocks)
}

/// The lexicographically first `t`-subset of `{1..n}` covering `x`.
pub fn first_covering_block(n: usize, t: usize, x: &Block) -> Option<Block> {
    let i = x.len();
    if i == 0 || i > t + 1 || t >= n {
        return None;
    }
    let free: Vec<usize> = (1..=n).filter(|e| !x.contains(*e)).take(t + 1 - i).collect();
    if free.len() < t + 1 - i {
        return None;
    }
    x.iter()
        .map(|drop| {
            let mut b = x.without(drop);
            for &e in &free {
                b.insert(e);
            }
            b
        })
        .min()
}

/// Includes each `t`-subset with probability `p`, then patches every
/// uncovered `i`-subset (`i = 1..=t+1`, lexicographic) with its first
/// covering block.
pub fn construct_random_greedy(n: usize, t: usize, p: f64, seed: u64) -> Result<SetSystem> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::params(format!("need 0 <= p <= 1, got {p}")));
    }
    if t >= n {
        return Err(Error::params(format!("need t < n, got n={n} t={t}")));
    }
    let targets: u128 = (1..=t + 1).map(|i| count_u128(n, i)).sum();
    guard_enumeration(n, t)?;
    if targets > DEFAULT_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "target subsets",
            needed: targets,
            budget: DEFAULT_BUDGET,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: std::collections::BTreeSet<Block> =
        all_subsets(n, t).filter(|_| rng.gen::<f64>() < p).collect();
    for i in 1..=t + 1 {
        for x in all_subsets(n, i) {
            let covered = chosen.iter().any(|a| crate::setsys::covers(a, &x));
            if !covered {
                chosen.insert(first_covering_block(n, t, &x).expect("t < n"));
            }
        }
    }
    SetSystem::new(n, t, Kind::Se, chosen.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setsys::{is_covering_design, is_se_system, is_turan_system};

    fn members(p: &PartitionScheme) -> Vec<Vec<usize>> {
        p.bins.iter().map(|b| b.members()).collect()
    }

    #[test]
    fn bins_examples() {
        assert_eq!(members(&partition_bins(6, 3).unwrap()), vec![vec![1, 2], vec![3, 4], vec![5, 6]]);
        assert_eq!(members(&partition_bins(7, 3).unwrap()), vec![vec![1, 2, 3], vec![4, 5], vec![6, 7]]);
        assert_eq!(partition_bins(5, 5).unwrap().bins.iter().filter(|b| b.len() == 1).count(), 5);
        assert!(partition_bins(5, 0).is_err());
        assert!(partition_bins(5, 6).is_err());
    }

    #[test]
    fn stats_examples() {
        let p = partition_bins(6, 3).unwrap();
        let x = Block::from_members([1, 2, 5]).unwrap();
        assert_eq!(p.stats(&x), BinStats { w: 2, e: 1, f: 1 });
    }

    #[test]
    fn weighted_partition_small() {
        let mut best = usize::MAX;
        for j in 0..3 {
            let s = construct_weighted_partition(6, 2, 3, j).unwrap();
            assert!(is_se_system(&s).unwrap().is_valid());
            best = best.min(s.len());
        }
        assert!(best <= 20);
        let s = construct_weighted_partition(8, 3, 4, 0).unwrap();
        assert!(is_se_system(&s).unwrap().is_valid());
        assert!(is_turan_system(&s, 4).unwrap().is_valid());
        assert!(construct_weighted_partition(6, 2, 1, 0).is_err());
        assert!(construct_weighted_partition(6, 4, 6, 0).is_err());
    }

    #[test]
    fn bin_parity_small() {
        for j in 0..3 {
            let s = construct_bin_parity(6, 2, 3, j).unwrap();
            assert!(is_se_system(&s).unwrap().is_valid(), "j={j}");
        }
        let s = construct_bin_parity(7, 3, 2, 0).unwrap();
        assert!(is_se_system(&s).unwrap().is_valid());
        let p = partition_bins(7, 2).unwrap();
        // g(7,3,2) = C(2,2)·2 = 2
        assert!(bin_parity_patch(&p, 3).len() <= 2);
        // unequal bins: {4,5} is a full bin and needs the patch block {1,4}
        let s = construct_bin_parity(5, 2, 2, 0).unwrap();
        assert!(is_se_system(&s).unwrap().is_valid());
        assert!(s.blocks().contains(&Block::from_members([1, 4]).unwrap()));
        let one = construct_bin_parity(6, 3, 1, 0).unwrap();
        assert_eq!(one.len(), 20);
    }

    #[test]
    fn patch_sets_brute_force() {
        for (n, l, t) in [(7, 2, 3), (9, 4, 4), (10, 5, 6), (8, 8, 3), (5, 2, 2), (10, 4, 5)] {
            let p = partition_bins(n, l).unwrap();
            let mut brute = Vec::new();
            for mask in 1u32..(1 << l) {
                let set: Vec<usize> = (0..l).filter(|i| mask >> i & 1 == 1).collect();
                let sum: usize = set.iter().map(|&i| p.bins[i].len()).sum();
                let minimal = set.iter().all(|&i| sum - p.bins[i].len() <= t);
                let droppable = set.iter().any(|&i| sum - p.bins[i].len() <= t);
                if n % l == 0 {
                    assert_eq!(minimal, droppable);
                }
                if sum > t && droppable {
                    brute.push(set);
                }
            }
            let mut got = patch_index_sets(&p, t);
            got.sort();
            brute.sort();
            assert_eq!(got, brute, "n={n} l={l} t={t}");
        }
    }

    #[test]
    fn kuzjurin_examples() {
        let s = construct_kuzjurin(6, 3).unwrap();
        assert!(is_covering_design(&s, 2).unwrap().is_valid());
        assert!(s.len() <= 8);
        let s = construct_kuzjurin(7, 2).unwrap();
        assert!(is_covering_design(&s, 1).unwrap().is_valid());
        assert!(s.len() <= 4);
        let s = construct_kuzjurin(5, 1).unwrap();
        assert!(is_covering_design(&s, 0).unwrap().is_valid());
        assert!(s.len() <= 5);
    }

    #[test]
    fn recurrent_examples() {
        let s = construct_recurrent_se(6, 4).unwrap();
        assert_eq!(s.len(), 5);
        assert!(is_se_system(&s).unwrap().is_valid());
        let s = construct_recurrent_se(8, 5).unwrap();
        assert!(is_se_system(&s).unwrap().is_valid());
        assert!(s.len() <= 15);
    }

    #[test]
    fn first_covering_block_matches_scan() {
        for n in 3..=7 {
            for t in 1..n {
                for i in 1..=t + 1 {
                    for x in all_subsets(n, i) {
                        let scan = all_subsets(n, t).find(|a| crate::setsys::covers(a, &x));
                        assert_eq!(first_covering_block(n, t, &x), scan, "n={n} t={t} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn random_greedy_extremes() {
        let full = construct_random_greedy(6, 3, 1.0, 7).unwrap();
        assert_eq!(full.len(), 20);
        let none = construct_random_greedy(4, 2, 0.0, 7).unwrap();
        assert!(is_se_system(&none).unwrap().is_valid());
        assert!(none.len() <= 14);
        let a = construct_random_greedy(8, 3, 0.3, 42).unwrap();
        let b = construct_random_greedy(8, 3, 0.3, 42).unwrap();
        assert_eq!(a, b);
        assert!(is_se_system(&a).unwrap().is_valid());
    }
}

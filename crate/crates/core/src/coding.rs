//! Reed–Solomon codes over prime fields: parity-check matrices built from SE
//! systems, stopping sets, the peeling erasure decoder, replacement of
//! non-minimum-weight rows, and exact stopping redundancy on tiny codes.
//!
//! Column `j` (1-based, as in [`Block`]) is evaluated at `α_j = j − 1`.

use std::fmt::Write as _;
use std::path::Path;

use crate::exact::{CoverInstance, SolveOptions};
use crate::setsys::{all_subsets, is_se_system, Block, SetSystem};
use crate::{Error, Result};

/// Largest modulus accepted; keeps every product inside `u128` trivially
/// and every element inside `u32`.
pub const MAX_Q: u64 = u32::MAX as u64;

/// Exhaustive stopping-set search refuses more columns than this.
pub const MAX_STOPPING_N: usize = 24;

/// Integers modulo a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

/// Smallest prime `>= n` (and `>= 2`).
pub fn smallest_prime_at_least(n: u64) -> u64 {
    (n.max(2)..).find(|&q| is_prime(q)).expect("primes are unbounded")
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_Q || !is_prime(q) {
            return Err(Error::params(format!("field size {q} is not a prime below 2^32")));
        }
        Ok(PrimeField { q })
    }

    pub fn q(self) -> u64 {
        self.q
    }

    pub fn reduce(self, a: i64) -> u64 {
        a.rem_euclid(self.q as i64) as u64
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.q - b) % self.q
    }

    pub fn neg(self, a: u64) -> u64 {
        (self.q - a) % self.q
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse by Fermat; `None` for zero.
    pub fn inv(self, a: u64) -> Option<u64> {
        (a % self.q != 0).then(|| self.pow(a, self.q - 2))
    }
}

/// An `[n, k = n−d+1, d]` Reed–Solomon code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub field: PrimeField,
    pub alphas: Vec<u64>,
    /// `v_j = Π_{i≠j} (α_j − α_i)^{-1}`, the dual's column multipliers.
    multipliers: Vec<u64>,
}

impl CodeSpec {
    pub fn new(n: usize, d: usize, q: u64) -> Result<Self> {
        if d < 2 || d > n {
            return Err(Error::params(format!("need 2 <= d <= n, got n={n} d={d}")));
        }
        let field = PrimeField::new(q)?;
        if q < n as u64 {
            return Err(Error::params(format!("need q >= n for distinct evaluation points, got q={q} n={n}")));
        }
        let alphas: Vec<u64> = (0..n as u64).collect();
        let multipliers = (0..n)
            .map(|j| {
                let prod = (0..n)
                    .filter(|&i| i != j)
                    .fold(1, |acc, i| field.mul(acc, field.sub(alphas[j], alphas[i])));
                field.inv(prod).expect("distinct points")
            })
            .collect();
        Ok(CodeSpec {
            n,
            k: n - d + 1,
            d,
            field,
            alphas,
            multipliers,
        })
    }

    /// Over the smallest prime `>= n`.
    pub fn with_smallest_prime(n: usize, d: usize) -> Result<Self> {
        Self::new(n, d, smallest_prime_at_least(n as u64))
    }

    pub fn dual_distance(&self) -> usize {
        self.n - self.d + 2
    }

    /// Rows `(α_1^i, …, α_n^i)` for `0 <= i < k`.
    pub fn generator(&self) -> Vec<Vec<u64>> {
        (0..self.k as u64)
            .map(|i| self.alphas.iter().map(|&a| self.field.pow(a, i)).collect())
            .collect()
    }

    /// Dual codeword `(v_j·f(α_j))_j` of a polynomial `f` of degree `< n−k`
    /// given by its coefficients, lowest first.
    pub fn dual_codeword(&self, coeffs: &[u64]) -> Vec<u64> {
        let f = self.field;
        (0..self.n)
            .map(|j| {
                let val = coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, self.alphas[j]), c));
                f.mul(self.multipliers[j], val)
            })
            .collect()
    }

    /// Whether `word` is orthogonal to every generator row.
    pub fn in_dual(&self, word: &[u64]) -> bool {
        let f = self.field;
        self.generator()
            .iter()
            .all(|g| g.iter().zip(word).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))) == 0)
    }
}

/// The dual codeword vanishing exactly on the `d−2` positions of `b`:
/// `c_j = v_j · Π_{β∈b} (α_j − α_β)`.
pub fn dual_vanishing_codeword(spec: &CodeSpec, b: &Block) -> Result<Vec<u64>> {
    if b.len() + 2 != spec.d {
        return Err(Error::params(format!("zero set must have d-2 = {} positions, got {}", spec.d - 2, b.len())));
    }
    if b.max_member().is_some_and(|m| m > spec.n) {
        return Err(Error::params(format!("zero set {b} exceeds n = {}", spec.n)));
    }
    let f = spec.field;
    Ok((0..spec.n)
        .map(|j| {
            let g = b
                .iter()
                .fold(1, |acc, beta| f.mul(acc, f.sub(spec.alphas[j], spec.alphas[beta - 1])));
            f.mul(spec.multipliers[j], g)
        })
        .collect())
}

/// An `l × n` matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    pub field: PrimeField,
    pub n: usize,
    rows: Vec<Vec<u64>>,
}

impl ParityCheckMatrix {
    pub fn new(field: PrimeField, n: usize, rows: Vec<Vec<u64>>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::params(format!("row {} has {} entries, expected {n}", i + 1, r.len())));
            }
            if let Some(&bad) = r.iter().find(|&&x| x >= field.q()) {
                return Err(Error::params(format!("row {} has entry {bad} outside [0, {})", i + 1, field.q())));
            }
        }
        Ok(ParityCheckMatrix { field, n, rows })
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn support(&self, row: usize) -> Block {
        support_of(&self.rows[row])
    }

    pub fn supports(&self) -> Vec<Block> {
        (0..self.rows.len()).map(|i| self.support(i)).collect()
    }

    pub fn weights(&self) -> Vec<usize> {
        self.supports().iter().map(Block::len).collect()
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut m = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.n {
            let Some(p) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, p);
            let inv = f.inv(m[rank][col]).expect("nonzero pivot");
            for x in m[rank].iter_mut() {
                *x = f.mul(*x, inv);
            }
            let pivot = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row[col] != 0 {
                    let factor = row[col];
                    for (x, &p) in row.iter_mut().zip(&pivot) {
                        *x = f.sub(*x, f.mul(factor, p));
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

fn support_of(row: &[u64]) -> Block {
    let mut b = Block::empty();
    for (j, &x) in row.iter().enumerate() {
        if x != 0 {
            b.insert(j + 1);
        }
    }
    b
}

/// One row per block of an `(n, d−2)`-SE system, each vanishing exactly on
/// its block.
pub fn build_h_from_se(spec: &CodeSpec, sys: &SetSystem) -> Result<ParityCheckMatrix> {
    if sys.n != spec.n || sys.t + 2 != spec.d {
        return Err(Error::params(format!(
            "need an (n, d-2) = ({}, {}) SE system, got ({}, {})",
            spec.n,
            spec.d - 2,
            sys.n,
            sys.t
        )));
    }
    if let Some(x) = is_se_system(sys)?.witness() {
        return Err(Error::Verification(format!("not an SE system: {x} is not covered")));
    }
    let rows = sys
        .blocks()
        .iter()
        .map(|b| dual_vanishing_codeword(spec, b))
        .collect::<Result<Vec<_>>>()?;
    let h = ParityCheckMatrix::new(spec.field, spec.n, rows)?;
    let rank = h.rank();
    if rank != spec.n - spec.k {
        return Err(Error::Internal(format!("SE-derived matrix has rank {rank}, expected {}", spec.n - spec.k)));
    }
    Ok(h)
}

fn check_subset(h: &ParityCheckMatrix, subset: &Block) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::params("stopping sets are nonempty"));
    }
    if subset.max_member().is_some_and(|m| m > h.n) {
        return Err(Error::params(format!("subset {subset} exceeds n = {}", h.n)));
    }
    Ok(())
}

/// No row meets `subset` in exactly one position.
pub fn is_stopping_set(h: &ParityCheckMatrix, subset: &Block) -> Result<bool> {
    check_subset(h, subset)?;
    Ok(h.supports().iter().all(|s| s.intersection_len(subset) != 1))
}

/// Size of a smallest nonempty stopping set, searching sizes `1, 2, …`
/// and stopping at the first hit.
pub fn stopping_distance(h: &ParityCheckMatrix) -> Result<usize> {
    if h.n > MAX_STOPPING_N {
        return Err(Error::BudgetExceeded {
            what: "stopping-set search columns",
            needed: h.n as u128,
            budget: MAX_STOPPING_N as u128,
        });
    }
    let masks: Vec<u64> = h.supports().iter().map(Block::low_mask).collect();
    for size in 1..=h.n {
        let hit = all_subsets(h.n, size)
            .map(|s| s.low_mask())
            .any(|s| masks.iter().all(|&m| (m & s).count_ones() != 1));
        if hit {
            return Ok(size);
        }
    }
    Err(Error::Internal("the full column set is always a stopping set".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PeelOutcome {
    Recovered,
    /// The erasures left when no row sees exactly one of them.
    Stuck(Block),
}

/// Iterative erasure decoding: any row meeting the erased set once fixes
/// that position.
pub fn peel_decode(h: &ParityCheckMatrix, erased: &Block) -> PeelOutcome {
    let supports = h.supports();
    let mut left = *erased;
    loop {
        if left.is_empty() {
            return PeelOutcome::Recovered;
        }
        let solved = supports.iter().find_map(|s| {
            let inter = s.intersection(&left);
            (inter.len() == 1).then(|| inter.min_member().expect("one member"))
        });
        match solved {
            Some(x) => left.remove(x),
            None => return PeelOutcome::Stuck(left),
        }
    }
}

/// Replaces each row heavier than `n−d+2` by minimum-weight dual codewords
/// whose supports union to exactly its support. Sub-supports are chosen
/// greedily: most uncovered positions first, ties to the lexicographically
/// first zero set.
///
/// The stopping distance never drops. If `h` already reaches `s(H) = d`
/// the result therefore still has full rank; for other inputs the rank can
/// fall.
pub fn replace_nonmin_rows(spec: &CodeSpec, h: &ParityCheckMatrix) -> Result<ParityCheckMatrix> {
    if h.n != spec.n || h.field != spec.field {
        return Err(Error::params("matrix and code disagree on n or q"));
    }
    let dmin = spec.dual_distance();
    let cap = spec.n.div_ceil(dmin);
    let full = Block::prefix(spec.n);
    let mut rows = Vec::new();
    for (i, row) in h.rows().iter().enumerate() {
        let support = support_of(row);
        if support.is_empty() {
            continue;
        }
        if support.len() < dmin {
            return Err(Error::params(format!("row {} has weight {} below the dual distance {dmin}", i + 1, support.len())));
        }
        if support.len() == dmin {
            rows.push(row.clone());
            continue;
        }
        let outside = full.difference(&support);
        // zero sets b ⊇ outside with |b| = d−2, so supports lie inside `support`
        let free = spec.d - 2 - outside.len();
        let inside: Vec<usize> = support.iter().collect();
        let mut covered = Block::empty();
        let mut added = 0;
        while covered != support {
            let mut best: Option<(usize, Block)> = None;
            for extra in all_subsets(inside.len(), free) {
                let mut b = outside;
                for k in extra.iter() {
                    b.insert(inside[k - 1]);
                }
                let gain = full.difference(&b).difference(&covered).len();
                if best.as_ref().map_or(true, |(g, bb)| gain > *g || (gain == *g && b < *bb)) {
                    best = Some((gain, b));
                }
            }
            let (_, b) = best.expect("at least one zero set");
            covered = covered.union(&full.difference(&b));
            rows.push(dual_vanishing_codeword(spec, &b)?);
            added += 1;
        }
        if added > cap {
            return Err(Error::Internal(format!("row {} needed {added} replacements, cap is {cap}", i + 1)));
        }
    }
    ParityCheckMatrix::new(spec.field, spec.n, rows)
}

/// Every nonzero dual codeword up to scalars, one per distinct support,
/// supports ascending.
pub fn dual_codewords_by_support(spec: &CodeSpec) -> Result<Vec<(Block, Vec<u64>)>> {
    let dim = (spec.n - spec.k) as u32;
    let q = spec.field.q();
    let count = (q as u128).checked_pow(dim).filter(|&c| c <= 1 << 24).ok_or(Error::BudgetExceeded {
        what: "dual codewords",
        needed: (q as u128).saturating_pow(dim),
        budget: 1 << 24,
    })?;
    let mut seen = std::collections::BTreeMap::new();
    for idx in 1..count {
        let mut coeffs = Vec::with_capacity(dim as usize);
        let mut rest = idx;
        for _ in 0..dim {
            coeffs.push((rest % q as u128) as u64);
            rest /= q as u128;
        }
        let word = spec.dual_codeword(&coeffs);
        seen.entry(support_of(&word)).or_insert(word);
    }
    Ok(seen.into_iter().collect())
}

/// Stopping redundancy by exact search over sets of dual-codeword supports:
/// the fewest rows with no stopping set below size `d`. Returns the count
/// and a witness matrix.
pub fn stopping_redundancy(spec: &CodeSpec, opts: &SolveOptions) -> Result<(usize, ParityCheckMatrix)> {
    let words = dual_codewords_by_support(spec)?;
    let targets: Vec<Block> = (1..spec.d).flat_map(|i| all_subsets(spec.n, i)).collect();
    let candidates: Vec<Block> = words.iter().map(|(s, _)| *s).collect();
    let inst = CoverInstance::new(targets, candidates, |s, x| s.intersection_len(x) == 1, opts.incidence_budget)?;
    let sol = inst.solve(opts)?;
    let rows = sol.chosen.iter().map(|&c| words[c].1.clone()).collect();
    let h = ParityCheckMatrix::new(spec.field, spec.n, rows)?;
    if stopping_distance(&h)? != spec.d || h.rank() != spec.n - spec.k {
        return Err(Error::Internal("stopping-redundancy witness fails its own check".into()));
    }
    Ok((h.len(), h))
}

/// Text form: `q l n`, then `l` lines of `n` entries.
pub fn render_matrix(h: &ParityCheckMatrix) -> String {
    let mut s = format!("{} {} {}\n", h.field.q(), h.len(), h.n);
    for r in h.rows() {
        let line: Vec<String> = r.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

pub fn parse_matrix(text: &str) -> Result<ParityCheckMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing \"q l n\" header"))?;
    let nums = parse_numbers(hline, header)?;
    let [q, l, n] = nums[..] else {
        return Err(Error::parse(hline, "header must be \"q l n\""));
    };
    let field = PrimeField::new(q).map_err(|e| Error::parse(hline, e.to_string()))?;
    let mut rows = Vec::new();
    for (no, line) in lines {
        let r = parse_numbers(no, line)?;
        if r.len() as u64 != n {
            return Err(Error::parse(no, format!("expected {n} entries, found {}", r.len())));
        }
        if let Some(bad) = r.iter().find(|&&x| x >= q) {
            return Err(Error::parse(no, format!("entry {bad} outside [0, {q})")));
        }
        rows.push(r);
    }
    if rows.len() as u64 != l {
        return Err(Error::parse(hline, format!("header promises {l} rows, found {}", rows.len())));
    }
    ParityCheckMatrix::new(field, n as usize, rows)
}

fn parse_numbers(line: usize, s: &str) -> Result<Vec<u64>> {
    s.split_whitespace()
        .map(|w| w.parse().map_err(|_| Error::parse(line, format!("not a non-negative integer: {w:?}"))))
        .collect()
}

pub fn read_matrix(path: &Path) -> Result<ParityCheckMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, h: &ParityCheckMatrix) -> Result<()> {
    Ok(std::fs::write(path, render_matrix(h))?)
}

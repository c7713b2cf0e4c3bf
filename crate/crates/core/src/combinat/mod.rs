//! Exact combinatorial arithmetic and the classic lower bounds on Turán
//! numbers `T(n, t+1, t)`.

mod real;

use std::sync::OnceLock;

use rug::ops::DivRounding;
use rug::{Integer, Rational};

pub use real::{prec_for, ExtReal, Rounding, MIN_PREC};

use crate::{Error, Result};

/// Arbitrary-precision non-negative integer.
pub type ExactInt = Integer;

/// Largest `n` served from the memoised Pascal table.
pub const TABLE_MAX_N: usize = 512;

fn pascal() -> &'static [Vec<Integer>] {
    static TABLE: OnceLock<Vec<Vec<Integer>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<Integer>> = Vec::with_capacity(TABLE_MAX_N + 1);
        rows.push(vec![Integer::from(1)]);
        for n in 1..=TABLE_MAX_N {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(Integer::from(1));
            for k in 1..n {
                row.push(Integer::from(&prev[k - 1] + &prev[k]));
            }
            row.push(Integer::from(1));
            rows.push(row);
        }
        rows
    })
}

static ZERO: OnceLock<Integer> = OnceLock::new();

fn pascal_prefix() -> &'static [Vec<Integer>] {
    static TABLE: OnceLock<Vec<Vec<Integer>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        pascal()
            .iter()
            .map(|row| {
                let mut acc = Integer::new();
                row.iter()
                    .map(|v| {
                        acc += v;
                        acc.clone()
                    })
                    .collect()
            })
            .collect()
    })
}

/// `Σ C(m, j)` over `lo <= j <= hi`, clipped to `0..=m`.
pub fn binomial_range_sum(m: i64, lo: i64, hi: i64) -> Integer {
    let (lo, hi) = (lo.max(0), hi.min(m));
    if m < 0 || lo > hi {
        return Integer::new();
    }
    if m as usize <= TABLE_MAX_N {
        let row = &pascal_prefix()[m as usize];
        let below = if lo == 0 { Integer::new() } else { row[lo as usize - 1].clone() };
        return Integer::from(&row[hi as usize] - below);
    }
    (lo..=hi).map(|j| binomial(m, j)).sum()
}

/// `C(n, k)` by reference; zero outside `0 ≤ k ≤ n`. Panics for
/// `n > TABLE_MAX_N` (use [`binomial`] there).
pub fn binom(n: i64, k: i64) -> &'static Integer {
    if n < 0 || k < 0 || k > n {
        return ZERO.get_or_init(Integer::new);
    }
    let n = n as usize;
    assert!(n <= TABLE_MAX_N, "binom table holds n <= {TABLE_MAX_N}");
    &pascal()[n][k as usize]
}

/// `C(n, k)`, zero for `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> ExactInt {
    if n < 0 || k < 0 || k > n {
        return Integer::new();
    }
    if n as usize <= TABLE_MAX_N {
        return binom(n, k).clone();
    }
    Integer::from(Integer::binomial_u(n as u32, k.min(n - k) as u32))
}

/// Binomial that works for any `n`, borrowing from the table when possible.
pub(crate) fn binomial_cow(n: i64, k: i64) -> std::borrow::Cow<'static, Integer> {
    if n >= 0 && (n as usize) <= TABLE_MAX_N {
        std::borrow::Cow::Borrowed(binom(n, k))
    } else {
        std::borrow::Cow::Owned(binomial(n, k))
    }
}

/// `φ(n,t,i) = i·C(n−i, t−i+1)`: the number of `t`-subsets covering a fixed
/// `i`-subset.
pub fn phi(n: i64, t: i64, i: i64) -> Result<ExactInt> {
    if i < 1 || i > t + 1 || t + 1 > n {
        return Err(Error::params(format!(
            "phi requires 1 <= i <= t+1 <= n, got n={n} t={t} i={i}"
        )));
    }
    Ok(binomial(n - i, t - i + 1) * Integer::from(i))
}

fn check_nt(n: i64, t: i64) -> Result<()> {
    if t <= 0 || t >= n {
        return Err(Error::params(format!("need 0 < t < n, got n={n} t={t}")));
    }
    Ok(())
}

fn ceil_ratio(r: &Rational) -> Integer {
    let (num, den) = r.clone().into_numer_denom();
    num.div_ceil(den)
}

/// `⌈C(n,t)/(t+1)⌉`, the counting bound on `T(n,t+1,t)` and `S(n,t)`.
pub fn simple_lower(n: i64, t: i64) -> Result<ExactInt> {
    check_nt(n, t)?;
    Ok(binomial_cow(n, t).as_ref().clone().div_ceil(Integer::from(t + 1)))
}

/// Schönheim's iterated ceiling
/// `⌈n/(n−t)⌈(n−1)/(n−t−1)⌈…⌈(t+2)/2⌉…⌉⌉⌉`, innermost first, in exact
/// integers.
pub fn schoenheim_lower(n: i64, t: i64) -> Result<ExactInt> {
    check_nt(n, t)?;
    Ok(schoenheim_chain(t, n).pop().expect("nonempty chain"))
}

/// Schönheim values for a fixed `t` and every ground-set size
/// `m = t+1 ..= n_max`; element `j` holds the bound for `m = t+1+j`.
/// For `m = t+1` the bound is 1 (a single block suffices and is needed).
pub fn schoenheim_chain(t: i64, n_max: i64) -> Vec<ExactInt> {
    let mut out = Vec::with_capacity((n_max - t).max(0) as usize);
    let mut v = Integer::from(1);
    out.push(v.clone());
    for m in (t + 2)..=n_max {
        // T(m, t+1, t) >= ceil(m/(m−t) · T(m−1, t+1, t)); for m = t+2 the
        // inner value is 1, giving ceil((t+2)/2).
        v = (v * Integer::from(m)).div_ceil(Integer::from(m - t));
        out.push(v.clone());
    }
    out
}

/// De Caen: `⌈(1/t)·((n−t)/(n−t+1))·C(n,t)⌉`.
pub fn decaen_lower(n: i64, t: i64) -> Result<ExactInt> {
    check_nt(n, t)?;
    let r = Rational::from((
        binomial_cow(n, t).as_ref() * Integer::from(n - t),
        Integer::from(t * (n - t + 1)),
    ));
    Ok(ceil_ratio(&r))
}

/// The `(n, s, t)` triple with the derived MDS-code parameters
/// `k = n−t−1`, `d = t+2`, `d⊥ = n−d+2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DesignParams {
    pub n: usize,
    pub t: usize,
    pub s: usize,
}

impl DesignParams {
    pub fn new(n: usize, t: usize, s: usize) -> Result<Self> {
        if t >= n || s < t || s > n {
            return Err(Error::params(format!(
                "need t < n and t <= s <= n, got n={n} t={t} s={s}"
            )));
        }
        Ok(DesignParams { n, t, s })
    }

    /// SE parameters: `s = t+1`.
    pub fn se(n: usize, t: usize) -> Result<Self> {
        Self::new(n, t, t + 1)
    }

    /// Code dimension `k = n − t − 1`.
    pub fn k(&self) -> usize {
        self.n - self.t - 1
    }

    /// Minimum distance `d = t + 2`.
    pub fn d(&self) -> usize {
        self.t + 2
    }

    /// Dual distance `d⊥ = n − d + 2`.
    pub fn dual_distance(&self) -> usize {
        self.n + 2 - self.d()
    }
}

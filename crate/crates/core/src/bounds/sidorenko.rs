//! Recurrent bound from Sidorenko's Turán construction:
//! `S(n,t) <= Σ_{i=0}^{t} f(i,l_i)·C(m+i,i)` with `m = n−t−1` and
//! `f(i,l) = 1/(2l) + ½(3 + i/(l−1−l(i−1)/(m+i)))(1−1/l)^i`.
//!
//! Each summand bounds an integer Turán number, so the minimised total is
//! the sum of per-term floors. A term depends only on `(m,i)`, which lets
//! a sweep share one table per `m`.

use rug::{Integer, Rational};

use super::formulas::exact_upper;
use super::{BoundName, BoundParams, BoundResult};
use crate::combinat::binomial_cow;
use crate::combinat::{ExtReal, Rounding};
use crate::{Error, Result};

/// Largest `l_i` tried for any term.
pub const L_CAP: u64 = 1_000_000;
const GRID_RATIO: f64 = 1.02;

/// Smallest valid `l` for term `i`: `l >= 2` and `l(m+1) > m+i`.
pub fn l_floor(m: usize, i: usize) -> u64 {
    (((m + i) / (m + 1)) as u64 + 1).max(2)
}

fn f64_coef(m: usize, i: usize, l: u64) -> f64 {
    let (mf, i_f, lf) = (m as f64, i as f64, l as f64);
    let den = lf * (mf + 1.0) - (mf + i_f);
    1.0 / (2.0 * lf) + 0.5 * (3.0 + i_f * (mf + i_f) / den) * (i_f * (-1.0 / lf).ln_1p()).exp()
}

/// `f(i,l)·C(m+i,i)` rounded up.
pub fn term_upper(m: usize, i: usize, l: u64) -> Result<ExtReal> {
    if l < l_floor(m, i) {
        return Err(Error::params(format!("l={l} invalid for term i={i}, m={m}")));
    }
    let cb = binomial_cow((m + i) as i64, i as i64);
    let prec = cb.significant_bits() + 128;
    let up = Rounding::Up;
    let den = Integer::from(l) * (m as u64 + 1) - (m + i) as u64;
    let frac = Rational::from((Integer::from(i * (m + i)), den));
    let inner = ExtReal::from_ratio(&(frac + 3u32), prec, up).div_u64(2, up);
    let base = ExtReal::from_ratio(&Rational::from((l - 1, l)), prec, up);
    let pw = base.powi(i as i32, up);
    let half_inv = ExtReal::from_ratio(&Rational::from((1u64, 2 * l)), prec, up);
    Ok(half_inv.add(&inner.mul(&pw, up), up).mul_int(&cb, up))
}

/// Per-term minimum: floored value and the `l` achieving it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SidorenkoTerm {
    pub i: usize,
    pub l: u64,
    pub value: Integer,
}

/// Minimises `⌊f(i,l)·C(m+i,i)⌋` over `l_floor(m,i) <= l <= L_CAP`:
/// geometric grid, integer ternary refinement, then rigorous evaluation of
/// every near-minimal point in a ±2 window. Ties go to the smallest `l`.
pub fn minimise_term(m: usize, i: usize) -> Result<SidorenkoTerm> {
    let lo_l = l_floor(m, i);
    if lo_l > L_CAP {
        return Err(Error::params(format!("empty l range for term i={i}, m={m}")));
    }
    let mut grid = vec![lo_l];
    while let Some(&last) = grid.last() {
        if last >= L_CAP {
            break;
        }
        let next = ((last as f64 * GRID_RATIO).ceil() as u64).max(last + 1).min(L_CAP);
        grid.push(next);
    }
    let f = |l: u64| f64_coef(m, i, l);
    let vals: Vec<f64> = grid.iter().map(|&l| f(l)).collect();
    let mut best = 0;
    for (j, v) in vals.iter().enumerate() {
        if *v < vals[best] {
            best = j;
        }
    }
    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(grid.len() - 1)];
    while hi - lo > 4 {
        let third = (hi - lo) / 3;
        let (a, b) = (lo + third, hi - third);
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let window: Vec<u64> = (lo.saturating_sub(2).max(lo_l)..=(hi + 2).min(L_CAP)).collect();
    let fmin = window.iter().map(|&l| f(l)).fold(f64::INFINITY, f64::min);
    let mut out: Option<SidorenkoTerm> = None;
    for &l in &window {
        if f(l) > fmin * (1.0 + 1e-9) {
            continue;
        }
        let value = term_upper(m, i, l)?.floor();
        if out.as_ref().map_or(true, |o| value < o.value) {
            out = Some(SidorenkoTerm { i, l, value });
        }
    }
    Ok(out.expect("window holds the minimum"))
}

/// Minimised terms `i = 0..=i_max` for one `m`, with prefix sums.
#[derive(Clone, Debug)]
pub struct RecurrentBTable {
    pub m: usize,
    pub terms: Vec<SidorenkoTerm>,
    prefix: Vec<Integer>,
}

impl RecurrentBTable {
    pub fn new(m: usize, i_max: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::params("need m = n-t-1 >= 1"));
        }
        let mut terms = Vec::with_capacity(i_max + 1);
        let mut prefix = Vec::with_capacity(i_max + 1);
        let mut acc = Integer::new();
        for i in 0..=i_max {
            let term = minimise_term(m, i)?;
            acc += &term.value;
            prefix.push(acc.clone());
            terms.push(term);
        }
        Ok(RecurrentBTable { m, terms, prefix })
    }

    /// The bound on `S(m+t+1, t)`.
    pub fn result(&self, t: usize) -> Result<BoundResult> {
        let Some(total) = self.prefix.get(t) else {
            return Err(Error::params(format!("table for m={} stops before t={t}", self.m)));
        };
        let n = self.m + t + 1;
        let ls = self.terms[..=t].iter().map(|x| x.l).collect();
        Ok(exact_upper(
            BoundName::RecurrentB,
            n,
            t,
            Rational::from(total.clone()),
            BoundParams::LVector(ls),
        ))
    }
}

/// `Σ_i f(i,l_i)·C(m+i,i)` for explicit `l_0..l_t`, rounded up, without
/// per-term floors.
pub fn recurrent_b(n: usize, t: usize, ls: &[u64]) -> Result<ExtReal> {
    check(n, t)?;
    if ls.len() != t + 1 {
        return Err(Error::params(format!("need {} values l_0..l_t, got {}", t + 1, ls.len())));
    }
    let m = n - t - 1;
    let mut sum: Option<ExtReal> = None;
    for (i, &l) in ls.iter().enumerate() {
        let v = term_upper(m, i, l)?;
        sum = Some(match sum {
            None => v,
            Some(s) => s.add(&v, Rounding::Up),
        });
    }
    Ok(sum.expect("t+1 >= 1 terms"))
}

/// Per-term minimum of [`recurrent_b`], summing floored terms.
pub fn recurrent_b_min(n: usize, t: usize) -> Result<BoundResult> {
    check(n, t)?;
    RecurrentBTable::new(n - t - 1, t)?.result(t)
}

fn check(n: usize, t: usize) -> Result<()> {
    if t == 0 || t + 1 >= n {
        return Err(Error::params(format!("need 0 < t < n-1, got n={n} t={t}")));
    }
    Ok(())
}

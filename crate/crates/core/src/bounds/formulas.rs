//! Closed-form bounds evaluated in exact integer / rational arithmetic,
//! plus the Erdős–Spencer based recurrent bound, which needs `ln k`.

use rug::ops::DivRounding;
use rug::{Integer, Rational};

use super::{BoundKind, BoundName, BoundParams, BoundResult, Target};
use crate::combinat::{ExtReal, Rounding};
use crate::combinat::{binomial_cow, decaen_lower, schoenheim_lower, simple_lower};
use crate::{Error, Result};

fn c(n: i64, k: i64) -> Integer {
    binomial_cow(n, k).into_owned()
}

fn raw_of(r: &Rational, dir: Rounding) -> ExtReal {
    let bits = r.numer().significant_bits().max(r.denom().significant_bits());
    ExtReal::from_ratio(r, bits + 128, dir)
}

pub(crate) fn exact_upper(name: BoundName, n: usize, t: usize, r: Rational, params: BoundParams) -> BoundResult {
    BoundResult {
        name,
        kind: BoundKind::Upper,
        value: r.clone().floor().into_numer_denom().0,
        raw: raw_of(&r, Rounding::Down),
        params,
        target: Target::Se,
        n,
        t,
    }
}

pub(crate) fn exact_lower(name: BoundName, n: usize, t: usize, r: Rational, target: Target) -> BoundResult {
    BoundResult {
        name,
        kind: BoundKind::Lower,
        value: r.clone().ceil().into_numer_denom().0,
        raw: raw_of(&r, Rounding::Up),
        params: BoundParams::None,
        target,
        n,
        t,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KimRoushVariant {
    /// `(1/l)C(n,t) + l[C(n−⌊n/l⌋,t) − C(n−⌊n/l⌋−⌈n/l⌉, t−⌈n/l⌉)]`
    Exact,
    /// `(1/l)C(n,t) + l⌈n/l⌉C(n−⌊n/l⌋−1,t)`
    Loose,
}

fn check_kim_roush(n: usize, t: usize, l: usize) -> Result<()> {
    if t == 0 || t + 2 >= n {
        return Err(Error::params(format!("need 0 < t < n-2, got n={n} t={t}")));
    }
    if l * (n - t - 2) < n || l > n {
        return Err(Error::params(format!("need n/(n-t-2) <= l <= n, got n={n} t={t} l={l}")));
    }
    Ok(())
}

/// Smallest admissible bin count for the weighted-partition bounds.
pub fn kim_roush_l_min(n: usize, t: usize) -> usize {
    n.div_ceil(n - t - 2)
}

/// `C/l + ints` held as floor and remainder, so candidates compare without
/// building rationals.
struct SplitValue {
    floor: Integer,
    rem: u64,
    l: u64,
}

impl SplitValue {
    fn new(c_total: &Integer, l: usize, ints: Integer) -> Self {
        let (q, r) = c_total.clone().div_rem_floor(Integer::from(l));
        SplitValue { floor: q + ints, rem: r.to_u64().expect("remainder below l"), l: l as u64 }
    }

    fn less(&self, other: &Self) -> bool {
        match self.floor.cmp(&other.floor) {
            std::cmp::Ordering::Equal => {
                (self.rem as u128) * (other.l as u128) < (other.rem as u128) * (self.l as u128)
            }
            o => o == std::cmp::Ordering::Less,
        }
    }

    fn rational(&self) -> Rational {
        Rational::from((self.rem, self.l)) + &self.floor
    }
}

fn kim_roush_ints(n: usize, t: usize, l: usize, variant: KimRoushVariant) -> Integer {
    let (ni, ti, li) = (n as i64, t as i64, l as i64);
    let (fl, cl) = (ni / li, (ni + li - 1) / li);
    let extra = match variant {
        KimRoushVariant::Exact => c(ni - fl, ti) - c(ni - fl - cl, ti - cl),
        KimRoushVariant::Loose => c(ni - fl - 1, ti) * Integer::from(cl),
    };
    extra * Integer::from(l)
}

fn kim_roush_rational(n: usize, t: usize, l: usize, variant: KimRoushVariant) -> Rational {
    SplitValue::new(&c(n as i64, t as i64), l, kim_roush_ints(n, t, l, variant)).rational()
}

/// Weighted-partition bound at one bin count `l`, floored.
pub fn kim_roush_bound(n: usize, t: usize, l: usize, variant: KimRoushVariant) -> Result<Integer> {
    check_kim_roush(n, t, l)?;
    Ok(kim_roush_rational(n, t, l, variant).floor().into_numer_denom().0)
}

/// Minimum of [`kim_roush_bound`] over `n/(n−t−2) <= l <= n`; ties go to
/// the smallest `l`.
pub fn kim_roush_min(n: usize, t: usize, variant: KimRoushVariant) -> Result<BoundResult> {
    check_kim_roush(n, t, n)?;
    let total = c(n as i64, t as i64);
    let mut best: Option<(SplitValue, usize)> = None;
    for l in kim_roush_l_min(n, t)..=n {
        let v = SplitValue::new(&total, l, kim_roush_ints(n, t, l, variant));
        if best.as_ref().map_or(true, |(b, _)| v.less(b)) {
            best = Some((v, l));
        }
    }
    let (v, l) = best.expect("l = n is admissible");
    let r = v.rational();
    let name = match variant {
        KimRoushVariant::Exact => BoundName::ConstructionA,
        KimRoushVariant::Loose => BoundName::ConstructionALoose,
    };
    Ok(exact_upper(name, n, t, r, BoundParams::L(Integer::from(l))))
}

/// `g(n,t,l) = Σ C(l,i)·i(i−1)` over `(t+1)/⌈n/l⌉ <= i <= ⌈(t+1)/⌊n/l⌋⌉`,
/// summed as `l(l−1)·Σ C(l−2,i−2)`.
pub fn frankl_rodl_g(n: usize, t: usize, l: usize) -> Integer {
    let (fl, cl) = (n / l, n.div_ceil(l));
    let lo = (t + 1).div_ceil(cl).max(2);
    let hi = (t + 1).div_ceil(fl).min(l);
    if l < 2 || lo > hi {
        return Integer::new();
    }
    let li = l as i64;
    crate::combinat::binomial_range_sum(li - 2, lo as i64 - 2, hi as i64 - 2) * Integer::from(l * (l - 1))
}

fn frankl_rodl_ints(n: usize, t: usize, l: usize) -> Integer {
    let (ni, ti) = (n as i64, t as i64);
    let fl = (n / l) as i64;
    c(ni - fl, ti) + c(ni - fl, ti - fl) + frankl_rodl_g(n, t, l)
}

fn frankl_rodl_rational(n: usize, t: usize, l: usize) -> Rational {
    SplitValue::new(&c(n as i64, t as i64), l, frankl_rodl_ints(n, t, l)).rational()
}

/// Bin-parity bound at one bin count `1 <= l <= n`, floored.
pub fn frankl_rodl_bound(n: usize, t: usize, l: usize) -> Result<Integer> {
    if t == 0 || t >= n || l == 0 || l > n {
        return Err(Error::params(format!("need 0 < t < n and 1 <= l <= n, got n={n} t={t} l={l}")));
    }
    Ok(frankl_rodl_rational(n, t, l).floor().into_numer_denom().0)
}

/// Minimum of [`frankl_rodl_bound`] over `1 <= l <= n`.
pub fn frankl_rodl_min(n: usize, t: usize) -> Result<BoundResult> {
    frankl_rodl_bound(n, t, 1)?;
    let total = c(n as i64, t as i64);
    let mut best: Option<(SplitValue, usize)> = None;
    for l in 1..=n {
        let v = SplitValue::new(&total, l, frankl_rodl_ints(n, t, l));
        if best.as_ref().map_or(true, |(b, _)| v.less(b)) {
            best = Some((v, l));
        }
    }
    let (v, l) = best.expect("nonempty range");
    let r = v.rational();
    Ok(exact_upper(BoundName::ConstructionB, n, t, r, BoundParams::L(Integer::from(l))))
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k + 1 >= n {
        return Err(Error::params(format!("need 0 < k < n-1, got n={n} k={k}")));
    }
    Ok(())
}

/// An upper bound on the covering number `C(i,k,k−1)`.
pub type CoveringProvider<'a> = &'a dyn Fn(usize, usize) -> Result<Integer>;

/// Exact covering numbers: `C(i,1,0) = 1`, `C(i,2,1) = ⌈i/2⌉`.
pub fn exact_small_provider(i: usize, k: usize) -> Result<Integer> {
    match k {
        1 => Ok(Integer::from(1)),
        2 => Ok(Integer::from(i.div_ceil(2))),
        _ => Err(Error::params(format!("no exact covering number known for k={k}"))),
    }
}

/// `⌊(1/k)C(i,k−1) + ((k−1)/k)C(i−1,k−2)⌋` from the residue-class covering.
pub fn kuzjurin_provider(i: usize, k: usize) -> Result<Integer> {
    if k == 0 || k > i {
        return Err(Error::params(format!("need 1 <= k <= i, got i={i} k={k}")));
    }
    let (ii, ki) = (i as i64, k as i64);
    let num = c(ii, ki - 1) + c(ii - 1, ki - 2) * Integer::from(k - 1);
    Ok(num.div_floor(Integer::from(k)))
}

/// Exact for `k <= 2`, residue-class covering otherwise.
pub fn default_provider(i: usize, k: usize) -> Result<Integer> {
    if k <= 2 {
        exact_small_provider(i, k)
    } else {
        kuzjurin_provider(i, k)
    }
}

/// `Σ_{i=k}^{n−1} provider(i,k)` with `k = n−t−1`.
pub fn recurrent_sum(n: usize, t: usize, provider: CoveringProvider<'_>) -> Result<Integer> {
    if t == 0 || t + 1 >= n {
        return Err(Error::params(format!("need 0 < t < n-1, got n={n} t={t}")));
    }
    let k = n - t - 1;
    let mut sum = Integer::new();
    for i in k..n {
        sum += provider(i, k)?;
    }
    Ok(sum)
}

/// `⌊((1+ln k)/k)(C(n,k)−1)⌋`, every step rounded up.
pub fn recurrent_a(n: usize, k: usize) -> Result<BoundResult> {
    check_k(n, k)?;
    let m = c(n as i64, k as i64) - 1u32;
    let prec = m.significant_bits() + 128;
    let up = Rounding::Up;
    let raw = ExtReal::from_u64(k as u64, prec, up)
        .ln(up)
        .add(&ExtReal::from_u64(1, prec, up), up)
        .mul_int(&m, up)
        .div_u64(k as u64, up);
    Ok(BoundResult {
        name: BoundName::RecurrentA,
        kind: BoundKind::Upper,
        value: raw.floor(),
        raw,
        params: BoundParams::None,
        target: Target::Se,
        n,
        t: n - k - 1,
    })
}

/// `⌊(1/k)C(n,k) + ((k−1)/k)C(n−1,k−1) − 1⌋`, exact.
pub fn recurrent_c(n: usize, k: usize) -> Result<BoundResult> {
    check_k(n, k)?;
    let (ni, ki) = (n as i64, k as i64);
    let num = c(ni, ki) + c(ni - 1, ki - 1) * Integer::from(k - 1);
    let r = Rational::from((num, Integer::from(k))) - 1u32;
    Ok(exact_upper(BoundName::RecurrentC, n, n - k - 1, r, BoundParams::None))
}

/// `⌊(1 − t/n)·T + C(n−1,t−1)⌋` for an upper bound `T` on `T(n,t+1,t)`.
pub fn turan_to_se(n: usize, t: usize, turan_upper: &Integer) -> Result<Integer> {
    if t == 0 || t + 1 >= n {
        return Err(Error::params(format!("need 0 < t < n-1, got n={n} t={t}")));
    }
    let r = Rational::from((Integer::from(turan_upper * (n - t) as u64), Integer::from(n)))
        + c(n as i64 - 1, t as i64 - 1);
    Ok(r.floor().into_numer_denom().0)
}

/// The stopping-redundancy bounds for an MDS code of length `n` and
/// distance `d`: strict lower `C(n,d−2)/(d−1) < ρ` and upper
/// `⌊max(n−d+2, d−1)/n · C(n,d−2)⌋`.
pub fn schwartz_vardy(n: usize, d: usize) -> Result<(BoundResult, BoundResult)> {
    if d < 3 || d > n {
        return Err(Error::params(format!("need 3 <= d <= n, got n={n} d={d}")));
    }
    let (ni, di) = (n as i64, d as i64);
    let cn = c(ni, di - 2);
    let q = Rational::from((cn.clone(), Integer::from(d - 1)));
    // Strict inequality: the next integer above the quotient.
    let lower_value = Integer::from(q.clone().floor().into_numer_denom().0 + 1u32);
    let lower = BoundResult {
        name: BoundName::SchwartzVardyLower,
        kind: BoundKind::Lower,
        value: lower_value,
        raw: raw_of(&q, Rounding::Up),
        params: BoundParams::None,
        target: Target::StoppingRedundancy,
        n,
        t: d - 2,
    };
    let num = cn * Integer::from((n - d + 2).max(d - 1));
    let upper = exact_upper(
        BoundName::SchwartzVardyUpper,
        n,
        d - 2,
        Rational::from((num, Integer::from(n))),
        BoundParams::None,
    );
    Ok((lower, upper))
}

/// `⌈C(n,t+1) / (n − t − t/n + 1/2)⌉`, a lower bound on `S(n,t)` only.
pub fn se_lower(n: usize, t: usize) -> Result<BoundResult> {
    if t == 0 || t + 1 >= n {
        return Err(Error::params(format!("need 0 < t < n-1, got n={n} t={t}")));
    }
    let (ni, ti) = (n as i64, t as i64);
    let den = Integer::from(2 * ni * (ni - ti) - 2 * ti + ni);
    let r = Rational::from((c(ni, ti + 1) * Integer::from(2 * n), den));
    Ok(exact_lower(BoundName::SeLower, n, t, r, Target::Se))
}

/// `⌈(T' + C(n−1,t)/(n−t−1/2)) / (1 + (n−t)/(n(n−t−1/2)))⌉` for a lower
/// bound `T'` on `T(n−1,t+1,t)`.
pub fn se_lower_from_turan(n: usize, t: usize, turan_lower: &Integer) -> Result<Integer> {
    if t == 0 || t + 1 >= n {
        return Err(Error::params(format!("need 0 < t < n-1, got n={n} t={t}")));
    }
    let (ni, ti) = (n as i64, t as i64);
    let a2 = 2 * (ni - ti) - 1; // 2(n−t−1/2)
    let num = Rational::from(turan_lower.clone()) + Rational::from((c(ni - 1, ti) * Integer::from(2), Integer::from(a2)));
    let den = Rational::from(1) + Rational::from((Integer::from(2 * (ni - ti)), Integer::from(ni * a2)));
    Ok((num / den).ceil().into_numer_denom().0)
}

pub(crate) fn lower_simple(n: usize, t: usize) -> Result<BoundResult> {
    let v = simple_lower(n as i64, t as i64)?;
    Ok(integer_lower(BoundName::SimpleLower, n, t, v))
}

pub(crate) fn lower_schoenheim(n: usize, t: usize) -> Result<BoundResult> {
    let v = schoenheim_lower(n as i64, t as i64)?;
    Ok(integer_lower(BoundName::Schoenheim, n, t, v))
}

pub(crate) fn lower_decaen(n: usize, t: usize) -> Result<BoundResult> {
    let v = decaen_lower(n as i64, t as i64)?;
    Ok(integer_lower(BoundName::DeCaen, n, t, v))
}

pub(crate) fn integer_lower(name: BoundName, n: usize, t: usize, v: Integer) -> BoundResult {
    BoundResult {
        name,
        kind: BoundKind::Lower,
        raw: ExtReal::from_int(&v, v.significant_bits() + 64, Rounding::Nearest),
        value: v,
        params: BoundParams::None,
        target: Target::Turan,
        n,
        t,
    }
}

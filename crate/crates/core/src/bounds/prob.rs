//! Probabilistic bounds: independent inclusion with probability `p`, and `l`
//! random draws with or without replacement, each followed by greedy
//! patching. Searches run on an `f64` model normalised by `C(n,t)`; the
//! reported value is always a round-up MPFR evaluation.

use std::f64::consts::LN_2;

use rug::{Float, Integer};

use super::{BoundKind, BoundName, BoundParams, BoundResult, Target};
use crate::combinat::{ExtReal, Rounding};
use crate::combinat::{binomial_cow, phi};
use crate::{Error, Result};

/// Terms whose natural log is below this are dropped and charged `2^-100`.
const SKIP_LN: f64 = -100.0 * LN_2 - 1.0;
const TINY_EXP: i32 = -100;
const TERM_PREC: u32 = 192;

pub(crate) fn ln_int(v: &Integer) -> f64 {
    if *v == 0 {
        return f64::NEG_INFINITY;
    }
    let (m, e) = v.to_f64_exp();
    m.ln() + f64::from(e) * LN_2
}

/// Precision that keeps about 128 fractional bits for values up to `v`.
fn prec_above(v: &Integer) -> u32 {
    v.significant_bits() + 128
}

pub(crate) fn check_nt(n: usize, t: usize) -> Result<()> {
    if t == 0 || t >= n {
        return Err(Error::params(format!("need 0 < t < n, got n={n} t={t}")));
    }
    Ok(())
}

struct Term {
    c_ni: Integer,
    ln_c_ni: f64,
    phi: Integer,
    phi_f: f64,
}

/// The `t+1` summands shared by every probabilistic bound at `(n,t)`.
pub(crate) struct ProbModel {
    pub n: usize,
    pub t: usize,
    pub total: Integer,
    ln_total: f64,
    terms: Vec<Term>,
}

impl ProbModel {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        check_nt(n, t)?;
        let (ni, ti) = (n as i64, t as i64);
        let total = binomial_cow(ni, ti).into_owned();
        let mut terms = Vec::with_capacity(t + 1);
        for i in 1..=ti + 1 {
            let c_ni = binomial_cow(ni, i).into_owned();
            let phi = phi(ni, ti, i)?;
            terms.push(Term {
                ln_c_ni: ln_int(&c_ni),
                phi_f: phi.to_f64(),
                c_ni,
                phi,
            });
        }
        Ok(ProbModel {
            n,
            t,
            ln_total: ln_int(&total),
            total,
            terms,
        })
    }

    /// `prob_bound / C(n,t)` in `f64`.
    pub fn normalised(&self, p: f64) -> f64 {
        let lq = (-p).ln_1p();
        let mut s = p;
        for term in &self.terms {
            s += (term.ln_c_ni - self.ln_total + term.phi_f * lq).exp();
        }
        s
    }

    /// Round-up evaluation of `p·C(n,t) + Σ C(n,i)(1−p)^φ(n,t,i)`.
    pub fn rigorous(&self, p: f64) -> ExtReal {
        let prec = prec_above(&self.total);
        let pm = ExtReal::from_f64(p, prec).mul_int(&self.total, Rounding::Up);
        if p >= 1.0 {
            // Every φ(n,t,i) >= 1, so the second phase is empty.
            return pm;
        }
        let mp = ExtReal::from_f64(-p, TERM_PREC);
        let lq = mp.ln_1p(Rounding::Up);
        let lq_f = (-p).ln_1p();
        let mut sum = pm;
        let mut skipped = 0u32;
        for term in &self.terms {
            let b = -term.phi_f * lq_f;
            let est = term.ln_c_ni - b + 1e-12 * (b.abs() + term.ln_c_ni + 1.0);
            if est < SKIP_LN {
                skipped += 1;
                continue;
            }
            let x = lq.mul_int(&term.phi, Rounding::Up);
            let v = x.exp(Rounding::Up);
            let v = ExtReal::from_int(&term.c_ni, prec, Rounding::Up).mul(&v, Rounding::Up);
            sum = sum.add(&v, Rounding::Up);
        }
        add_skipped(sum, skipped)
    }

    /// `l + Σ C(n,i)·P_i(l)` where `P_i` is the chance an `i`-subset stays
    /// uncovered after `l` draws.
    pub fn draw(&self, l: &Integer, with_replacement: bool) -> Result<ExtReal> {
        if with_replacement {
            self.draw_repl(l)
        } else {
            Ok(self.draw_norepl_run(l, 1)?.pop().expect("one value"))
        }
    }

    fn check_l(&self, l: &Integer, with_replacement: bool) -> Result<()> {
        if *l < 0 {
            return Err(Error::params("draw count must be non-negative"));
        }
        if !with_replacement && *l > self.total {
            return Err(Error::params(format!(
                "draws without replacement need l <= C(n,t) = {}",
                self.total
            )));
        }
        Ok(())
    }

    fn draw_repl(&self, l: &Integer) -> Result<ExtReal> {
        self.check_l(l, true)?;
        let prec = prec_above(&self.total).max(prec_above(l));
        let mut sum = ExtReal::from_int(l, prec, Rounding::Up);
        let (l_f, m_f) = (l.to_f64(), self.total.to_f64());
        let mut skipped = 0u32;
        for term in &self.terms {
            if *l == 0 {
                sum = sum.add(&ExtReal::from_int(&term.c_ni, prec, Rounding::Up), Rounding::Up);
                continue;
            }
            if term.phi >= self.total {
                continue;
            }
            let est_b = -l_f * (-term.phi_f / m_f).ln_1p();
            let est = term.ln_c_ni - est_b + 1e-12 * (est_b.abs() + term.ln_c_ni + 1.0);
            if est < SKIP_LN {
                skipped += 1;
                continue;
            }
            let q = ExtReal::from_ratio(
                &rug::Rational::from((term.phi.clone(), self.total.clone())),
                prec,
                Rounding::Down,
            );
            let ln_p = q.neg().ln_1p(Rounding::Up).mul_int(l, Rounding::Up);
            let v = ExtReal::from_int(&term.c_ni, prec, Rounding::Up).mul(&ln_p.exp(Rounding::Up), Rounding::Up);
            sum = sum.add(&v, Rounding::Up);
        }
        Ok(add_skipped(sum, skipped))
    }

    /// Without-replacement bound at `l0, l0+1, …` (`count` values). The
    /// first uses `C(M−φ,l)/C(M,l)` through log-gamma; later ones extend the
    /// product by one factor `1 − φ/(M−l)` each.
    pub fn draw_norepl_run(&self, l0: &Integer, count: usize) -> Result<Vec<ExtReal>> {
        self.check_l(l0, false)?;
        let last = Integer::from(l0 + count.saturating_sub(1) as u64);
        self.check_l(&last, false)?;
        let prec = prec_above(&self.total);
        let up = Rounding::Up;
        let mut sums: Vec<ExtReal> = (0..count)
            .map(|j| ExtReal::from_int(&Integer::from(l0 + j as u64), prec, up))
            .collect();
        let (l_f, m_f) = (l0.to_f64(), self.total.to_f64());
        let lg_prec = prec + 16;
        let lg = |x: &Integer, dir: Rounding| {
            ExtReal::from_int(&Integer::from(x + 1u32), lg_prec, Rounding::Nearest).ln_gamma(dir)
        };
        let mut shared: Option<ExtReal> = None;
        let mut skipped = 0u32;
        for term in &self.terms {
            let rest = Integer::from(&self.total - &term.phi);
            let est_b = term.phi_f * l_f / m_f;
            let est = term.ln_c_ni - est_b + 1e-12 * (est_b.abs() + term.ln_c_ni + 1.0);
            if est < SKIP_LN {
                // P_i only shrinks as l grows.
                skipped += 1;
                continue;
            }
            // ln P_i(l0) = lnΓ(M−φ+1) − lnΓ(M−φ−l0+1) + [lnΓ(M−l0+1) − lnΓ(M+1)]
            let mut ln_p = if *l0 > rest {
                None
            } else if *l0 == 0 {
                Some(ExtReal::zero(lg_prec))
            } else {
                let common = shared.get_or_insert_with(|| {
                    let ml = Integer::from(&self.total - l0);
                    lg(&ml, Rounding::Up).sub(&lg(&self.total, Rounding::Down), Rounding::Up)
                });
                let rl = Integer::from(&rest - l0);
                Some(lg(&rest, up).sub(&lg(&rl, Rounding::Down), up).add(common, up))
            };
            let c = ExtReal::from_int(&term.c_ni, prec, up);
            for (j, sum) in sums.iter_mut().enumerate() {
                if j > 0 {
                    // factor for draw number l = l0 + j − 1
                    let remaining = Integer::from(&self.total - l0) - (j as u64 - 1);
                    ln_p = match ln_p {
                        Some(v) if remaining > term.phi => {
                            let q = ExtReal::from_ratio(
                                &rug::Rational::from((term.phi.clone(), remaining)),
                                lg_prec,
                                Rounding::Down,
                            );
                            Some(v.add(&q.neg().ln_1p(up), up))
                        }
                        _ => None,
                    };
                }
                if let Some(v) = &ln_p {
                    *sum = sum.add(&c.mul(&v.exp(up), up), up);
                }
            }
        }
        Ok(sums.into_iter().map(|s| add_skipped(s, skipped)).collect())
    }
}

fn add_skipped(sum: ExtReal, skipped: u32) -> ExtReal {
    if skipped == 0 {
        return sum;
    }
    let tiny = f64::from(skipped) * 2f64.powi(TINY_EXP);
    sum.add(&ExtReal::from_f64(tiny, 64), Rounding::Up)
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::params(format!("need 0 <= p <= 1, got {p}")));
    }
    Ok(())
}

/// `p·C(n,t) + Σ_{i=1}^{t+1} C(n,i)(1−p)^{φ(n,t,i)}`, rounded up.
pub fn prob_bound(n: usize, t: usize, p: f64) -> Result<ExtReal> {
    check_p(p)?;
    Ok(ProbModel::new(n, t)?.rigorous(p))
}

/// `1 − (n−t)^{−1/t}`, the minimiser of the leading part of the bound.
pub fn p_min(n: usize, t: usize) -> f64 {
    1.0 - ((n - t) as f64).powf(-1.0 / t as f64)
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const SCAN_POINTS: usize = 64;
const FALLBACK_POINTS: usize = 4096;
pub(crate) const P_REL_TOL: f64 = 1e-12;

/// Minimiser of the normalised bound in `[0,1]`: a 64-point scan seeded
/// with `p_min`, a unimodality check (global 4096-point grid otherwise),
/// then golden section to relative width `1e-12`.
pub(crate) fn minimise_p(model: &ProbModel) -> f64 {
    let f = |p: f64| model.normalised(p);
    let mut pts: Vec<f64> = (0..=SCAN_POINTS).map(|j| j as f64 / SCAN_POINTS as f64).collect();
    pts.push(p_min(model.n, model.t));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut vals: Vec<f64> = pts.iter().map(|&p| f(p)).collect();
    let mut best = argmin(&vals);
    let unimodal = vals[..=best].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14))
        && vals[best..].windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-14));
    if !unimodal {
        pts = (0..=FALLBACK_POINTS).map(|j| j as f64 / FALLBACK_POINTS as f64).collect();
        vals = pts.iter().map(|&p| f(p)).collect();
        best = argmin(&vals);
    }
    let mut a = pts[best.saturating_sub(1)];
    let mut b = pts[(best + 1).min(pts.len() - 1)];
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..400 {
        if b - a <= P_REL_TOL * ((a + b) / 2.0).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let mut cand = [(pts[best], vals[best]), (c, fc), (d, fd), ((a + b) / 2.0, f((a + b) / 2.0))];
    cand.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.total_cmp(&y.0)));
    cand[0].0
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn prob_result(n: usize, t: usize, raw: ExtReal, p: f64) -> BoundResult {
    BoundResult {
        name: BoundName::Probabilistic,
        kind: BoundKind::Upper,
        value: raw.floor(),
        raw,
        params: BoundParams::P(p),
        target: Target::Se,
        n,
        t,
    }
}

/// Minimum over `p` of [`prob_bound`], floored.
pub fn prob_bound_min(n: usize, t: usize) -> Result<BoundResult> {
    let model = ProbModel::new(n, t)?;
    Ok(prob_min_with(&model))
}

pub(crate) fn prob_min_with(model: &ProbModel) -> BoundResult {
    let p = minimise_p(model);
    prob_result(model.n, model.t, model.rigorous(p), p)
}

/// `l + Σ C(n,i)(1−φ/C(n,t))^l` (with replacement) or the exact
/// without-replacement product `C(M−φ,l)/C(M,l)` in place of the power.
pub fn draw_bound(n: usize, t: usize, l: &Integer, with_replacement: bool) -> Result<ExtReal> {
    ProbModel::new(n, t)?.draw(l, with_replacement)
}

/// Minimum over integer `l` of [`draw_bound`], searched locally from
/// `round(p*·C(n,t))` where `p*` minimises [`prob_bound`].
pub fn draw_bound_min(n: usize, t: usize, with_replacement: bool) -> Result<BoundResult> {
    let model = ProbModel::new(n, t)?;
    draw_min_with(&model, with_replacement, minimise_p(&model))
}

/// Round-to-nearest evaluation of `D(l)` and its derivative for the
/// minimiser search. `D` needs resolution finer than `1/C(n,t)`, so the log
/// of each summand carries about twice the bits of `C(n,t)`.
struct SlopeSearch<'a> {
    model: &'a ProbModel,
    with_replacement: bool,
    hi_prec: u32,
    lo_prec: u32,
    skip_ln: f64,
    lg_total: Option<Float>,
    lg_rest: Vec<Option<Float>>,
}

impl<'a> SlopeSearch<'a> {
    fn new(model: &'a ProbModel, with_replacement: bool) -> Self {
        let bits = model.total.significant_bits();
        SlopeSearch {
            model,
            with_replacement,
            hi_prec: 2 * bits + 96,
            lo_prec: bits + 96,
            skip_ln: -f64::from(2 * bits + 96) * LN_2,
            lg_total: None,
            lg_rest: vec![None; model.terms.len()],
        }
    }

    fn lg(prec: u32, x: &Integer) -> Float {
        Float::with_val(prec, Integer::from(x + 1u32)).ln_gamma()
    }

    /// `(D(l), D'(l))` for `0 <= l < C(n,t)`.
    fn at(&mut self, l: &Integer) -> (Float, Float) {
        let m = &self.model.total;
        let (hp, lp) = (self.hi_prec, self.lo_prec);
        let (l_f, m_f) = (l.to_f64(), m.to_f64());
        let left = Integer::from(m - l);
        let left_f = left.to_f64();
        let mut sum = Float::new(lp);
        let mut slope = Float::new(64);
        let mut lg_left: Option<Float> = None;
        for (idx, term) in self.model.terms.iter().enumerate() {
            let rest = Integer::from(m - &term.phi);
            if !self.with_replacement && *l > rest {
                continue;
            }
            let ratio_f = if self.with_replacement { term.phi_f / m_f } else { term.phi_f / left_f };
            if term.ln_c_ni - term.phi_f * l_f / m_f + ratio_f.min(1.0).ln() < self.skip_ln {
                continue;
            }
            let ln_p = if self.with_replacement {
                let q = Float::with_val(hp, &term.phi) / m;
                Float::with_val(hp, -q).ln_1p() * l
            } else {
                let lg_total = self.lg_total.get_or_insert_with(|| Self::lg(hp, m)).clone();
                let lg_l = lg_left.get_or_insert_with(|| Self::lg(hp, &left)).clone();
                let lg_rest = self.lg_rest[idx].get_or_insert_with(|| Self::lg(hp, &rest)).clone();
                lg_rest - Self::lg(hp, &Integer::from(&rest - l)) + lg_l - lg_total
            };
            let weight = Float::with_val(lp, ln_p.exp_ref()) * &term.c_ni;
            let denom = if self.with_replacement { m } else { &left };
            let r = Float::with_val(lp, &term.phi) / denom;
            if r >= 1 {
                sum += weight;
                continue;
            }
            // dP/dl ≈ P·ln(1−r); without replacement r also grows like r/(M−l)
            let mut growth = -Float::with_val(64, -&r).ln_1p();
            if !self.with_replacement {
                growth -= Float::with_val(64, denom).recip();
            }
            slope += Float::with_val(64, &weight * &r) * growth;
            sum += weight * r;
        }
        (Float::with_val(lp, 1 - sum), slope)
    }
}

/// Newton iteration on the one-step difference `D(l) = v(l+1) − v(l)`,
/// started at `round(p*·C(n,t))` and kept inside a sign bracket. The bound
/// is convex in `l`, so the first `l` with `D(l) >= 0` is the minimiser.
pub(crate) fn draw_min_with(model: &ProbModel, with_replacement: bool, p_star: f64) -> Result<BoundResult> {
    let total = &model.total;
    let prec = total.significant_bits() + 64;
    let mut l = (Float::with_val(prec, total) * p_star)
        .round()
        .to_integer()
        .expect("finite")
        .clamp(&Integer::new(), total);
    let mut search = SlopeSearch::new(model, with_replacement);
    // D(lo) < 0 and D(hi) >= 0; lo = −1 and hi = C(n,t) stand for the ends.
    let mut lo = Integer::from(-1);
    let mut hi = total.clone();
    while Integer::from(&hi - &lo) > 1 {
        if l <= lo || l >= hi {
            l = Integer::from(&lo + &hi) / 2u32;
        }
        let (d, slope) = search.at(&l);
        let step = -Float::with_val(64, &d / &slope);
        if d.is_sign_negative() {
            lo = l.clone();
            if step < 0.5 {
                // the continuous root lies below l+1
                hi = Integer::from(&l + 1u32);
                break;
            }
        } else {
            hi = l.clone();
            if step > -0.5 {
                // D(l−1) < 0, so l itself is the minimiser
                break;
            }
        }
        l = match step.round().to_integer() {
            Some(s) if slope > 0 => l + s,
            _ => Integer::from(&lo + &hi) / 2u32,
        };
    }
    let l = hi.min(total.clone());
    let raw = model.draw(&l, with_replacement)?;
    let best = Some((raw, l));
    let (raw, l) = best.expect("centre lies in range");
    Ok(BoundResult {
        name: if with_replacement {
            BoundName::DrawRepl
        } else {
            BoundName::DrawNorepl
        },
        kind: BoundKind::Upper,
        value: raw.floor(),
        raw,
        params: BoundParams::L(l),
        target: Target::Se,
        n: model.n,
        t: model.t,
    })
}

/// The summands of the normalised excess `η(n,t)` at `p_min`.
#[derive(Clone, Debug)]
pub struct EtaDecomposition {
    pub n: usize,
    pub t: usize,
    pub p_min: f64,
    /// `f(1), …, f(t+1)`.
    pub terms: Vec<ExtReal>,
    /// `(n−t)/(t+1) · Σ f(i)`.
    pub eta: ExtReal,
    /// `f(t+1) / Σ f(i)`.
    pub dominant_ratio: ExtReal,
    /// `(1 − (n−t)^{−1/t} + η)·C(n,t)`.
    pub bound: ExtReal,
}

/// `f(i) = C(t+1,i)/C(n−i,n−t−1) · (n−t)^{−(i/t)·C(n−i,n−t−1)}`, assembled
/// independently of [`prob_bound`].
pub fn eta_decomposition(n: usize, t: usize) -> Result<EtaDecomposition> {
    check_nt(n, t)?;
    let (ni, ti) = (n as i64, t as i64);
    let k = ni - ti - 1;
    let total = binomial_cow(ni, ti).into_owned();
    let prec = prec_above(&total) + 64;
    let r = Rounding::Nearest;
    let nt = ExtReal::from_u64((n - t) as u64, prec, r);
    let ln_nt = nt.ln(r);
    let mut terms = Vec::with_capacity(t + 1);
    let mut sum = ExtReal::zero(prec);
    for i in 1..=ti + 1 {
        let c = binomial_cow(ni - i, k).into_owned();
        let expo = ln_nt.mul_int(&Integer::from(&c * i), r).div_u64(t as u64, r).neg();
        let coef = ExtReal::from_ratio(
            &rug::Rational::from((binomial_cow(ti + 1, i).into_owned(), c)),
            prec,
            r,
        );
        let f = coef.mul(&expo.exp(r), r);
        sum = sum.add(&f, r);
        terms.push(f);
    }
    let eta = sum.mul_int(&Integer::from(n - t), r).div_u64(t as u64 + 1, r);
    let dominant_ratio = terms[t].div(&sum, r);
    let lead = ln_nt.div_u64(t as u64, r).neg().exp(r);
    let one = ExtReal::from_u64(1, prec, r);
    let bound = one.sub(&lead, r).add(&eta, r).mul_int(&total, r);
    Ok(EtaDecomposition {
        n,
        t,
        p_min: p_min(n, t),
        terms,
        eta,
        dominant_ratio,
        bound,
    })
}

/// The bound at the fixed point `p = ln(n)/n`, together with its leading
/// part `p·C(n,t)`.
pub fn prob_bound_at_log_ratio(n: usize, t: usize) -> Result<(ExtReal, ExtReal)> {
    let p = (n as f64).ln() / n as f64;
    let model = ProbModel::new(n, t)?;
    let lead = ExtReal::from_f64(p, prec_above(&model.total)).mul_int(&model.total, Rounding::Up);
    Ok((model.rigorous(p.min(1.0)), lead))
}

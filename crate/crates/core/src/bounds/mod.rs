//! Upper and lower bounds on the SE number `S(n,t)`, the Turán number
//! `T(n,t+1,t)` and the stopping redundancy `ρ` of an `[n, n−d+1, d]` MDS
//! code (`t = d−2`).
//!
//! Upper bounds are floored and lower bounds ceiled. Every non-exact value
//! comes from an MPFR evaluation rounded in the safe direction.

mod formulas;
mod prob;
mod sidorenko;

use std::fmt;

use rug::Integer;

use crate::combinat::ExtReal;
use crate::{Error, Result};

pub use formulas::{
    default_provider, exact_small_provider, frankl_rodl_bound, frankl_rodl_g, frankl_rodl_min,
    kim_roush_bound, kim_roush_l_min, kim_roush_min, kuzjurin_provider, recurrent_a, recurrent_c,
    recurrent_sum, schwartz_vardy, se_lower, se_lower_from_turan, turan_to_se, CoveringProvider,
    KimRoushVariant,
};
pub use prob::{
    draw_bound, draw_bound_min, eta_decomposition, p_min, prob_bound, prob_bound_at_log_ratio,
    prob_bound_min, EtaDecomposition,
};
pub use sidorenko::{
    l_floor, minimise_term, recurrent_b, recurrent_b_min, term_upper, RecurrentBTable, SidorenkoTerm,
    L_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundName {
    Probabilistic,
    DrawRepl,
    DrawNorepl,
    ConstructionA,
    ConstructionALoose,
    ConstructionB,
    RecurrentA,
    RecurrentB,
    RecurrentC,
    SchwartzVardyUpper,
    SchwartzVardyLower,
    SimpleLower,
    Schoenheim,
    DeCaen,
    SeLower,
}

impl BoundName {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::Probabilistic => "probabilistic",
            BoundName::DrawRepl => "draw_repl",
            BoundName::DrawNorepl => "draw_norepl",
            BoundName::ConstructionA => "construction_a",
            BoundName::ConstructionALoose => "construction_a_loose",
            BoundName::ConstructionB => "construction_b",
            BoundName::RecurrentA => "recurrent_a",
            BoundName::RecurrentB => "recurrent_b",
            BoundName::RecurrentC => "recurrent_c",
            BoundName::SchwartzVardyUpper => "schwartz_vardy_upper",
            BoundName::SchwartzVardyLower => "schwartz_vardy_lower",
            BoundName::SimpleLower => "simple_lower",
            BoundName::Schoenheim => "schoenheim",
            BoundName::DeCaen => "decaen",
            BoundName::SeLower => "se_lower",
        }
    }

    /// Upper bounds competing for the winner, in tie-break order.
    pub const WINNER_CANDIDATES: [BoundName; 7] = [
        BoundName::Probabilistic,
        BoundName::ConstructionA,
        BoundName::ConstructionB,
        BoundName::RecurrentA,
        BoundName::RecurrentB,
        BoundName::RecurrentC,
        BoundName::SchwartzVardyUpper,
    ];
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

/// The quantity a bound is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// `S(n,t)`
    Se,
    /// `T(n,t+1,t)`
    Turan,
    /// `ρ` of the MDS code with `d = t+2`
    StoppingRedundancy,
}

/// Optimiser output recorded with a bound.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundParams {
    None,
    P(f64),
    L(Integer),
    LVector(Vec<u64>),
}

impl fmt::Display for BoundParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundParams::None => Ok(()),
            BoundParams::P(p) => write!(f, "p={p:.12}"),
            BoundParams::L(l) => write!(f, "l={l}"),
            BoundParams::LVector(ls) => {
                let head: Vec<String> = ls.iter().take(6).map(|l| l.to_string()).collect();
                let more = if ls.len() > 6 { ",..." } else { "" };
                write!(f, "l=[{}{more}]", head.join(","))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundResult {
    pub name: BoundName,
    pub kind: BoundKind,
    /// Floor of `raw` for upper bounds, ceiling for lower bounds.
    pub value: Integer,
    /// Value before the final rounding. For Recurrent B this is the sum of
    /// per-term floors.
    pub raw: ExtReal,
    pub params: BoundParams,
    pub target: Target,
    pub n: usize,
    pub t: usize,
}

/// All bounds at one `(n,d)` cell plus the winner.
#[derive(Clone, Debug)]
pub struct BestBounds {
    pub n: usize,
    pub d: usize,
    pub uppers: Vec<BoundResult>,
    pub lowers: Vec<BoundResult>,
    pub winner: BoundName,
    pub best_upper: Integer,
    pub best_lower: Integer,
}

impl BestBounds {
    pub fn get(&self, name: BoundName) -> Option<&BoundResult> {
        self.uppers.iter().chain(&self.lowers).find(|b| b.name == name)
    }

    pub fn value(&self, name: BoundName) -> Option<&Integer> {
        self.get(name).map(|b| &b.value)
    }
}

/// Shared per-sweep data; `None` fields are computed on the spot.
#[derive(Default)]
pub struct CellCaches<'a> {
    pub schoenheim: Option<&'a Integer>,
    pub recurrent_b: Option<&'a RecurrentBTable>,
}

/// Every bound at `(n,d)` with `5 < d <= n`.
pub fn best_bounds(n: usize, d: usize) -> Result<BestBounds> {
    if d <= 5 || d > n {
        return Err(Error::params(format!(
            "the comparison covers 5 < d <= n, got n={n} d={d}"
        )));
    }
    evaluate_all(n, d, &CellCaches::default())
}

/// Every applicable bound at `(n,d)` for `3 <= d <= n`; winner as in
/// [`best_bounds`].
pub fn evaluate_all(n: usize, d: usize, caches: &CellCaches<'_>) -> Result<BestBounds> {
    if d < 3 || d > n {
        return Err(Error::params(format!("need 3 <= d <= n, got n={n} d={d}")));
    }
    let t = d - 2;
    let k = n - t - 1;
    let mut uppers = Vec::new();
    let mut lowers = Vec::new();

    let model = prob::ProbModel::new(n, t)?;
    let prob = prob::prob_min_with(&model);
    let p_star = match prob.params {
        BoundParams::P(p) => p,
        _ => unreachable!("probabilistic result carries p"),
    };
    uppers.push(prob);
    uppers.push(prob::draw_min_with(&model, false, p_star)?);
    if t + 2 < n {
        uppers.push(kim_roush_min(n, t, KimRoushVariant::Exact)?);
    }
    uppers.push(frankl_rodl_min(n, t)?);
    if k + 1 < n {
        uppers.push(recurrent_a(n, k)?);
        uppers.push(match caches.recurrent_b {
            Some(table) => table.result(t)?,
            None => recurrent_b_min(n, t)?,
        });
        uppers.push(recurrent_c(n, k)?);
    }
    let (sv_lower, sv_upper) = schwartz_vardy(n, d)?;
    uppers.push(sv_upper);

    lowers.push(sv_lower);
    lowers.push(formulas::lower_simple(n, t)?);
    lowers.push(match caches.schoenheim {
        Some(v) => formulas::integer_lower(BoundName::Schoenheim, n, t, v.clone()),
        None => formulas::lower_schoenheim(n, t)?,
    });
    lowers.push(formulas::lower_decaen(n, t)?);
    if t + 1 < n {
        lowers.push(se_lower(n, t)?);
    }

    let mut winner: Option<&BoundResult> = None;
    for name in BoundName::WINNER_CANDIDATES {
        if let Some(b) = uppers.iter().find(|b| b.name == name) {
            if winner.map_or(true, |w| b.value < w.value) {
                winner = Some(b);
            }
        }
    }
    let winner = winner.expect("probabilistic bound always applies");
    let best_upper = winner.value.clone();
    let winner = winner.name;
    let best_lower = lowers.iter().map(|b| &b.value).max().expect("lower bounds exist").clone();
    let min_upper = uppers.iter().map(|b| &b.value).min().expect("upper bounds exist");
    if best_lower > *min_upper {
        return Err(Error::Internal(format!(
            "lower bound {best_lower} exceeds upper bound {min_upper} at n={n} d={d}"
        )));
    }
    Ok(BestBounds {
        n,
        d,
        uppers,
        lowers,
        winner,
        best_upper,
        best_lower,
    })
}

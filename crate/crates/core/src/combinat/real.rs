//! Extended-precision reals with an explicit rounding direction on every
//! operation.
//!
//! Upper-bound pipelines round every intermediate towards +∞ and lower-bound
//! pipelines towards −∞, so the integer finally reported (floor of an upper
//! bound, ceiling of a lower bound) stays a valid bound.

use std::cmp::Ordering;
use std::fmt;

use rug::float::Round;
use rug::ops::{AssignRound, Pow};
use rug::{Float, Integer, Rational};

/// Minimum working precision, in significand bits.
pub const MIN_PREC: u32 = 128;

/// Precision that keeps `guard` fractional bits for a quantity of about
/// `2^magnitude_bits`.
pub fn prec_for(magnitude_bits: u32, guard: u32) -> u32 {
    (magnitude_bits + guard).max(MIN_PREC)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rounding {
    Up,
    Down,
    Nearest,
}

impl Rounding {
    fn mpfr(self) -> Round {
        match self {
            Rounding::Up => Round::Up,
            Rounding::Down => Round::Down,
            Rounding::Nearest => Round::Nearest,
        }
    }

    /// Direction to use for a quantity that enters the result with a minus
    /// sign (a subtrahend or a divisor).
    pub fn reverse(self) -> Rounding {
        match self {
            Rounding::Up => Rounding::Down,
            Rounding::Down => Rounding::Up,
            Rounding::Nearest => Rounding::Nearest,
        }
    }
}

#[derive(Clone, PartialEq, PartialOrd)]
pub struct ExtReal(Float);

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtReal({})", self.0.to_string_radix(10, Some(24)))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(20)))
    }
}

macro_rules! rounded {
    ($prec:expr, $val:expr, $dir:expr) => {
        ExtReal(Float::with_val_round($prec, $val, $dir.mpfr()).0)
    };
}

impl ExtReal {
    pub fn zero(prec: u32) -> Self {
        ExtReal(Float::new(prec))
    }

    pub fn from_int(v: &Integer, prec: u32, dir: Rounding) -> Self {
        rounded!(prec, v, dir)
    }

    pub fn from_u64(v: u64, prec: u32, dir: Rounding) -> Self {
        rounded!(prec, v, dir)
    }

    pub fn from_ratio(v: &Rational, prec: u32, dir: Rounding) -> Self {
        rounded!(prec, v, dir)
    }

    /// Exact for every finite `f64` once `prec >= 53`.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        ExtReal(Float::with_val(prec.max(53), v))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn add(&self, rhs: &ExtReal, dir: Rounding) -> ExtReal {
        rounded!(self.prec().max(rhs.prec()), &self.0 + &rhs.0, dir)
    }

    pub fn sub(&self, rhs: &ExtReal, dir: Rounding) -> ExtReal {
        rounded!(self.prec().max(rhs.prec()), &self.0 - &rhs.0, dir)
    }

    pub fn mul(&self, rhs: &ExtReal, dir: Rounding) -> ExtReal {
        rounded!(self.prec().max(rhs.prec()), &self.0 * &rhs.0, dir)
    }

    pub fn div(&self, rhs: &ExtReal, dir: Rounding) -> ExtReal {
        rounded!(self.prec().max(rhs.prec()), &self.0 / &rhs.0, dir)
    }

    pub fn mul_int(&self, rhs: &Integer, dir: Rounding) -> ExtReal {
        rounded!(self.prec(), &self.0 * rhs, dir)
    }

    pub fn add_int(&self, rhs: &Integer, dir: Rounding) -> ExtReal {
        rounded!(self.prec(), &self.0 + rhs, dir)
    }

    pub fn div_u64(&self, rhs: u64, dir: Rounding) -> ExtReal {
        rounded!(self.prec(), &self.0 / rhs, dir)
    }

    pub fn neg(&self) -> ExtReal {
        ExtReal(Float::with_val(self.prec(), -&self.0))
    }

    pub fn ln(&self, dir: Rounding) -> ExtReal {
        let mut x = self.0.clone();
        x.ln_round(dir.mpfr());
        ExtReal(x)
    }

    /// `ln(1 + self)`.
    pub fn ln_1p(&self, dir: Rounding) -> ExtReal {
        let mut x = self.0.clone();
        x.ln_1p_round(dir.mpfr());
        ExtReal(x)
    }

    pub fn exp(&self, dir: Rounding) -> ExtReal {
        let mut x = self.0.clone();
        x.exp_round(dir.mpfr());
        ExtReal(x)
    }

    /// `ln Γ(self)` for `self > 0`.
    pub fn ln_gamma(&self, dir: Rounding) -> ExtReal {
        let mut x = self.0.clone();
        x.ln_gamma_round(dir.mpfr());
        ExtReal(x)
    }

    pub fn powi(&self, exp: i32, dir: Rounding) -> ExtReal {
        let mut x = Float::new(self.prec());
        x.assign_round((&self.0).pow(exp), dir.mpfr());
        ExtReal(x)
    }

    pub fn pow(&self, exp: &ExtReal, dir: Rounding) -> ExtReal {
        let mut x = Float::new(self.prec().max(exp.prec()));
        x.assign_round((&self.0).pow(&exp.0), dir.mpfr());
        ExtReal(x)
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn floor(&self) -> Integer {
        self.0
            .to_integer_round(Round::Down)
            .map(|(i, _)| i)
            .expect("finite value")
    }

    pub fn ceil(&self) -> Integer {
        self.0
            .to_integer_round(Round::Up)
            .map(|(i, _)| i)
            .expect("finite value")
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn cmp_int(&self, v: &Integer) -> Ordering {
        self.0.partial_cmp(v).expect("finite value")
    }
}

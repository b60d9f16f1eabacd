use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational. Always normalised by `num-rational`:
/// lowest terms, positive denominator.
pub type Rat = BigRational;

/// The minimal algebraic structure dense matrices need.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
}

impl<T> Ring for T where
    T: Clone
        + Debug
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
        + Send
        + Sync
{
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    Rational,
    Float,
}

impl ScalarKind {
    pub fn name(self) -> &'static str {
        match self {
            ScalarKind::Rational => "rational",
            ScalarKind::Float => "float",
        }
    }
}

/// Matrix entry kinds that may cross the serialisation boundary.
pub trait Scalar: Ring {
    const KIND: ScalarKind;

    fn to_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self;

    /// Equality used by symmetry checks: exact for rationals, `tol`-close for floats.
    fn near(&self, other: &Self, tol: f64) -> bool;

    /// Human-readable form: shortest round-trip float or `p/q`.
    fn to_text(&self) -> String;
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn near(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for Rat {
    const KIND: ScalarKind = ScalarKind::Rational;

    fn to_f64(&self) -> f64 {
        rat_to_f64(self)
    }

    fn from_i64(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn to_text(&self) -> String {
        format_rat(self)
    }
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // huge numerator/denominator: shift both into range first
            let bits = r.numer().bits().max(r.denom().bits()) as i64 - 1000;
            let shift = bits.max(0) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Exact conversion of a finite binary64 to a rational.
pub fn f64_to_rat(v: f64) -> Option<Rat> {
    Rat::from_float(v)
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"-0.25"` exactly.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("{s}: zero denominator")));
        }
        return Ok(Rat::new(p, q));
    }
    if let Ok(p) = BigInt::from_str(s) {
        return Ok(Rat::from_integer(p));
    }
    // decimal literal
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body
        .split_once('.')
        .ok_or_else(|| Error::Parse(format!("not a rational: {s}")))?;
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|e| Error::Parse(format!("{s}: {e}")))?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let v = Rat::new(numer, denom);
    Ok(if neg { -v } else { v })
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

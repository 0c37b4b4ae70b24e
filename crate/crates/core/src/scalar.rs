//! Numeric backends.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Two backends are
//! provided: [`Rational`] (arbitrary precision, exact comparisons) and `f64`
//! (fast, compared through a [`Tolerance`]).

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when comparisons are exact and no tolerance applies.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn is_finite(&self) -> bool;
    fn abs(&self) -> Self;

    /// Renders with a fixed number of fractional digits (rounded half away from zero).
    fn to_decimal(&self, digits: usize) -> String;

    /// JSON form: `"p/q"` strings for rationals, plain numbers for floats.
    fn to_json(&self) -> Value;

    /// Parses `"p/q"`, `"p"`, decimal strings like `"-0.75"`, or JSON numbers.
    fn from_json(v: &Value) -> Result<Self> {
        let q = match v {
            Value::String(s) => parse_rational(s)?,
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Rational::from_integer(BigInt::from(i))
                } else {
                    // The shortest round-trip text of the number is parsed as a decimal,
                    // so 0.1 becomes exactly 1/10 on the exact backend.
                    parse_rational(&n.to_string())?
                }
            }
            other => return Err(Error::Parse(format!("expected a number, got {other}"))),
        };
        Ok(Self::from_rational(&q))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn sign(&self) -> Ordering {
        self.partial_cmp(&Self::zero()).unwrap_or(Ordering::Equal)
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = self * Rational::from_integer(scale.clone());
        let (q, r) = scaled.numer().abs().div_rem(scaled.denom());
        // half away from zero
        let q = if r.clone() * BigInt::from(2) >= *scaled.denom() {
            q + BigInt::one()
        } else {
            q
        };
        let neg = scaled.is_negative() && !q.is_zero();
        let (int_part, frac_part) = q.div_rem(&scale);
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push_str(&int_part.to_string());
        if digits > 0 {
            s.push('.');
            s.push_str(&format!("{:0>width$}", frac_part.to_string(), width = digits));
        }
        s
    }

    fn to_json(&self) -> Value {
        Value::String(format!("{}/{}", self.numer(), self.denom()))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_decimal(&self, digits: usize) -> String {
        format!("{:.*}", digits, self)
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

/// Parses `p/q`, an integer, or a plain decimal (`-1.25`, `3e-2`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("invalid number `{text}`"));
    if t.contains('/') {
        let q = Rational::from_str(t).map_err(|_| bad())?;
        return Ok(q);
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(k) => (&t[..k], t[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    if neg {
        numer = -numer;
    }
    let ten = BigInt::from(10u32);
    let shift = exp - frac_part.len() as i32;
    let q = if shift >= 0 {
        Rational::from_integer(numer * ten.pow(shift as u32))
    } else {
        Rational::new(numer, ten.pow((-shift) as u32))
    };
    Ok(q)
}

/// Zero test for residuals and determinants.
///
/// Exact backend: literal zero. Float backend: `|x| <= rel * (1 + scale)`, where
/// `scale` is the magnitude of the largest quantity entering the expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(rel: f64) -> Result<Self> {
        if rel > 0.0 && rel.is_finite() {
            Ok(Tolerance { rel })
        } else {
            Err(Error::Parse(format!("tolerance must be positive, got {rel}")))
        }
    }

    pub fn is_zero<S: Scalar>(&self, x: &S, scale: f64) -> bool {
        if S::EXACT {
            x.is_zero()
        } else {
            x.to_f64().abs() <= self.rel * (1.0 + scale.abs())
        }
    }

    pub fn eq<S: Scalar>(&self, x: &S, y: &S) -> bool {
        let scale = x.to_f64().abs().max(y.to_f64().abs());
        self.is_zero(&(x.clone() - y.clone()), scale)
    }

    /// Sign with values inside the tolerance band reported as `Equal`.
    pub fn sign<S: Scalar>(&self, x: &S, scale: f64) -> Ordering {
        if self.is_zero(x, scale) {
            Ordering::Equal
        } else {
            x.sign()
        }
    }
}

/// Checked division: refuses an exactly-zero denominator.
pub(crate) fn div<S: Scalar>(
    num: S,
    den: S,
    what: &str,
    site: Option<crate::lattice::Site>,
) -> Result<S> {
    if den.is_zero() {
        return Err(Error::zero_den(what, site));
    }
    let q = num / den;
    if !q.is_finite() {
        return Err(Error::zero_den(what, site));
    }
    Ok(q)
}

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational used in exact mode.
pub type Rational = BigRational;

/// Default comparison tolerance for approximate arithmetic.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Arithmetic mode of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Approximate,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Approximate => "float",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The single zero-threshold shared by every stage of one run.
///
/// Exact scalars ignore it; floats treat anything within `eps` of zero as zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub eps: f64,
}

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance must be a finite nonnegative number, got {eps}"
            )));
        }
        Ok(Tolerance { eps })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps: DEFAULT_EPSILON,
        }
    }
}

/// A real field element: either an exact rational or an `f64` compared against a [`Tolerance`].
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + num_traits::Num
    + Signed
{
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Converts a double; exact mode uses the exact binary value.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// The exact value, when the scalar carries one.
    fn to_rational(&self) -> Option<Rational>;

    fn from_rational(q: &Rational) -> Self;

    /// Parses `"p/q"`, integers, and decimal or scientific literals.
    fn parse_literal(s: &str) -> Result<Self>;

    fn is_zero_tol(&self, tol: Tolerance) -> bool;

    fn is_positive_tol(&self, tol: Tolerance) -> bool {
        !self.is_zero_tol(tol) && self.is_positive()
    }

    fn is_negative_tol(&self, tol: Tolerance) -> bool {
        !self.is_zero_tol(tol) && self.is_negative()
    }

    /// JSON form used in reports: `"p/q"` strings in exact mode, numbers otherwise.
    fn to_json(&self) -> serde_json::Value;
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Approximate;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        None
    }

    fn from_rational(q: &Rational) -> Self {
        Scalar::to_f64(q)
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| bad_literal(s))?;
            let q: f64 = q.trim().parse().map_err(|_| bad_literal(s))?;
            if q == 0.0 {
                return Err(bad_literal(s));
            }
            return Ok(p / q);
        }
        let v: f64 = s.parse().map_err(|_| bad_literal(s))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad_literal(s))
        }
    }

    fn is_zero_tol(&self, tol: Tolerance) -> bool {
        self.abs() <= tol.eps
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn parse_literal(s: &str) -> Result<Self> {
        parse_rational(s.trim()).ok_or_else(|| bad_literal(s))
    }

    fn is_zero_tol(&self, _tol: Tolerance) -> bool {
        self.is_zero()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

fn bad_literal(s: &str) -> Error {
    Error::InvalidInput(format!("cannot parse numeric literal {s:?}"))
}

fn parse_rational(s: &str) -> Option<Rational> {
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p.trim())?;
        let q = parse_rational(q.trim())?;
        if q.is_zero() {
            return None;
        }
        return Some(p / q);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).ok()?);
    let shift = exponent - frac_part.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift.unsigned_abs() > 10_000 {
        return None;
    }
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Literal one, avoiding `One::one()` turbofish noise at call sites.
pub fn one<T: Scalar>() -> T {
    T::one()
}

/// Literal zero.
pub fn zero<T: Scalar>() -> T {
    T::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals() {
        let half = Rational::from_ratio(1, 2);
        assert_eq!(Rational::parse_literal("1/2").unwrap(), half);
        assert_eq!(Rational::parse_literal("0.5").unwrap(), half);
        assert_eq!(Rational::parse_literal("5e-1").unwrap(), half);
        assert_eq!(Rational::parse_literal("-2/-4").unwrap(), half);
        assert_eq!(
            Rational::parse_literal("-1.25E2").unwrap(),
            Rational::from_i64(-125)
        );
        assert_eq!(
            Rational::parse_literal("0.1").unwrap(),
            Rational::from_ratio(1, 10)
        );
        assert!(Rational::parse_literal("1/0").is_err());
        assert!(Rational::parse_literal("abc").is_err());
        assert!(Rational::parse_literal(".").is_err());
    }

    #[test]
    fn float_literals() {
        assert_eq!(f64::parse_literal("1/4").unwrap(), 0.25);
        assert_eq!(f64::parse_literal("2.5e-3").unwrap(), 0.0025);
        assert!(f64::parse_literal("inf").is_err());
    }

    #[test]
    fn tolerance_policy() {
        let tol = Tolerance::default();
        assert!(1e-10_f64.is_zero_tol(tol));
        assert!(!1e-8_f64.is_zero_tol(tol));
        assert!((-1e-8_f64).is_negative_tol(tol));
        let tiny = Rational::from_ratio(1, 1_000_000_000_000);
        assert!(!tiny.is_zero_tol(tol));
        assert!(Tolerance::new(-1.0).is_err());
    }

    #[test]
    fn json_forms() {
        assert_eq!(Rational::from_ratio(1, 2).to_json(), serde_json::json!("1/2"));
        assert_eq!(Rational::from_i64(3).to_json(), serde_json::json!("3"));
        assert_eq!(0.5_f64.to_json(), serde_json::json!(0.5));
    }
}

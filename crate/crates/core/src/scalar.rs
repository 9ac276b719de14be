//! Scalar types the solvers are generic over.
//!
//! Two implementations exist: `f64` for ordinary runs and [`Rational`] for
//! exact computations. Tolerances are part of the scalar: the exact type uses
//! zero everywhere, so every comparison against a tolerance becomes an exact
//! comparison.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational used for demands, capacities and exact LPs.
pub type Rational = BigRational;

/// Numeric field used by the LP kernel, the flow code and all solvers.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and all tolerances are zero.
    const EXACT: bool;

    /// Primal/dual feasibility tolerance of the LP kernel.
    fn feas_tol() -> Self;
    /// Smallest pivot magnitude accepted by the simplex ratio test.
    fn pivot_tol() -> Self;
    /// Distance to the nearest integer below which a value counts as integral.
    fn int_tol() -> Self;

    fn floor(&self) -> Self;
    fn ceil(&self) -> Self;
    fn round(&self) -> Self;

    fn from_rational(r: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    fn approx(&self) -> f64;

    fn from_count(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("u64 is representable")
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }

    /// `|self| <= tol`.
    fn is_negligible(&self, tol: &Self) -> bool {
        self.abs() <= *tol
    }

    /// Whether the value lies within [`Scalar::int_tol`] of an integer.
    fn is_integral(&self) -> bool {
        (self.clone() - self.round()).abs() <= Self::int_tol()
    }

    /// Integer value as `u64`, rounding to nearest; negative values clamp to 0.
    fn to_count(&self) -> u64 {
        let r = self.round();
        if r <= Self::zero() {
            0
        } else {
            r.to_rational().to_integer().to_u64().unwrap_or(u64::MAX)
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn feas_tol() -> Self {
        1e-9
    }

    fn pivot_tol() -> Self {
        1e-9
    }

    fn int_tol() -> Self {
        1e-6
    }

    fn floor(&self) -> Self {
        f64::floor(*self)
    }

    fn ceil(&self) -> Self {
        f64::ceil(*self)
    }

    fn round(&self) -> Self {
        f64::round(*self)
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or_else(|| {
            if r.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn to_rational(&self) -> Rational {
        BigRational::from_float(*self).expect("finite float")
    }

    fn approx(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn feas_tol() -> Self {
        Rational::zero()
    }

    fn pivot_tol() -> Self {
        Rational::zero()
    }

    fn int_tol() -> Self {
        Rational::zero()
    }

    fn floor(&self) -> Self {
        BigRational::floor(self)
    }

    fn ceil(&self) -> Self {
        BigRational::ceil(self)
    }

    fn round(&self) -> Self {
        BigRational::round(self)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn approx(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Builds the rational `numer / denom`.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Builds the integral rational `v`.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses a plain decimal literal (`"12"`, `"-0.35"`, `"1e3"`, `"7/4"`) into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: BigInt = format!("{whole}{frac}").parse().ok()?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(all);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Renders a rational with exactly `digits` decimal places, rounding half away from zero.
pub fn format_fixed(value: &Rational, digits: usize) -> String {
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let scaled = (value * &scale).round().to_integer();
    let negative = scaled.is_negative();
    let mut repr = scaled.abs().to_string();
    if digits > 0 {
        if repr.len() <= digits {
            repr = format!("{}{}", "0".repeat(digits + 1 - repr.len()), repr);
        }
        repr.insert(repr.len() - digits, '.');
    }
    if negative {
        format!("-{repr}")
    } else {
        repr
    }
}

/// `true` iff `value` is a positive rational.
pub fn is_positive(value: &Rational) -> bool {
    value > &Rational::zero()
}

//! Exact rational scalars.
//!
//! [`Rational`] is `num`'s arbitrary-precision ratio, which keeps every value
//! in lowest terms with a positive denominator after each operation.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::GeometryError;

pub type Rational = num_rational::BigRational;

/// `num / den` as an exact rational. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// True when `r` is stored in lowest terms with a positive denominator.
pub fn is_normalized(r: &Rational) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}

/// Parses `"n/d"` or a bare integer `"n"`.
pub fn parse_rational(token: &str) -> Result<Rational, GeometryError> {
    let bad = || GeometryError::Parse(token.to_string());
    let (num, den) = match token.split_once('/') {
        Some((n, d)) => (
            BigInt::from_str(n.trim()).map_err(|_| bad())?,
            BigInt::from_str(d.trim()).map_err(|_| bad())?,
        ),
        None => (
            BigInt::from_str(token.trim()).map_err(|_| bad())?,
            BigInt::one(),
        ),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Always `numerator/denominator`, so the textual form is canonical.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal expansion of `r` rounded half away from zero to `frac_digits`
/// digits after the point. Exact: no floating point is involved.
pub fn to_decimal(r: &Rational, frac_digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), frac_digits);
    let scaled = r * Rational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let neg = rounded.is_negative();
    let digits = rounded.abs().to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if frac_digits == 0 {
        out.push_str(&digits);
        return out;
    }
    let padded = format!("{:0>width$}", digits, width = frac_digits + 1);
    let (whole, frac) = padded.split_at(padded.len() - frac_digits);
    let _ = write!(out, "{whole}.{frac}");
    out
}

/// Nearest `f64`, for display only.
pub fn to_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Decimal rendering with `sig` significant digits, for display only.
pub fn to_significant(r: &Rational, sig: usize) -> String {
    let x = to_f64(r);
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

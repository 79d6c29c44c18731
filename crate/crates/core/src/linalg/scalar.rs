//! Exact rational scalars and their textual form.
//!
//! Literals are `p/q` or `p`, with an optional leading minus sign (ASCII `-`
//! or U+2212). The denominator must be a positive integer as written.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// The field every computation runs over.
pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("denominator must be positive in `{0}`")]
    NonPositiveDenominator(String),
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Parses a rational literal.
pub fn parse_scalar(text: &str) -> Result<Scalar, ScalarParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(ScalarParseError::Empty);
    }
    let (negative, body) = if let Some(rest) = trimmed.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = trimmed.strip_prefix('\u{2212}') {
        (true, rest)
    } else {
        (false, trimmed)
    };
    let malformed = || ScalarParseError::Malformed(trimmed.to_string());
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => {
            let num = parse_digits(n).ok_or_else(malformed)?;
            if d.starts_with('-') || d.starts_with('\u{2212}') {
                return Err(ScalarParseError::NonPositiveDenominator(trimmed.to_string()));
            }
            let den = parse_digits(d).ok_or_else(malformed)?;
            if den.is_zero() {
                return Err(ScalarParseError::NonPositiveDenominator(trimmed.to_string()));
            }
            (num, den)
        }
        None => (parse_digits(body).ok_or_else(malformed)?, BigInt::one()),
    };
    let num = if negative { -num } else { num };
    Ok(BigRational::new(num, den))
}

/// Canonical text: `p` when the denominator is one, `p/q` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn abs(x: &Scalar) -> Scalar {
    x.abs()
}

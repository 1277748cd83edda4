//! Exact rational numbers used for every probability and value.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `num/den` or a bare integer. Rejects zero denominators.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(text.parse().ok()?)),
    }
}

/// Always `num/den`, including for integers (`1/1`).
pub fn format_fraction(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Human-facing exact form: `19/20`, or `1` for integers.
pub fn format_exact(value: &Rational) -> String {
    value.to_string()
}

/// Decimal expansion rounded half-up to `digits` places.
pub fn format_decimal(value: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let negative = value.is_negative();
    let abs = value.abs();
    let scaled = abs * Rational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice = r * 2u32;
    let rounded = if &twice >= scaled.denom() { q + 1u32 } else { q };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let mut out = String::new();
    if negative && !(int_part.is_zero() && frac_part.is_zero()) {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    if digits > 0 {
        out.push('.');
        out.push_str(&format!("{:0>width$}", frac_part.to_string(), width = digits));
    }
    out
}

/// Largest absolute numerator or denominator of a rational.
pub fn height(value: &Rational) -> BigInt {
    let n = value.numer().abs();
    let d = value.denom().clone();
    if n > d {
        n
    } else {
        d
    }
}

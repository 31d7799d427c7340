//! Integer scalar abstraction.
//!
//! Every exact quantity in the crate (polynomial coefficients, matrix entries,
//! symbol counts) is generic over [`Scalar`]. Counts grow geometrically, so the
//! crate-root aliases instantiate everything with [`num_bigint::BigInt`];
//! fixed-width integers such as `i64` also satisfy the bound and are handy for
//! small hand-checked cases, but will overflow on long iterations.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::ToBigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact signed integer usable as a coefficient and count type.
pub trait Scalar:
    Integer
        + Signed
        + Clone
        + Debug
        + Display
        + Hash
        + FromPrimitive
        + ToPrimitive
        + ToBigInt
        + Send
        + Sync
        + 'static
{
}

impl<T> Scalar for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + Hash
        + FromPrimitive
        + ToPrimitive
        + ToBigInt
        + Send
        + Sync
        + 'static
{
}

/// Best-effort `f64` rendering of an exact rational.
pub fn ratio_to_f64<T: Scalar>(r: &Ratio<T>) -> f64 {
    if let Some(f) = r.to_f64() {
        return f;
    }
    // Fall back to the component floats; only reached for types whose Ratio
    // has no direct conversion path.
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) => n / d,
        _ => f64::NAN,
    }
}

/// Parses a decimal literal (`1.5`, `-0.25`, `1e-12`, `3.2E+4`) into an exact rational.
pub fn parse_decimal<T: Scalar>(text: &str) -> Option<Ratio<T>> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let ten = T::from_u8(10)?;
    let mut digits = T::zero();
    for b in int_part.bytes().chain(frac_part.bytes()) {
        digits = digits * ten.clone() + T::from_u8(b - b'0')?;
    }
    let scale = exponent - frac_part.len() as i32;
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    let value = if scale >= 0 {
        Ratio::from_integer(digits * pow)
    } else {
        Ratio::new(digits, pow)
    };
    Some(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Ratio<BigInt> {
        Ratio::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn decimal_forms() {
        assert_eq!(parse_decimal::<BigInt>("1.5"), Some(q(3, 2)));
        assert_eq!(parse_decimal::<BigInt>("-0.25"), Some(q(-1, 4)));
        assert_eq!(parse_decimal::<BigInt>("1e-3"), Some(q(1, 1000)));
        assert_eq!(parse_decimal::<BigInt>("3.2E+2"), Some(q(320, 1)));
        assert_eq!(parse_decimal::<BigInt>(".5"), Some(q(1, 2)));
        assert_eq!(parse_decimal::<BigInt>("7"), Some(q(7, 1)));
        assert_eq!(parse_decimal::<BigInt>(""), None);
        assert_eq!(parse_decimal::<BigInt>("1.2.3"), None);
        assert_eq!(parse_decimal::<BigInt>("abc"), None);
        assert_eq!(parse_decimal::<BigInt>("e5"), None);
    }

    #[test]
    fn float_rendering_of_huge_ratio() {
        let big = BigInt::from(10).pow(400);
        let r = Ratio::new(big.clone() * 3, big * 2);
        assert_eq!(ratio_to_f64(&r), 1.5);
    }
}

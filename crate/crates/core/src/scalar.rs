//! Exact rational and complex-rational scalars.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Complex number with exact rational parts.
pub type Scalar = Complex<Rational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational literal {0:?} (expected \"p/q\" or an integer)")]
pub struct RationalParseError(pub String);

pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn real(value: Rational) -> Scalar {
    Complex::new(value, Rational::zero())
}

pub fn complex(re: Rational, im: Rational) -> Scalar {
    Complex::new(re, im)
}

pub fn imaginary_unit() -> Scalar {
    Complex::new(Rational::zero(), Rational::one())
}

pub fn is_real(value: &Scalar) -> bool {
    value.im.is_zero()
}

/// Exact reciprocal; `None` for zero.
pub fn recip(value: &Scalar) -> Option<Scalar> {
    if value.is_zero() {
        return None;
    }
    let norm = &value.re * &value.re + &value.im * &value.im;
    Some(Complex::new(&value.re / &norm, -&value.im / &norm))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`; the denominator must be nonzero.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let trimmed = text.trim();
    let err = || RationalParseError(text.to_string());
    match trimmed.split_once('/') {
        Some((p, q)) => {
            let numer: BigInt = p.trim().parse().map_err(|_| err())?;
            let denom: BigInt = q.trim().parse().map_err(|_| err())?;
            if denom.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(numer, denom))
        }
        None => {
            let numer: BigInt = trimmed.parse().map_err(|_| err())?;
            Ok(BigRational::from_integer(numer))
        }
    }
}

/// Always renders `p/q` in lowest terms with a positive denominator.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn abs(value: &Rational) -> Rational {
    value.abs()
}

/// Serde adapter storing rationals as `"p/q"` strings.
pub mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), rational(1, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), int(-4));
        assert_eq!(parse_rational("2/-4").unwrap(), rational(-1, 2));
        assert_eq!(format_rational(&rational(2, -4)), "-1/2");
        assert_eq!(format_rational(&int(0)), "0/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn reciprocal() {
        let minus_i = complex(int(0), int(-1));
        assert_eq!(recip(&minus_i).unwrap(), imaginary_unit());
        assert_eq!(recip(&real(int(2))).unwrap(), real(rational(1, 2)));
        assert!(recip(&real(int(0))).is_none());
    }
}

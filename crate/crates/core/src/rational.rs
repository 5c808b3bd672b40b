//! Exact rational masses.
//!
//! Every mass in this crate is an arbitrary-precision rational kept in
//! lowest terms. There is no floating point anywhere on the analytic
//! path; decimals appear only in simulation reports and table output.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, always stored in lowest terms with a
/// positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den` with validation; `den` may be negative, the sign is
    /// normalized onto the numerator.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidRational(format!("{num}/{den}")));
        }
        Ok(Rational(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub(crate) fn from_bigint_ratio(num: BigInt, den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        Rational(BigRational::new(num, den))
    }

    /// Exact `num/den` from counts; `den` must be nonzero.
    pub fn from_counts(num: u64, den: u64) -> Self {
        assert!(den != 0, "count denominator must be nonzero");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Parses either `"p/q"` or a finite decimal such as `"0.25"` or
    /// `"2"`. Decimals convert exactly via their power-of-ten
    /// denominator, so `"0.25"` becomes `1/4`.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        let invalid = || Error::InvalidRational(text.to_string());
        if s.is_empty() {
            return Err(invalid());
        }
        if let Some((num, den)) = s.split_once('/') {
            let n = BigInt::from_str(num.trim()).map_err(|_| invalid())?;
            let d = BigInt::from_str(den.trim()).map_err(|_| invalid())?;
            if d.is_zero() {
                return Err(invalid());
            }
            return Ok(Rational(BigRational::new(n, d)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if int_part.is_empty()
                || frac_part.is_empty()
                || !frac_part.bytes().all(|b| b.is_ascii_digit())
            {
                return Err(invalid());
            }
            // "-0.5" -> "-05" / 10; the sign stays on the front.
            let digits = format!("{int_part}{frac_part}");
            let n = BigInt::from_str(&digits).map_err(|_| invalid())?;
            let d = BigInt::from(10u32).pow(frac_part.len() as u32);
            return Ok(Rational(BigRational::new(n, d)));
        }
        let n = BigInt::from_str(s).map_err(|_| invalid())?;
        Ok(Rational(BigRational::from_integer(n)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Nearest `f64`, for display and report purposes only.
    pub fn approx(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    /// Always `p/q`, even for integers (`1` prints as `1/1`), so that
    /// serialized masses are uniformly exact.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

macro_rules! binop {
    ($Op:ident, $method:ident) => {
        impl $Op for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $Op<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $Op<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $Op<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a rational as a string, e.g. \"2/3\" or \"0.25\"")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        Rational::parse(v).map_err(|e| E::custom(e.to_string()))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_str(RationalVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(Rational::parse("2/3").unwrap(), Rational::new(2, 3).unwrap());
        assert_eq!(Rational::parse("0.25").unwrap(), Rational::new(1, 4).unwrap());
        assert_eq!(Rational::parse("1").unwrap(), Rational::one());
        assert_eq!(Rational::parse("1.0").unwrap(), Rational::one());
        assert_eq!(Rational::parse("-0.5").unwrap(), Rational::new(-1, 2).unwrap());
        assert_eq!(Rational::parse(" 4/6 ").unwrap(), Rational::new(2, 3).unwrap());
    }

    #[test]
    fn rejects_malformed_text() {
        for bad in ["", "1/0", "a", "1e3", "1.", ".5", "1/", "/2", "1.2.3"] {
            assert!(Rational::parse(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn display_is_always_p_over_q() {
        assert_eq!(Rational::one().to_string(), "1/1");
        assert_eq!(Rational::new(4, 6).unwrap().to_string(), "2/3");
        assert_eq!(Rational::new(1, -2).unwrap().to_string(), "-1/2");
    }

    #[test]
    fn arithmetic_is_exact() {
        let third = Rational::new(1, 3).unwrap();
        let sum = &third + &third + third;
        assert_eq!(sum, Rational::one());
    }

    #[test]
    fn serde_round_trips_as_string() {
        let r = Rational::new(2, 3).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, "\"2/3\"");
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        // Bare numbers are rejected: exactness demands strings.
        assert!(serde_json::from_str::<Rational>("0.25").is_err());
    }
}

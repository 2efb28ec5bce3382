//! Exact rationals with a JSON form `{"num": .., "den": .., "float": ..}`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactValue(BigRational);

impl ExactValue {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(Self(BigRational::new(num.into(), den.into())))
    }

    pub fn int(v: i64) -> Self {
        Self(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self(r)
    }

    pub fn rational(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = BigRational::one();
        for _ in 0..e {
            acc *= &self.0;
        }
        Self(acc)
    }
}

impl FromStr for ExactValue {
    type Err = Error;

    /// Accepts `p`, `p/q` and finite decimals such as `2.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Self(BigRational::new(p, q)));
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(Self(BigRational::new(digits, den)));
        }
        let p: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Self(BigRational::from_integer(p)))
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    num: String,
    den: String,
    float: f64,
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr {
            num: self.0.numer().to_string(),
            den: self.0.denom().to_string(),
            float: self.to_f64(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = Repr::deserialize(d)?;
        let num: BigInt = r.num.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = r.den.parse().map_err(serde::de::Error::custom)?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Self(BigRational::new(num, den)))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactValue {
            type Output = ExactValue;
            fn $m(self, o: ExactValue) -> ExactValue {
                ExactValue(self.0.$m(o.0))
            }
        }
        impl<'a> $tr<&'a ExactValue> for &'a ExactValue {
            type Output = ExactValue;
            fn $m(self, o: &'a ExactValue) -> ExactValue {
                ExactValue((&self.0).$m(&o.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for ExactValue {
    type Output = ExactValue;
    fn neg(self) -> ExactValue {
        ExactValue(-self.0)
    }
}

impl From<i64> for ExactValue {
    fn from(v: i64) -> Self {
        Self::int(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("3".parse::<ExactValue>().unwrap(), ExactValue::int(3));
        assert_eq!(
            "6/4".parse::<ExactValue>().unwrap(),
            ExactValue::new(3, 2).unwrap()
        );
        assert_eq!(
            "2.25".parse::<ExactValue>().unwrap(),
            ExactValue::new(9, 4).unwrap()
        );
        assert!("1/0".parse::<ExactValue>().is_err());
        assert!("x".parse::<ExactValue>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let v = ExactValue::new(-7, 15).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"num\":\"-7\""));
        let back: ExactValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qpoly::Exp;

/// An element of `Z/2`, stored as its double.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// The integer value, if there is one.
    pub const fn to_int(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.twice / 2)
        } else {
            None
        }
    }

    pub fn to_exp(self) -> Exp {
        Ratio::new(self.twice, 2)
    }

    pub fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }

    /// Converts an exact rational with denominator 1 or 2.
    pub fn from_exp(r: Exp) -> Option<Self> {
        match *r.denom() {
            1 => Some(HalfInt::from_int(*r.numer())),
            2 => Some(HalfInt::from_twice(*r.numer())),
            _ => None,
        }
    }
}

impl From<i64> for HalfInt {
    fn from(n: i64) -> Self {
        HalfInt::from_int(n)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + rhs.twice }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - rhs.twice }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_int() {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "{}/2", self.twice),
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `3`, `-1/2`, `6/4` and `1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a half-integer: {s:?}"));
        let r: Exp = if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ratio::new(n, d)
        } else if let Some((w, frac)) = s.split_once('.') {
            let neg = w.starts_with('-');
            let w: i64 = if w == "-" || w.is_empty() { 0 } else { w.parse().map_err(|_| bad())? };
            let frac = frac.trim_end_matches('0');
            let half = match frac {
                "" => 0,
                "5" => 1,
                _ => return Err(bad()),
            };
            let twice = 2 * w + if neg { -half } else { half };
            Ratio::new(twice, 2)
        } else {
            Ratio::from_integer(s.parse().map_err(|_| bad())?)
        };
        HalfInt::from_exp(r).ok_or_else(bad)
    }
}

#[derive(Serialize, Deserialize)]
struct RatRepr {
    num: i64,
    den: i64,
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = self.to_exp();
        RatRepr { num: *r.numer(), den: *r.denom() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RatRepr::deserialize(d)?;
        if r.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        HalfInt::from_exp(Ratio::new(r.num, r.den))
            .ok_or_else(|| serde::de::Error::custom("denominator must divide 2"))
    }
}

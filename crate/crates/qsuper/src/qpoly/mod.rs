//! Sparse Laurent polynomials in `q` with rational exponents and big integer
//! coefficients, plus the q-binomial primitives.

mod binomial;
mod halfint;

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use binomial::{binomial, gaussian, pochhammer, qbinomial};
pub use halfint::HalfInt;

/// Exponent of `q`. Every exponent in the library has a small denominator.
pub type Exp = Ratio<i64>;

pub fn exp(n: i64, d: i64) -> Exp {
    Ratio::new(n, d)
}

pub fn int_exp(n: i64) -> Exp {
    Ratio::from_integer(n)
}

/// Canonical form: no zero coefficients are stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct QPoly {
    terms: BTreeMap<Exp, BigInt>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        QPoly::monomial(int_exp(0), BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        QPoly::monomial(int_exp(0), c.into())
    }

    /// `c q^e`.
    pub fn monomial(e: Exp, c: impl Into<BigInt>) -> Self {
        let mut p = QPoly::zero();
        p.add_term(e, c.into());
        p
    }

    /// `q^e`.
    pub fn q_pow(e: Exp) -> Self {
        QPoly::monomial(e, 1)
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exp, C)>,
        C: Into<BigInt>,
    {
        let mut p = QPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    /// Dense coefficient list `c_0 + c_1 q + ...`, shifted by `q^offset`.
    pub fn from_dense(offset: Exp, coeffs: &[BigInt]) -> Self {
        let mut terms = BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(offset + int_exp(i as i64), c.clone());
            }
        }
        QPoly { terms }
    }

    pub fn add_term(&mut self, e: Exp, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exp, &BigInt)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exp) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<Exp> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<Exp> {
        self.terms.keys().next_back().copied()
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: Exp) -> QPoly {
        if e.is_zero() {
            return self.clone();
        }
        QPoly { terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> QPoly {
        if c.is_zero() {
            return QPoly::zero();
        }
        QPoly { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// `q -> 1/q`.
    pub fn substitute_recip(&self) -> QPoly {
        QPoly { terms: self.terms.iter().map(|(k, c)| (-k, c.clone())).collect() }
    }

    /// Value at `q = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Drops every term with exponent above `order`.
    pub fn truncate(&self, order: Exp) -> QPoly {
        QPoly { terms: self.terms.range(..=order).map(|(k, c)| (*k, c.clone())).collect() }
    }

    /// Product with terms above `order` discarded.
    pub fn mul_truncated(&self, other: &QPoly, order: Exp) -> QPoly {
        let mut out = QPoly::zero();
        let Some(lo_b) = other.min_exp() else {
            return out;
        };
        for (ea, ca) in self.terms.range(..=order - lo_b) {
            for (eb, cb) in other.terms.range(..=order - ea) {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }

    /// True when every exponent is an integer.
    pub fn has_integer_exponents(&self) -> bool {
        self.terms.keys().all(|e| e.is_integer())
    }

    /// True when every coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// Long division from the lowest term up; exponents of `self` and `d` may
    /// be fractional as long as the quotient has finitely many terms.
    pub fn div_exact(&self, d: &QPoly) -> Option<QPoly> {
        let (d_lo, d_lc) = {
            let (e, c) = d.terms.iter().next()?;
            (*e, c.clone())
        };
        let d_hi = d.max_exp()?;
        let mut rem = self.clone();
        let mut quot = QPoly::zero();
        let Some(top) = self.max_exp() else {
            return Some(quot);
        };
        while let Some((&e, c)) = rem.terms.iter().next() {
            let qe = e - d_lo;
            // A quotient term above top - d_hi cannot be cancelled later.
            if qe + d_hi > top {
                return None;
            }
            let (qc, r) = c.div_rem(&d_lc);
            if !r.is_zero() {
                return None;
            }
            for (de, dc) in &d.terms {
                rem.add_term(qe + de, -(&qc * dc));
            }
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    pub fn pow(&self, n: u32) -> QPoly {
        let mut acc = QPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn fmt_exp(e: &Exp) -> String {
    if e.is_integer() {
        if e.is_negative() {
            format!("({})", e.numer())
        } else {
            e.numer().to_string()
        }
    } else {
        format!("({}/{})", e.numer(), e.denom())
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if e.is_zero() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            if e.is_one() {
                write!(f, "q")?;
            } else {
                write!(f, "q^{}", fmt_exp(e))?;
            }
        }
        Ok(())
    }
}

impl Serialize for QPoly {
    /// Sorted array of `[exp_num, exp_den, "coefficient"]`.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&(*e.numer(), *e.denom(), c.to_string()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for QPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(i64, i64, String)> = Vec::deserialize(d)?;
        let mut p = QPoly::zero();
        for (n, den, c) in raw {
            if den == 0 {
                return Err(D::Error::custom("zero exponent denominator"));
            }
            let c: BigInt = c.parse().map_err(D::Error::custom)?;
            p.add_term(Ratio::new(n, den), c);
        }
        Ok(p)
    }
}

impl Add<&QPoly> for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for QPoly {
    type Output = QPoly;
    fn add(mut self, rhs: QPoly) -> QPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&QPoly> for QPoly {
    fn add_assign(&mut self, rhs: &QPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl AddAssign for QPoly {
    fn add_assign(&mut self, rhs: QPoly) {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
    }
}

impl SubAssign<&QPoly> for QPoly {
    fn sub_assign(&mut self, rhs: &QPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl Sub<&QPoly> for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for QPoly {
    type Output = QPoly;
    fn sub(mut self, rhs: QPoly) -> QPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }
}

impl Neg for QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        -&self
    }
}

impl Mul<&QPoly> for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        let mut out = QPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Mul for QPoly {
    type Output = QPoly;
    fn mul(self, rhs: QPoly) -> QPoly {
        &self * &rhs
    }
}

impl Sum for QPoly {
    fn sum<I: Iterator<Item = QPoly>>(iter: I) -> QPoly {
        let mut acc = QPoly::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}

impl<'a> Sum<&'a QPoly> for QPoly {
    fn sum<I: Iterator<Item = &'a QPoly>>(iter: I) -> QPoly {
        let mut acc = QPoly::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}

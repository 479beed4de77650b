//! The `q = 1` family of commuting incidence matrices and its supernomial
//! identity.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qpoly::HalfInt;
use crate::supernomial::{supernomial_q1, LVec};

/// Square matrix of size `p - 1`, indexed from 1 in the public API.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncMatrix {
    pub size: usize,
    pub entries: Vec<Vec<BigInt>>,
}

impl IncMatrix {
    pub fn zero(size: usize) -> Self {
        IncMatrix { size, entries: vec![vec![BigInt::zero(); size]; size] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zero(size);
        for i in 0..size {
            m.entries[i][i] = BigInt::one();
        }
        m
    }

    fn from_fn(size: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::zero(size);
        for a in 1..=size {
            for b in 1..=size {
                if f(a, b) {
                    m.entries[a - 1][b - 1] = BigInt::one();
                }
            }
        }
        m
    }

    /// Path-graph incidence, `I_{a,b} = delta_{|a-b|,1}`.
    pub fn incidence(size: usize) -> Self {
        Self::from_fn(size, |a, b| a.abs_diff(b) == 1)
    }

    /// `Y_{a,b} = delta_{a, p-b}` with `p = size + 1`.
    pub fn reflection(size: usize) -> Self {
        Self::from_fn(size, |a, b| a + b == size + 1)
    }

    /// Entry `(a, b)`, 1-based.
    pub fn get(&self, a: usize, b: usize) -> &BigInt {
        &self.entries[a - 1][b - 1]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::identity(self.size);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Mul for &IncMatrix {
    type Output = IncMatrix;
    fn mul(self, rhs: &IncMatrix) -> IncMatrix {
        let n = self.size;
        let mut out = IncMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let x = &self.entries[i][k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i][j] += x * &rhs.entries[k][j];
                }
            }
        }
        out
    }
}

impl Add for &IncMatrix {
    type Output = IncMatrix;
    fn add(self, rhs: &IncMatrix) -> IncMatrix {
        let mut out = self.clone();
        for (row, r) in out.entries.iter_mut().zip(&rhs.entries) {
            for (x, y) in row.iter_mut().zip(r) {
                *x += y;
            }
        }
        out
    }
}

impl Sub for &IncMatrix {
    type Output = IncMatrix;
    fn sub(self, rhs: &IncMatrix) -> IncMatrix {
        let mut out = self.clone();
        for (row, r) in out.entries.iter_mut().zip(&rhs.entries) {
            for (x, y) in row.iter_mut().zip(r) {
                *x -= y;
            }
        }
        out
    }
}

/// `A_0, ..., A_{p-2}` with `A_{k+1} = A_k A_1 - A_{k-1}`.
pub fn build_family(p: i64) -> Result<Vec<IncMatrix>> {
    if p < 4 {
        return Err(Error::InvalidParams(format!("need p >= 4, got {p}")));
    }
    let size = (p - 1) as usize;
    let a1 = IncMatrix::incidence(size);
    let mut fam = vec![IncMatrix::identity(size), a1.clone()];
    for k in 1..size - 1 {
        let next = &(&fam[k] * &a1) - &fam[k - 1];
        fam.push(next);
    }
    Ok(fam)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub p: i64,
    pub symmetric: bool,
    pub commuting: bool,
    pub top_is_reflection: bool,
    pub reflection_rule: bool,
}

impl FamilyReport {
    pub fn all(&self) -> bool {
        self.symmetric && self.commuting && self.top_is_reflection && self.reflection_rule
    }
}

/// Checks symmetry, pairwise commutation, `A_{p-2} = Y` and `A_k Y = A_{p-k-2}`.
pub fn family_properties(p: i64) -> Result<FamilyReport> {
    let fam = build_family(p)?;
    let n = fam.len();
    let y = IncMatrix::reflection(fam[0].size);
    Ok(FamilyReport {
        p,
        symmetric: fam.iter().all(IncMatrix::is_symmetric),
        commuting: (0..n).all(|i| (0..i).all(|j| &fam[i] * &fam[j] == &fam[j] * &fam[i])),
        top_is_reflection: fam[n - 1] == y,
        reflection_rule: (0..n).all(|k| &fam[k] * &y == fam[n - 1 - k]),
    })
}

fn check_args(p: i64, l: &LVec, a: i64, b: i64) -> Result<()> {
    if p < 4 || l.n() as i64 != p - 3 || !l.is_nonneg() {
        return Err(Error::InvalidParams(format!("need p >= 4 and L >= 0 of length p - 3; got p = {p}, L = {l}")));
    }
    if !(1..p).contains(&a) || !(1..p).contains(&b) {
        return Err(Error::InvalidParams(format!("need 1 <= a, b <= p - 1; got a = {a}, b = {b}")));
    }
    let odd: i64 = l.as_slice().iter().step_by(2).sum();
    if (a + b + odd).rem_euclid(2) != 0 {
        return Err(Error::InvalidParams(format!("a + b + L_1 + L_3 + ... = {} is odd", a + b + odd)));
    }
    Ok(())
}

/// `(A_1^{L_1} ... A_{p-3}^{L_{p-3}})_{a,b}`.
pub fn matrix_product_entry(p: i64, l: &LVec, a: i64, b: i64) -> Result<BigInt> {
    check_args(p, l, a, b)?;
    let fam = build_family(p)?;
    let mut acc = IncMatrix::identity(fam[0].size);
    for (k, &lk) in l.as_slice().iter().enumerate() {
        acc = &acc * &fam[k + 1].pow(lk as u64);
    }
    Ok(acc.get(a as usize, b as usize).clone())
}

/// `sum_j {binom(L; (b-a)/2 + pj) - binom(L; (b+a)/2 + pj)}`.
pub fn alternating_supernomial_sum(p: i64, l: &LVec, a: i64, b: i64) -> Result<BigInt> {
    check_args(p, l, a, b)?;
    // Supernomials vanish outside |index| <= ell_N / 2.
    let reach = (l.ell_n() + 2 * p) / (2 * p) + 1;
    let mut acc = BigInt::zero();
    for j in -reach..=reach {
        acc += supernomial_q1(l, HalfInt::from_twice(b - a + 2 * p * j))?;
        acc -= supernomial_q1(l, HalfInt::from_twice(b + a + 2 * p * j))?;
    }
    Ok(acc)
}

pub fn matrix_identity_check(p: i64, l: &LVec, a: i64, b: i64) -> Result<bool> {
    Ok(matrix_product_entry(p, l, a, b)? == alternating_supernomial_sum(p, l, a, b)?)
}

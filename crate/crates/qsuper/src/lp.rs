//! Exact rational linear programming: maximize `c.x` subject to `A x <= b`, `x >= 0`.
//!
//! Dense two-phase simplex with Bland's rule, so it terminates without cycling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal(BigRational),
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &BigRational {
        &self.rows[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `obj` over columns `< allowed`; returns false when unbounded.
    fn optimize(&mut self, obj: &[BigRational], allowed: usize) -> bool {
        loop {
            let mut enter = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut red = obj[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !obj[bi].is_zero() && !self.rows[i][j].is_zero() {
                        red -= &obj[bi] * &self.rows[i][j];
                    }
                }
                if red.is_positive() {
                    enter = Some(j);
                    break;
                }
            }
            let Some(c) = enter else {
                return true;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn value(&self, obj: &[BigRational]) -> BigRational {
        self.basis.iter().enumerate().map(|(i, &b)| &obj[b] * self.rhs(i)).sum()
    }
}

/// Maximizes `c.x` over `{x >= 0 : A x <= b}` with integer data.
pub fn maximize(a: &[Vec<i64>], b: &[i64], c: &[i64]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let r = |x: i64| BigRational::from_integer(BigInt::from(x));
    let n_art = b.iter().filter(|&&x| x < 0).count();
    let cols = n + m + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = n + m;
    for i in 0..m {
        let sign = if b[i] < 0 { -1 } else { 1 };
        let mut row = vec![BigRational::zero(); cols + 1];
        for j in 0..n {
            row[j] = r(sign * a[i][j]);
        }
        row[n + i] = r(sign);
        row[cols] = r(sign * b[i]);
        if sign < 0 {
            row[art] = BigRational::one();
            basis.push(art);
            art += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut tab = Tableau { rows, basis, cols };

    if n_art > 0 {
        let mut phase1 = vec![BigRational::zero(); cols];
        for x in phase1.iter_mut().skip(n + m) {
            *x = -BigRational::one();
        }
        tab.optimize(&phase1, cols);
        if tab.value(&phase1).is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n + m {
                match (0..n + m).find(|&j| !tab.rows[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut obj = vec![BigRational::zero(); cols];
    for j in 0..n {
        obj[j] = r(c[j]);
    }
    if !tab.optimize(&obj, n + m) {
        return LpOutcome::Unbounded;
    }
    LpOutcome::Optimal(tab.value(&obj))
}

//! Complete enumeration of `(m, n)`-systems `n = (v - B m)/2`, `m >= 0`.
//!
//! A point contributes to `prod_j [m_j + n_j; m_j]` only when every row is
//! either positive (`n_j >= 0`) or negative (`m_j + n_j <= -1`). Each sign
//! pattern is a polyhedron; an exact LP bounds it, so the enumeration box is
//! proven to contain the whole support.

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lp::{maximize, LpOutcome};
use crate::qpoly::QPoly;

/// Default cap on lattice points visited.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MnSystem {
    pub b: Vec<Vec<i64>>,
    pub v: Vec<i64>,
    /// Required residue of each `m_i` modulo 2, if any.
    pub parity: Vec<Option<i64>>,
}

impl MnSystem {
    pub fn new(b: Vec<Vec<i64>>, v: Vec<i64>, parity: Vec<Option<i64>>) -> Result<Self> {
        let t = v.len();
        if b.len() != t || b.iter().any(|r| r.len() != t) || parity.len() != t {
            return Err(Error::InvalidParams("(m,n)-system dimensions disagree".into()));
        }
        Ok(MnSystem { b, v, parity })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// `I_B = 2I - B`.
    fn incidence(&self) -> Vec<Vec<i64>> {
        let t = self.dim();
        (0..t).map(|i| (0..t).map(|j| 2 * i64::from(i == j) - self.b[i][j]).collect()).collect()
    }

    /// Componentwise upper bounds on `m` over every parity class and sign
    /// pattern, or `None` when no class is feasible.
    ///
    /// Writing `m = r + 2w` with `r` the residue class makes `n` integral, so
    /// each LP is over `w`: a positive row needs `(B w)_j <= c_j` and a
    /// negative row `(I_B w)_j <= -1 - c_j - r_j`, where `c = (v - B r)/2`.
    pub fn support_box(&self) -> Result<Option<Vec<i64>>> {
        let t = self.dim();
        if t == 0 {
            return Ok(Some(Vec::new()));
        }
        let ib = self.incidence();
        let mut bound: Option<Vec<i64>> = None;
        for class in 0u32..(1 << t) {
            let r: Vec<i64> = (0..t).map(|i| i64::from(class >> i & 1 == 1)).collect();
            if (0..t).any(|i| self.parity[i].is_some_and(|p| p.rem_euclid(2) != r[i])) {
                continue;
            }
            let twice: Vec<i64> =
                (0..t).map(|j| self.v[j] - (0..t).map(|i| self.b[j][i] * r[i]).sum::<i64>()).collect();
            if twice.iter().any(|x| x.is_odd()) {
                continue;
            }
            let c: Vec<i64> = twice.iter().map(|x| x / 2).collect();
            'pattern: for mask in 0u32..(1 << t) {
                let mut a = Vec::with_capacity(t);
                let mut rhs = Vec::with_capacity(t);
                for j in 0..t {
                    if mask >> j & 1 == 1 {
                        let limit = -1 - c[j] - r[j];
                        if ib[j].iter().all(|&x| x >= 0) && limit < 0 {
                            continue 'pattern;
                        }
                        a.push(ib[j].clone());
                        rhs.push(limit);
                    } else {
                        a.push(self.b[j].clone());
                        rhs.push(c[j]);
                    }
                }
                let mut hi = Vec::with_capacity(t);
                for i in 0..t {
                    let mut obj = vec![0; t];
                    obj[i] = 1;
                    match maximize(&a, &rhs, &obj) {
                        LpOutcome::Infeasible => continue 'pattern,
                        LpOutcome::Unbounded => {
                            return Err(Error::Unbounded(format!(
                                "m_{} is unbounded for B = {:?}, v = {:?}, class {r:?}, sign pattern {mask:b}",
                                i + 1,
                                self.b,
                                self.v
                            )))
                        }
                        LpOutcome::Optimal(x) => {
                            let w = x.floor().to_integer().to_i64();
                            let w = w.ok_or_else(|| Error::Budget("support bound overflows".into()))?;
                            hi.push(r[i] + 2 * w);
                        }
                    }
                }
                bound = Some(match bound {
                    None => hi,
                    Some(b) => b.into_iter().zip(hi).map(|(x, y)| x.max(y)).collect(),
                });
            }
        }
        Ok(bound)
    }

    /// Calls `visit(m, n)` on every point of the support, in lexicographic order of `m`.
    pub fn for_each<F: FnMut(&[i64], &[i64])>(&self, budget: u64, mut visit: F) -> Result<u64> {
        let t = self.dim();
        let Some(hi) = self.support_box()? else {
            return Ok(0);
        };
        if t == 0 {
            visit(&[], &[]);
            return Ok(1);
        }
        // Row j is checked once its last nonzero column is assigned.
        let mut rows_at: Vec<Vec<usize>> = vec![Vec::new(); t];
        for j in 0..t {
            let last = (0..t).rev().find(|&i| self.b[j][i] != 0).unwrap_or(0).max(j);
            rows_at[last].push(j);
        }
        let mut m = vec![0i64; t];
        let mut n = vec![0i64; t];
        let mut visited = 0u64;
        let mut hits = 0u64;
        #[allow(clippy::too_many_arguments)]
        fn rec<F: FnMut(&[i64], &[i64])>(
            s: &MnSystem,
            i: usize,
            hi: &[i64],
            rows_at: &[Vec<usize>],
            m: &mut Vec<i64>,
            n: &mut Vec<i64>,
            visited: &mut u64,
            hits: &mut u64,
            budget: u64,
            visit: &mut F,
        ) -> Result<()> {
            let t = m.len();
            if i == t {
                visit(m, n);
                *hits += 1;
                return Ok(());
            }
            let start = match s.parity[i] {
                Some(p) => p.rem_euclid(2),
                None => 0,
            };
            let step = if s.parity[i].is_some() { 2 } else { 1 };
            let mut x = start;
            while x <= hi[i] {
                *visited += 1;
                if *visited > budget {
                    return Err(Error::Budget(format!("visited more than {budget} lattice points")));
                }
                m[i] = x;
                let mut ok = true;
                for &j in &rows_at[i] {
                    let bm: i64 = (0..t).map(|c| s.b[j][c] * m[c]).sum();
                    let twice = s.v[j] - bm;
                    if twice.is_odd() {
                        ok = false;
                        break;
                    }
                    let nj = twice / 2;
                    if !(nj >= 0 || m[j] + nj <= -1) {
                        ok = false;
                        break;
                    }
                    n[j] = nj;
                }
                if ok {
                    rec(s, i + 1, hi, rows_at, m, n, visited, hits, budget, visit)?;
                }
                x += step;
            }
            Ok(())
        }
        rec(self, 0, &hi, &rows_at, &mut m, &mut n, &mut visited, &mut hits, budget, &mut visit)?;
        Ok(hits)
    }

    /// Sums `term(m, n)` over the support.
    pub fn sum<F: FnMut(&[i64], &[i64]) -> QPoly>(&self, budget: u64, mut term: F) -> Result<QPoly> {
        let mut acc = QPoly::zero();
        self.for_each(budget, |m, n| acc += term(m, n))?;
        Ok(acc)
    }
}

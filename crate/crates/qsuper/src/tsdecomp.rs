//! Takahashi-Suzuki decomposition of `p/k`.

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

/// Continued fraction data `(n, nu)` with
/// `p/k = 1 + nu_0 + 1/(nu_1 + ... + 1/(nu_n + 2))`.
pub fn continued_fraction(p: i64, k: i64) -> Result<(usize, Vec<i64>)> {
    if !(k > 0 && 2 * k < p) {
        return Err(Error::InvalidParams(format!("need 0 < 2k < p, got p = {p}, k = {k}")));
    }
    if p.gcd(&k) != 1 {
        return Err(Error::InvalidParams(format!("gcd({p}, {k}) != 1")));
    }
    // Regular expansion; its last partial quotient is >= 2 unless it is the only one.
    let mut c = Vec::new();
    let (mut x, mut y) = (p, k);
    while y != 0 {
        c.push(x / y);
        (x, y) = (y, x % y);
    }
    let n = c.len() - 1;
    if n == 0 {
        return Ok((0, vec![c[0] - 3]));
    }
    let mut nu = c.clone();
    nu[0] -= 1;
    nu[n] -= 2;
    Ok((n, nu))
}

/// Evaluates the continued fraction for `(n, nu)`.
pub fn reconstruct(n: usize, nu: &[i64]) -> Ratio<i64> {
    let mut x = Ratio::from_integer(nu[n] + 2);
    if n == 0 {
        return x + 1;
    }
    for m in (1..n).rev() {
        x = Ratio::from_integer(nu[m]) + x.recip();
    }
    Ratio::from_integer(1 + nu[0]) + x.recip()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TsData {
    pub p: i64,
    pub k: i64,
    pub n: usize,
    pub nu: Vec<i64>,
    /// `t_0 = -1, t_1, ..., t_{n+1}`.
    pub t: Vec<i64>,
    pub ib: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
    /// `y_{-1}, y_0, ..., y_{n+1}`.
    pub y: Vec<i64>,
    pub ybar: Vec<i64>,
    /// `l_1, ..., l_{t_{n+1}+2}`; entry `j` is `l_{j+1}`.
    pub taka: Vec<i64>,
    pub takabar: Vec<i64>,
    /// `Q^{(1)}, ..., Q^{(t_{n+1}+1)}`, each of length `t_{n+1}`.
    pub q: Vec<Vec<i64>>,
}

impl TsData {
    /// `t_{n+1}`, the rank of `B`.
    pub fn size(&self) -> usize {
        self.t[self.n + 1] as usize
    }

    pub fn t_m(&self, m: usize) -> i64 {
        self.t[m]
    }

    /// `y_m` for `-1 <= m <= n+1`.
    pub fn y_m(&self, m: i64) -> i64 {
        self.y[(m + 1) as usize]
    }

    pub fn ybar_m(&self, m: i64) -> i64 {
        self.ybar[(m + 1) as usize]
    }

    /// The zone `m` with `t_m < j <= t_{m+1} + delta_{m,n}`, for `0 <= j <= t_{n+1} + 1`.
    pub fn zone(&self, j: i64) -> usize {
        (0..=self.n)
            .find(|&m| self.t[m] < j && j <= self.t[m + 1] + i64::from(m == self.n))
            .expect("index within the Takahashi range")
    }

    /// `l_{j+1}`.
    pub fn taka(&self, j: usize) -> i64 {
        self.taka[j]
    }

    pub fn takabar(&self, j: usize) -> i64 {
        self.takabar[j]
    }

    /// `alpha` with `l_{alpha+1} = v`.
    pub fn takahashi_index(&self, v: i64) -> Option<usize> {
        self.taka.iter().position(|&x| x == v)
    }

    /// `Q^{(j)}` for `1 <= j <= t_{n+1} + 1`.
    pub fn q_vec(&self, j: usize) -> &[i64] {
        &self.q[j - 1]
    }
}

pub fn build_ts(p: i64, k: i64) -> Result<TsData> {
    let (n, nu) = continued_fraction(p, k)?;
    let mut t = vec![-1i64];
    for m in 1..=n + 1 {
        t.push(nu[..m].iter().sum());
    }
    let size = t[n + 1] as usize;
    let last_zero = nu[n] == 0;

    let mut ib = vec![vec![0i64; size]; size];
    let special_rows: Vec<i64> = (1..=n - usize::from(last_zero).min(n)).map(|m| t[m]).collect();
    for i in 1..=size {
        let row = &mut ib[i - 1];
        let mut put = |j: usize, v: i64| {
            if (1..=size).contains(&j) {
                row[j - 1] += v;
            }
        };
        if i == size {
            put(i - 1, 1);
            if last_zero {
                put(i, 1);
            }
        } else if special_rows.contains(&(i as i64)) {
            put(i - 1, 1);
            put(i, 1);
            put(i + 1, -1);
        } else {
            put(i - 1, 1);
            put(i + 1, 1);
        }
    }
    let b = (0..size)
        .map(|i| (0..size).map(|j| 2 * i64::from(i == j) - ib[i][j]).collect())
        .collect();

    let mut y = vec![0i64, 1];
    let mut ybar = vec![-1i64, 1];
    for m in 0..=n {
        let f = nu[m] + 2 * i64::from(m == n) + i64::from(m == 0);
        y.push(y[m] + f * y[m + 1]);
        ybar.push(ybar[m] + f * ybar[m + 1]);
    }

    let mut taka = vec![0i64; size + 2];
    let mut takabar = vec![0i64; size + 2];
    for m in 0..=n {
        let hi = t[m + 1] + i64::from(m == n);
        for j in t[m] + 1..=hi {
            taka[j as usize] = y[m] + (j - t[m]) * y[m + 1];
            takabar[j as usize] = ybar[m] + (j - t[m]) * ybar[m + 1];
        }
    }

    let mut data = TsData { p, k, n, nu, t, ib, b, y, ybar, taka, takabar, q: Vec::new() };
    data.q = (1..=size + 1).map(|j| q_vector(&data, j as i64)).collect();
    Ok(data)
}

/// `Q^{(j)}` by the three-branch recursion; branch ranges are half-open and
/// disjoint, and components outside `1..=t_{n+1}` read as zero.
fn q_vector(d: &TsData, j: i64) -> Vec<i64> {
    let size = d.size() as i64;
    let m = d.zone(j);
    let mut q = vec![0i64; size as usize + 2];
    for i in (1..=size).rev() {
        if i >= j {
            q[i as usize] = 0;
        } else if d.t[m] <= i {
            q[i as usize] = j - i;
        }
    }
    let special = d.nu[d.n] == 0 && j == d.t[d.n] + 1;
    for mp in (1..=m).rev() {
        let pivot = d.t[mp] + 1;
        for i in (d.t[mp - 1]..d.t[mp]).rev() {
            if (1..=size).contains(&i) {
                let pv = if special && pivot == d.t[d.n] + 1 { 0 } else { q[pivot as usize] };
                q[i as usize] = q[i as usize + 1] + pv;
            }
        }
    }
    if special && (1..=size).contains(&j) {
        q[j as usize] = 0;
    }
    q[1..=size as usize].to_vec()
}

//! Both sides of the Andrews-Gordon finitizations and of the continued
//! fraction boson-fermion identities.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mnsystem::MnSystem;
use crate::qpoly::{exp, int_exp, qbinomial, Exp, HalfInt, QPoly};
use crate::supernomial::{big_t, q_supernomial, LVec};
use crate::tsdecomp::{build_ts, TsData};

pub use crate::mnsystem::DEFAULT_BUDGET;

/// Tadpole Cartan-type matrix `T` of size `n`.
pub fn tadpole(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        2 - i64::from(j == n - 1)
                    } else if i.abs_diff(j) == 1 {
                        -1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect()
}

fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn quarter_form(m: &[Vec<i64>], x: &[i64]) -> Exp {
    let bx = mat_vec(m, x);
    exp(x.iter().zip(&bx).map(|(a, b)| a * b).sum(), 4)
}

fn unit(dim: usize, i: i64) -> Vec<i64> {
    let mut v = vec![0; dim];
    if i >= 1 && i as usize <= dim {
        v[i as usize - 1] = 1;
    }
    v
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn qbin_product(m: &[i64], n: &[i64]) -> QPoly {
    let mut p = QPoly::one();
    for (&mj, &nj) in m.iter().zip(n) {
        p = &p * &qbinomial(mj + nj, mj);
        if p.is_zero() {
            break;
        }
    }
    p
}

// ---------------------------------------------------------------------------
// Andrews-Gordon finitizations.

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgParams {
    pub k: usize,
    pub a: i64,
    pub m: Vec<i64>,
}

impl AgParams {
    pub fn new(k: usize, a: i64, m: Vec<i64>) -> Result<Self> {
        if k == 0 || m.len() != k || !(1..=k as i64 + 1).contains(&a) {
            return Err(Error::InvalidParams(format!("need k >= 1, 1 <= a <= k+1 and |M| = k; got k = {k}, a = {a}")));
        }
        Ok(AgParams { k, a, m })
    }

    /// `L = T M - e_{a-1} + e_k`.
    pub fn l_vec(&self) -> LVec {
        let mut l = mat_vec(&tadpole(self.k), &self.m);
        l = add(&l, &unit(self.k, self.k as i64));
        if self.a >= 2 {
            l[self.a as usize - 2] -= 1;
        }
        LVec::new(l).expect("k >= 1")
    }

    fn with_m(&self, m: Vec<i64>) -> AgParams {
        AgParams { k: self.k, a: self.a, m }
    }
}

/// `P(M)` from the `n`-sum; `m_j = M_j - 2(N_1 + ... + N_j)` runs over the `(m, n)`-system with matrix `T`.
pub fn ag_fermionic(p: &AgParams, budget: u64) -> Result<QPoly> {
    let k = p.k;
    let t = tadpole(k);
    let v = mat_vec(&t, &p.m);
    let parity = p.m.iter().map(|&x| Some(x.rem_euclid(2))).collect();
    let sys = MnSystem::new(t, v, parity)?;
    let a = p.a as usize;
    sys.sum(budget, |m, n| {
        let s: Vec<i64> = p.m.iter().zip(m).map(|(mm, x)| (mm - x) / 2).collect();
        let mut e = 0i64;
        for j in 0..k {
            let nj = s[j] - if j > 0 { s[j - 1] } else { 0 };
            e += nj * nj;
            if j + 1 >= a {
                e += nj;
            }
        }
        qbin_product(m, n).shift(int_exp(e))
    })
}

/// The `b` of the bosonic form: `k+1` when `ell_k + a + k` is odd, else `k+2`.
pub fn ag_b(l: &LVec, a: i64, k: i64) -> i64 {
    if (l.ell_n() + a + k).rem_euclid(2) == 1 {
        k + 1
    } else {
        k + 2
    }
}

/// Alternating `j`-sums over `[L; (b -+ a)/2 + (2k+3) j]`, with `j` limited to nonzero supernomials.
fn alternating_j_range(ell_n: i64, b: i64, a: i64, p: i64) -> std::ops::RangeInclusive<i64> {
    // |(b -+ a)/2 + p j| <= ell_N/2 bounds |j| by (ell_N + b + a) / (2p) + 1.
    let reach = (ell_n.abs() + b.abs() + a.abs()) / (2 * p) + 1;
    -reach..=reach
}

/// `P(M)` from the supernomial bosonic form; needs `L >= 0`.
pub fn ag_bosonic(p: &AgParams) -> Result<QPoly> {
    let l = p.l_vec();
    if !l.is_nonneg() {
        return Err(Error::Domain(format!("bosonic form needs L = TM - e_(a-1) + e_k >= 0, got {l}")));
    }
    let k = p.k as i64;
    let a = p.a;
    let b = ag_b(&l, a, k);
    let pp = 2 * k + 3;
    let mut acc = QPoly::zero();
    for j in alternating_j_range(l.ell_n(), b, a, pp) {
        let i1 = HalfInt::from_twice(b - a + 2 * pp * j);
        let i2 = HalfInt::from_twice(b + a + 2 * pp * j);
        acc += q_supernomial(&l, i1)?.shift(int_exp(j * (pp * (2 * j + 1) - 2 * a)));
        acc -= &q_supernomial(&l, i2)?.shift(int_exp((2 * j + 1) * (pp * j + a)));
    }
    Ok(acc)
}

/// MacMahon's sum `sum_n q^{n(n+a')} [M-n; M-2n]` with `a' = 2 - a`, for `k = 1`.
pub fn macmahon(a: i64, m: i64) -> QPoly {
    let ap = 2 - a;
    let mut acc = QPoly::zero();
    for n in m.min(0)..=m.div_euclid(2) {
        acc += qbinomial(m - n, m - 2 * n).shift(int_exp(n * (n + ap)));
    }
    acc
}

/// Schur's alternating form for `k = 1`, `M >= 0`.
pub fn schur(a: i64, m: i64) -> Result<QPoly> {
    if m < 0 {
        return Err(Error::Domain("Schur's form is used for M >= 0".into()));
    }
    let ap = 2 - a;
    let mut acc = QPoly::zero();
    for j in (-m - 2 * ap - 2) / 5 - 1..=m / 5 + 1 {
        let term = qbinomial(m + ap, (m - 5 * j).div_euclid(2)).shift(exp((5 * j + 2 * ap + 1) * j, 2));
        if j.rem_euclid(2) == 0 {
            acc += term;
        } else {
            acc -= &term;
        }
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrenceOutcome {
    pub fermionic: bool,
    /// `None` when one of the three `L` vectors has a negative entry.
    pub bosonic: Option<bool>,
}

/// `P(M) = P(M - e_p) + q^{M_p - min(a-1, p)} P(M - 2 T^{-1} e_p)` for `1 <= p <= k`.
pub fn ag_recurrence_check(params: &AgParams, idx: usize, budget: u64) -> Result<RecurrenceOutcome> {
    let k = params.k;
    if !(1..=k).contains(&idx) {
        return Err(Error::InvalidParams(format!("recurrence index {idx} outside 1..={k}")));
    }
    let m0 = params.m.clone();
    let mut m1 = m0.clone();
    m1[idx - 1] -= 1;
    // T^{-1} e_p has entries min(i, p).
    let m2: Vec<i64> = (0..k).map(|i| m0[i] - 2 * (i + 1).min(idx) as i64).collect();
    let shift = int_exp(m0[idx - 1] - (params.a - 1).min(idx as i64));
    let ps = [params.clone(), params.with_m(m1), params.with_m(m2)];
    let f: Vec<QPoly> = ps.iter().map(|p| ag_fermionic(p, budget)).collect::<Result<_>>()?;
    let fermionic = f[0] == &f[1] + &f[2].shift(shift);
    let bosonic = if ps.iter().all(|p| p.l_vec().is_nonneg()) {
        let b: Vec<QPoly> = ps.iter().map(ag_bosonic).collect::<Result<_>>()?;
        Some(b[0] == &b[1] + &b[2].shift(shift))
    } else {
        None
    };
    Ok(RecurrenceOutcome { fermionic, bosonic })
}

// ---------------------------------------------------------------------------
// Continued fraction identities.

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BfParams {
    pub ts: TsData,
    /// Dimension `N` of `L`.
    pub n: usize,
    pub a: i64,
    pub b: i64,
    pub alpha: usize,
    pub beta: usize,
    pub bbar: i64,
    pub r: i64,
    pub l: LVec,
}

impl BfParams {
    /// Fully validated parameters of the bosonic and fermionic functions.
    pub fn new(p: i64, k: i64, n: usize, a: i64, b: i64, l: LVec) -> Result<Self> {
        let ts = build_ts(p, k)?;
        if n == 0 || (n as i64 + 1) * k >= p - 1 {
            return Err(Error::InvalidParams(format!("need 0 < N < (p-1)/k - 1, got N = {n} for {p}/{k}")));
        }
        if b < 2 {
            return Err(Error::InvalidParams(format!("need b >= 2, got {b}")));
        }
        BfParams::with_ts(ts, n, a, b, l)
    }

    /// Validates Takahashi lengths, parity and dimensions only; used at the
    /// edge `N = (p-1)/k - 1` and for the normalization of the fermionic sum.
    pub fn with_ts(ts: TsData, n: usize, a: i64, b: i64, l: LVec) -> Result<Self> {
        if l.n() != n {
            return Err(Error::InvalidParams(format!("L has {} entries, expected N = {n}", l.n())));
        }
        if n > ts.size().max(1) {
            return Err(Error::InvalidParams(format!("N = {n} exceeds the rank {}", ts.size())));
        }
        let alpha = ts
            .takahashi_index(a)
            .ok_or_else(|| Error::InvalidParams(format!("a = {a} is not a Takahashi length of {}/{}", ts.p, ts.k)))?;
        let beta = ts
            .takahashi_index(b)
            .ok_or_else(|| Error::InvalidParams(format!("b = {b} is not a Takahashi length of {}/{}", ts.p, ts.k)))?;
        if (a + b + l.ell_n()).rem_euclid(2) != 0 {
            return Err(Error::InvalidParams(format!("a + b + ell_N = {} is odd", a + b + l.ell_n())));
        }
        let bbar = ts.takabar(beta);
        let r = b - n as i64 * (b - bbar);
        Ok(BfParams { ts, n, a, b, alpha, beta, bbar, r, l })
    }

    pub fn p(&self) -> i64 {
        self.ts.p
    }

    pub fn k(&self) -> i64 {
        self.ts.k
    }

    /// True when the main theorem covers these parameters.
    pub fn theorem_applies(&self) -> bool {
        self.beta >= self.n && self.l.is_nonneg() && (self.n as i64 + 1) * self.k() < self.p() - 1 && self.b >= 2
    }

    pub fn with_l(&self, l: LVec) -> Result<Self> {
        BfParams::with_ts(self.ts.clone(), l.n(), self.a, self.b, l)
    }

    /// `u = e_alpha - sum_{i=m+1}^{n} e_{t_i}` where `alpha` lies in zone `m`.
    pub fn u_vec(&self, alpha: usize) -> Vec<i64> {
        u_vec(&self.ts, alpha)
    }

    pub fn a_vec(&self) -> Vec<i64> {
        let ua = self.u_vec(self.alpha);
        let ub = self.u_vec(self.beta);
        let ts = &self.ts;
        let mut out = vec![0; ts.size()];
        for i in 0..=ts.n {
            for j in ts.t[i] + 1..=ts.t[i + 1] {
                if j >= 1 {
                    let src = if i % 2 == 1 { &ub } else { &ua };
                    out[j as usize - 1] = src[j as usize - 1];
                }
            }
        }
        out
    }

    /// `Q_{a,b}` with the given weights in place of `L_1..L_N`.
    pub fn q_ab_with(&self, weights: &[i64]) -> Vec<i64> {
        let ts = &self.ts;
        let size = ts.size();
        let uu = add(&self.u_vec(self.alpha), &self.u_vec(self.beta));
        let mut q = vec![0i64; size];
        let mut acc = |c: i64, j: usize| {
            if c != 0 {
                for (x, y) in q.iter_mut().zip(ts.q_vec(j)) {
                    *x += c * y;
                }
            }
        };
        for j in 1..=size {
            acc(uu[j - 1], j);
        }
        let top = size + 1;
        acc(i64::from(self.alpha == top) + i64::from(self.beta == top), top);
        for (j, &w) in weights.iter().enumerate() {
            acc(w, j + 1);
        }
        q
    }

    pub fn q_ab(&self) -> Vec<i64> {
        self.q_ab_with(self.l.as_slice())
    }

    /// `v = u_a + u_b + sum_i L_i e_i`, so that `n = (v - B m)/2`.
    pub fn v_vec(&self) -> Vec<i64> {
        let mut v = add(&self.u_vec(self.alpha), &self.u_vec(self.beta));
        for (i, &x) in self.l.as_slice().iter().enumerate() {
            v[i] += x;
        }
        v
    }

    /// Exponent of the `j`-th pair of bosonic terms.
    fn bosonic_exponents(&self, j: i64) -> (Exp, Exp) {
        let (p, k, a, r) = (self.p(), self.k(), self.a, self.r);
        let n = self.n as i64;
        let pk = p - k * n;
        (exp(j * (p * pk * j + p * r - pk * a), n), exp((p * j + a) * (pk * j + r), n))
    }
}

pub fn u_vec(ts: &TsData, alpha: usize) -> Vec<i64> {
    let m = ts.zone(alpha as i64);
    let mut u = vec![0i64; ts.size()];
    if (1..=ts.size()).contains(&alpha) {
        u[alpha - 1] += 1;
    }
    for i in m + 1..=ts.n {
        let ti = ts.t[i];
        if ti >= 1 {
            u[ti as usize - 1] -= 1;
        }
    }
    u
}

/// The bosonic function; needs `L >= 0` so that the `j`-sum is finite.
pub fn bosonic_b(bf: &BfParams) -> Result<QPoly> {
    if !bf.l.is_nonneg() {
        return Err(Error::Domain(format!("bosonic sum is offered for L >= 0 only, got {}", bf.l)));
    }
    let (a, b, p) = (bf.a, bf.b, bf.p());
    let ell = bf.l.ell_n();
    let mut acc = QPoly::zero();
    for j in alternating_j_range(ell, b, a, p) {
        let (e1, e2) = bf.bosonic_exponents(j);
        let i1 = HalfInt::from_twice(b - a + 2 * p * j);
        let i2 = HalfInt::from_twice(b + a + 2 * p * j);
        if i1.twice().abs() <= ell {
            acc += big_t(&bf.l, i1)?.shift(e1);
        }
        if i2.twice().abs() <= ell {
            acc -= &big_t(&bf.l, i2)?.shift(e2);
        }
    }
    Ok(acc.shift(exp((b - a) * (b - a), 4 * bf.n as i64)))
}

/// The fermionic sum without the `q^{Delta}` normalization.
pub fn fermionic_f_raw(bf: &BfParams, budget: u64) -> Result<QPoly> {
    let b = bf.ts.b.clone();
    let av = bf.a_vec();
    let parity = bf.q_ab().iter().map(|&x| Some(x.rem_euclid(2))).collect();
    let sys = MnSystem::new(b.clone(), bf.v_vec(), parity)?;
    sys.sum(budget, |m, n| {
        let lin: i64 = av.iter().zip(m).map(|(x, y)| x * y).sum();
        qbin_product(m, n).shift(quarter_form(&b, m) - exp(lin, 2))
    })
}

fn delta_cache() -> &'static Mutex<HashMap<(i64, i64, i64, i64), Exp>> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, i64, i64, i64), Exp>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `Delta_{a,b}` fixed by `q^{-(b-a)^2/4} F|_{q=0} = 1` at `N = 1`, `L = (|b-a|)`,
/// and required to agree at `L = (|b-a| + 2)`.
pub fn compute_delta(ts: &TsData, a: i64, b: i64) -> Result<Exp> {
    let key = (ts.p, ts.k, a, b);
    if let Some(d) = delta_cache().lock().expect("delta cache").get(&key) {
        return Ok(*d);
    }
    let base = (b - a).abs();
    let mut found = None;
    for extra in [0, 2] {
        let bf = BfParams::with_ts(ts.clone(), 1, a, b, LVec::new(vec![base + extra])?)?;
        let raw = fermionic_f_raw(&bf, DEFAULT_BUDGET)?;
        let (lo, c) = raw
            .terms()
            .next()
            .map(|(e, c)| (*e, c.clone()))
            .ok_or_else(|| Error::Inconsistent(format!("fermionic sum vanishes for a = {a}, b = {b}")))?;
        if !c.is_one() {
            return Err(Error::Inconsistent(format!("lowest coefficient {c} != 1 for a = {a}, b = {b}")));
        }
        let d = exp((b - a) * (b - a), 4) - lo;
        match found {
            None => found = Some(d),
            Some(prev) if prev != d => {
                return Err(Error::Inconsistent(format!("Delta unstable for a = {a}, b = {b}: {prev} vs {d}")));
            }
            _ => {}
        }
    }
    let d = found.expect("two reference points");
    delta_cache().lock().expect("delta cache").insert(key, d);
    Ok(d)
}

/// The fermionic function `q^{Delta} sum ...`.
pub fn fermionic_f(bf: &BfParams, budget: u64) -> Result<QPoly> {
    let d = compute_delta(&bf.ts, bf.a, bf.b)?;
    Ok(fermionic_f_raw(bf, budget)?.shift(d))
}

/// `X(L) = X(L - 2e_i) + q^{(L_i - 1)/2} X(L + e_{i-1} - 2e_i + e_{i+1})` for `X = B, F`.
pub fn check_x_recurrence(bf: &BfParams, i: usize, budget: u64) -> Result<(bool, bool)> {
    if i == 0 || i >= bf.n {
        return Err(Error::InvalidParams(format!("recurrence index {i} outside 1..{}", bf.n)));
    }
    let ii = i as i64;
    let low = bf.with_l(bf.l.offset(&[(ii, -2)]))?;
    let mix = bf.with_l(bf.l.offset(&[(ii - 1, 1), (ii, -2), (ii + 1, 1)]))?;
    let shift = exp(bf.l.get(ii) - 1, 2);
    let check = |f: &dyn Fn(&BfParams) -> Result<QPoly>| -> Result<bool> {
        Ok(f(bf)? == f(&low)? + f(&mix)?.shift(shift))
    };
    let b_ok = check(&|x| bosonic_b(x))?;
    let f_ok = check(&|x| fermionic_f(x, budget))?;
    Ok((b_ok, f_ok))
}

/// Zero-padding invariance `X^{(M)}((L, 0...)) = X^{(N)}(L)` for `X = B, F`.
pub fn stability_check(bf: &BfParams, m: usize, budget: u64) -> Result<(bool, bool)> {
    if m < bf.n {
        return Err(Error::InvalidParams(format!("need M >= N, got M = {m} < {}", bf.n)));
    }
    let padded = bf.with_l(bf.l.padded(m))?;
    let b_ok = bosonic_b(&padded)? == bosonic_b(bf)?;
    let f_ok = fermionic_f(&padded, budget)? == fermionic_f(bf, budget)?;
    Ok((b_ok, f_ok))
}

/// Both sides of the `p = 2N+3` identity with the tadpole `(m, n)`-system.
pub fn dual_ag_sides(n: usize, a: i64, l: &LVec, budget: u64) -> Result<(QPoly, QPoly)> {
    if l.n() != n || !l.is_nonneg() || !(1..=n as i64 + 1).contains(&a) {
        return Err(Error::InvalidParams(format!("need L >= 0 of length N = {n} and 1 <= a <= N+1")));
    }
    let nn = n as i64;
    let p = 2 * nn + 3;
    let b = if (l.ell_n() + a + nn).rem_euclid(2) == 1 { nn + 1 } else { nn + 2 };
    let t = tadpole(n);
    let mut v = l.as_slice().to_vec();
    v[n - 1] -= 1;
    if a >= 2 {
        v[a as usize - 2] += 1;
    }
    let sys = MnSystem::new(t.clone(), v, vec![None; n])?;
    let lhs = sys
        .sum(budget, |m, nv| {
            let ma = if a >= 2 { m[a as usize - 2] } else { 0 };
            qbin_product(m, nv).shift(quarter_form(&t, m) - exp(ma - m[n - 1], 2))
        })?
        .shift(exp(nn - a + 1, 4));
    let mut rhs = QPoly::zero();
    let ell = l.ell_n();
    for j in alternating_j_range(ell, b, a, p) {
        let i1 = HalfInt::from_twice(b - a + 2 * p * j);
        let i2 = HalfInt::from_twice(b + a + 2 * p * j);
        if i1.twice().abs() <= ell {
            rhs += big_t(l, i1)?.shift(exp(j * (3 * p * j + p * (b - nn) - 3 * a), nn));
        }
        if i2.twice().abs() <= ell {
            rhs -= &big_t(l, i2)?.shift(exp((p * j + a) * (3 * j + b - nn), nn));
        }
    }
    Ok((lhs, rhs.shift(exp((b - a) * (b - a), 4 * nn))))
}

pub fn dual_ag_check(n: usize, a: i64, l: &LVec, budget: u64) -> Result<bool> {
    let (lhs, rhs) = dual_ag_sides(n, a, l, budget)?;
    Ok(lhs == rhs)
}

/// Right side of the `k = 1` identity, written with the Cartan matrix of
/// `A_{p-3}` and the alternating parity vectors `e_{j-1} + e_{j-3} + ...`.
pub fn k1_fermionic(p: i64, n: usize, a: i64, b: i64, l: &LVec, budget: u64) -> Result<QPoly> {
    if !(1..p).contains(&a) || !(n as i64 + 1..p).contains(&b) || l.n() != n {
        return Err(Error::InvalidParams(format!("need 1 <= a <= p-1, N+1 <= b <= p-1 for p = {p}")));
    }
    let size = (p - 3) as usize;
    let c: Vec<Vec<i64>> = (0..size)
        .map(|i| (0..size).map(|j| if i == j { 2 } else { -i64::from(i.abs_diff(j) == 1) }).collect())
        .collect();
    let qj = |j: i64| -> Vec<i64> { (1..=size as i64).map(|i| i64::from(i < j && (j - i) % 2 == 1)).collect() };
    let mut q = add(&qj(a - 1), &qj(b - 1));
    for (i, &li) in l.as_slice().iter().enumerate().skip(1) {
        q = add(&q, &qj(i as i64 + 1).iter().map(|x| x * li).collect::<Vec<_>>());
    }
    let mut v = add(&unit(size, a - 1), &unit(size, b - 1));
    for (i, &li) in l.as_slice().iter().enumerate() {
        v[i] += li;
    }
    let parity = q.iter().map(|&x| Some(x.rem_euclid(2))).collect();
    let sys = MnSystem::new(c.clone(), v, parity)?;
    let nn = n as i64;
    let sum = sys.sum(budget, |m, nv| {
        // m_0 = m_{p-2} = 0.
        let ma = if a >= 2 { m.get(a as usize - 2).copied().unwrap_or(0) } else { 0 };
        qbin_product(m, nv).shift(quarter_form(&c, m) - exp(ma, 2))
    })?;
    Ok(sum.shift(exp((b - a) * (a - b + nn), 4 * nn)))
}

/// Left side of the `k = 1` identity: the bosonic sum without its `q^{(b-a)^2/(4N)}` prefactor.
pub fn k1_bosonic(p: i64, n: usize, a: i64, b: i64, l: &LVec) -> Result<QPoly> {
    let bf = BfParams::with_ts(build_ts(p, 1)?, n, a, b, l.clone())?;
    Ok(bosonic_b(&bf)?.shift(-exp((b - a) * (b - a), 4 * n as i64)))
}

/// True when `q^{(b-a)^2/(4N)}` times the `k = 1` right side equals the general fermionic function.
pub fn k1_matches_general(p: i64, n: usize, a: i64, b: i64, l: &LVec, budget: u64) -> Result<bool> {
    let bf = BfParams::with_ts(build_ts(p, 1)?, n, a, b, l.clone())?;
    let general = fermionic_f(&bf, budget)?;
    let closed = k1_fermionic(p, n, a, b, l, budget)?.shift(exp((b - a) * (b - a), 4 * n as i64));
    Ok(general == closed && k1_bosonic(p, n, a, b, l)? == closed.shift(-exp((b - a) * (b - a), 4 * n as i64)))
}

/// Every `(a, b)` pair of Takahashi lengths with `b >= 2`, in increasing order.
pub fn takahashi_pairs(ts: &TsData) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for &a in &ts.taka {
        for &b in &ts.taka {
            if b >= 2 {
                out.push((a, b));
            }
        }
    }
    out
}

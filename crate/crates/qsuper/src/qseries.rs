//! Truncated q-series: limits of q-supernomials, string and b-functions,
//! branching functions and Virasoro characters.
//!
//! Every series is a `QPoly` holding exactly the terms with exponent `<= order`.

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::{bosonic_b, compute_delta, BfParams};
use crate::mnsystem::MnSystem;
use crate::qpoly::{exp, int_exp, qbinomial, Exp, HalfInt, QPoly};
use crate::supernomial::{big_t, cartan_inv, q_supernomial_at_index, LVec};

pub const DEFAULT_ORDER: i64 = 12;

/// Escalation steps tried before giving up.
pub const MAX_STEPS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesCtx {
    pub order: Exp,
}

impl SeriesCtx {
    pub fn new(order: i64) -> Self {
        SeriesCtx { order: int_exp(order) }
    }
}

impl Default for SeriesCtx {
    fn default() -> Self {
        SeriesCtx::new(DEFAULT_ORDER)
    }
}

fn floor(e: Exp) -> i64 {
    e.floor().to_integer()
}

/// `1/(q)_a` up to `order`.
pub fn inv_pochhammer(a: i64, order: Exp) -> QPoly {
    let mut acc = QPoly::one();
    if order.is_negative() {
        return QPoly::zero();
    }
    let top = floor(order);
    for i in 1..=a.min(top) {
        let geometric = QPoly::from_terms((0..=top / i).map(|k| (int_exp(k * i), 1)));
        acc = acc.mul_truncated(&geometric, order);
    }
    acc
}

/// `1/(q)_inf` up to `order`.
pub fn qinf_inv(order: Exp) -> QPoly {
    inv_pochhammer(floor(order).max(0), order)
}

/// `(q^s)_n` up to `order`, with `n = None` for the infinite product.
/// Factors with negative exponent are multiplied in first, so every later
/// factor only raises exponents and intermediate truncation is safe.
pub fn pochhammer_series(s: Exp, n: Option<i64>, order: Exp) -> QPoly {
    let mut acc = QPoly::one();
    let mut i = 0i64;
    loop {
        if n.is_some_and(|n| i >= n) {
            break;
        }
        let e = s + int_exp(i);
        if e.is_zero() {
            return QPoly::zero();
        }
        if e.is_positive() {
            let lo = acc.min_exp().unwrap_or_else(Exp::zero);
            if e > order - lo {
                break;
            }
        }
        let factor = QPoly::from_terms([(int_exp(0), 1), (e, -1)]);
        acc = if e.is_negative() { &acc * &factor } else { acc.mul_truncated(&factor, order) };
        i += 1;
    }
    acc.truncate(order)
}

/// Sum of a convergent sequence `f(start), f(start + step), ...`: accepted once
/// three consecutive values agree up to `order`.
pub fn escalate<F: FnMut(i64) -> Result<QPoly>>(start: i64, step: i64, order: Exp, mut f: F) -> Result<(QPoly, i64)> {
    let mut prev: Vec<QPoly> = Vec::new();
    let mut x = start;
    for _ in 0..MAX_STEPS {
        let v = f(x)?.truncate(order);
        prev.push(v);
        let n = prev.len();
        if n >= 3 && prev[n - 1] == prev[n - 2] && prev[n - 2] == prev[n - 3] {
            return Ok((prev.pop().expect("nonempty"), x));
        }
        x += step;
    }
    Err(Error::NoConvergence(format!("no three consecutive agreements in {MAX_STEPS} steps from {start} by {step}")))
}

/// First escalation value: at least the order, with the parity of `parity`.
fn start_at(order: Exp, parity: i64) -> i64 {
    let s = floor(order).max(0) + 2;
    s + (s - parity).rem_euclid(2)
}

// ---------------------------------------------------------------------------
// Limits of the q-supernomials.

/// `[L; a - ell_N/2]` with `L_m` escalated, against `1/(q)_a`.
pub fn limit_check_supernomial(l: &LVec, a: i64, m: usize, ctx: &SeriesCtx) -> Result<bool> {
    if !l.is_nonneg() || m == 0 || m > l.n() {
        return Err(Error::InvalidParams(format!("need L >= 0 and 1 <= m <= {}", l.n())));
    }
    let (lim, _) = escalate(start_at(ctx.order, 0), 2, ctx.order, |x| {
        Ok(q_supernomial_at_index(&l.offset(&[(m as i64, x)]), a))
    })?;
    Ok(lim == inv_pochhammer(a, ctx.order))
}

/// `C^{-1}` of `A_{N-1}`.
fn cinv_matrix(n: usize) -> Vec<Vec<Exp>> {
    (1..n).map(|i| (1..n).map(|j| cartan_inv(n, i, j)).collect()).collect()
}

fn mat_vec(m: &[Vec<Exp>], v: &[Exp]) -> Vec<Exp> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn dot(a: &[Exp], b: &[Exp]) -> Exp {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_exps(v: &[i64]) -> Vec<Exp> {
    v.iter().map(|&x| int_exp(x)).collect()
}

/// `L C^{-1} L` for `L` of length `N-1`.
pub fn quad_cinv(n: usize, l: &[i64]) -> Exp {
    let lv = to_exps(l);
    dot(&lv, &mat_vec(&cinv_matrix(n), &lv))
}

/// Lower bound `1/4` on the smallest eigenvalue of `C^{-1}`: Gershgorin
/// bounds every eigenvalue of `C` by its largest absolute row sum.
fn cinv_min_eigen(n: usize) -> Exp {
    let row_max = (0..n.saturating_sub(1))
        .map(|i| 2 + i64::from(i > 0) + i64::from(i + 2 < n))
        .max()
        .unwrap_or(2);
    exp(1, row_max)
}

/// Largest `x` with `lambda x^2 - c x <= budget`.
fn quad_reach(lambda: Exp, c: Exp, budget: Exp) -> i64 {
    let mut x = floor(c / lambda).max(0);
    while lambda * int_exp(x + 1) * int_exp(x + 1) - c * int_exp(x + 1) <= budget {
        x += 1;
    }
    x
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StringParams {
    pub n: usize,
    /// Length `N-1`.
    pub l: Vec<i64>,
    pub sigma: i64,
    pub a: i64,
}

impl StringParams {
    pub fn new(n: usize, l: Vec<i64>, sigma: i64, a: i64) -> Result<Self> {
        if n == 0 || l.len() + 1 != n || l.iter().any(|&x| x < 0) || !(0..=1).contains(&sigma) {
            return Err(Error::InvalidParams(format!("need N >= 1, L >= 0 of length N-1 and sigma in {{0,1}}; got N = {n}, L = {l:?}")));
        }
        let sp = StringParams { n, l, sigma, a };
        if sp.r().rem_euclid(2) != 0 {
            return Err(Error::InvalidParams(format!("r = a - N (C^-1 L)_(N-1) + N sigma = {} is odd", sp.r())));
        }
        Ok(sp)
    }

    /// `r = a - N (C^{-1} L)_{N-1} + N sigma`; note `N (C^{-1} L)_{N-1} = sum_j j L_j`.
    pub fn r(&self) -> i64 {
        let weighted: i64 = self.l.iter().enumerate().map(|(j, x)| (j as i64 + 1) * x).sum();
        self.a - weighted + self.n as i64 * self.sigma
    }
}

/// All integer points of `[lo_i, hi_i]` (inclusive), row by row.
fn grid(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for (&a, &b) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|v| {
                (a..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// The string-like function `c_a^{L,sigma}`.
pub fn string_function(sp: &StringParams, ctx: &SeriesCtx) -> Result<QPoly> {
    let n = sp.n;
    let order = ctx.order;
    let ci = cinv_matrix(n);
    let lv = to_exps(&sp.l);
    let cl = mat_vec(&ci, &lv);
    let pre = dot(&lv, &cl) / int_exp(2 * (n as i64 + 2));
    let budget = order - pre;
    // m C^{-1}(m - L) >= sum_i (m_i^2/4 - c m_i) with c = max |(C^{-1} L)_i|.
    let lambda = cinv_min_eigen(n);
    let c = cl.iter().map(|x| x.abs()).max().unwrap_or_else(Exp::zero);
    let slack = int_exp(n.saturating_sub(2) as i64) * c * c / (int_exp(4) * lambda);
    let reach = quad_reach(lambda, c, budget + slack);
    let r = sp.r();
    let mut sum = QPoly::zero();
    for m in grid(&vec![0; n - 1], &vec![reach; n - 1]) {
        // r/(2N) - (C^{-1} m)_1 must be an integer.
        let weighted: i64 = m.iter().enumerate().map(|(j, x)| (j as i64 + 1) * x).sum();
        if (r + 2 * weighted).rem_euclid(2 * n as i64) != 0 {
            continue;
        }
        let mv = to_exps(&m);
        let diff: Vec<Exp> = mv.iter().zip(&lv).map(|(a, b)| a - b).collect();
        let e = dot(&mv, &mat_vec(&ci, &diff));
        if e > budget {
            continue;
        }
        let mut t = QPoly::q_pow(e);
        for &mi in &m {
            t = t.mul_truncated(&inv_pochhammer(mi, budget - e), budget);
        }
        sum += t;
    }
    let lo = sum.min_exp().unwrap_or_else(Exp::zero);
    Ok(sum.mul_truncated(&qinf_inv(budget - lo), budget).shift(pre))
}

// ---------------------------------------------------------------------------
// b-functions.

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BFuncParams {
    pub n: usize,
    /// The escalated components `k_1 < ... < k_h`, 1-based.
    pub k: Vec<usize>,
    /// Length `N`; entries in `K` are ignored.
    pub l: Vec<i64>,
    /// Length `N`; only entries in `K` are used.
    pub sigma: Vec<i64>,
    pub a: i64,
}

impl BFuncParams {
    pub fn new(n: usize, k: Vec<usize>, l: Vec<i64>, sigma: Vec<i64>, a: i64) -> Result<Self> {
        let sorted = k.windows(2).all(|w| w[0] < w[1]);
        if n == 0 || k.is_empty() || !sorted || k.iter().any(|&x| x == 0 || x > n) || l.len() != n || sigma.len() != n {
            return Err(Error::InvalidParams("need 1 <= k_1 < ... < k_h <= N and L, sigma of length N".into()));
        }
        let bp = BFuncParams { n, k, l, sigma, a };
        let mut par = a;
        for j in 1..=n {
            if bp.in_k(j) {
                if !(0..=1).contains(&bp.sigma[j - 1]) {
                    return Err(Error::InvalidParams("sigma entries must be 0 or 1".into()));
                }
                par += j as i64 * bp.sigma[j - 1];
            } else {
                if bp.l[j - 1] < 0 {
                    return Err(Error::InvalidParams("L entries outside K must be >= 0".into()));
                }
                par += j as i64 * bp.l[j - 1];
            }
        }
        if par.rem_euclid(2) != 0 {
            return Err(Error::InvalidParams(format!("a + sum_(K-bar) k L_k + sum_K k sigma_k = {par} is odd")));
        }
        Ok(bp)
    }

    pub fn in_k(&self, j: usize) -> bool {
        self.k.contains(&j)
    }

    fn kh(&self) -> usize {
        *self.k.last().expect("K nonempty")
    }

    /// `2 m_i` offsets: `m_i in Z - sigma_i/2` on `K`, `m_i in Z_+ - L_i/2` elsewhere.
    fn offset_twice(&self, j: usize) -> i64 {
        if self.in_k(j) {
            -self.sigma[j - 1]
        } else {
            -self.l[j - 1]
        }
    }
}

/// `b_a^{...}` by the defining sum.
pub fn b_function(bp: &BFuncParams, ctx: &SeriesCtx) -> Result<QPoly> {
    let n = bp.n;
    let nn = n as i64;
    let order = ctx.order;
    let ci = cinv_matrix(n);
    let kh = bp.kh();
    let h = bp.k.len() as u32;
    // Bound: exponent >= sum_i (m_i^2/4 - c |m_i|) - c0, where the finite
    // products (x_j q)_{L_j}, j > k_h, contribute at least -L_j |x_j|.
    let lambda = cinv_min_eigen(n);
    let tail: i64 = bp.l[kh..].iter().sum();
    let c = int_exp(tail);
    let c0: Exp = (kh + 1..=n)
        .map(|j| {
            let lj = bp.l[j - 1];
            let above: i64 = bp.l[j..].iter().sum();
            int_exp(lj) * (exp(bp.a.abs(), 2 * nn) + exp(above, 2) + int_exp(lj + 1))
        })
        .sum();
    let slack = int_exp(nn.saturating_sub(2)) * c * c / (int_exp(4) * lambda) + c0;
    let reach = quad_reach(lambda, c, order + slack) + 1;
    let mut sum = QPoly::zero();
    let lo: Vec<i64> = (1..n).map(|j| if bp.in_k(j) { -reach } else { 0 }).collect();
    let hi: Vec<i64> = vec![reach; n - 1];
    for steps in grid(&lo, &hi) {
        let m: Vec<Exp> = steps.iter().enumerate().map(|(i, &s)| int_exp(s) + exp(bp.offset_twice(i + 1), 2)).collect();
        let cm = mat_vec(&ci, &m);
        let cm_at = |j: usize| if j >= 1 && j < n { cm[j - 1] } else { Exp::zero() };
        let m_n = -exp(bp.a, 2 * nn) - cm_at(n - 1);
        let shifted_n = m_n - exp(bp.offset_twice(n), 2);
        if !shifted_n.is_integer() || (!bp.in_k(n) && shifted_n.is_negative()) {
            continue;
        }
        let m_at = |j: usize| if j < n { m[j - 1] } else { m_n };
        let e = dot(&m, &cm);
        let x = |j: usize| -> Exp {
            if j == n {
                return Exp::zero();
            }
            let above: i64 = bp.l[j..].iter().sum();
            exp(bp.a, 2 * nn) + exp(above, 2) + cm_at(j) - cm_at(j + 1)
        };
        let mut fin = QPoly::q_pow(e);
        for j in kh + 1..=n {
            fin = &fin * &pochhammer_series(x(j) + int_exp(1), Some(bp.l[j - 1]), int_exp(i64::MAX / 4));
            if fin.is_zero() {
                break;
            }
        }
        let Some(mu) = fin.min_exp() else { continue };
        if mu > order {
            continue;
        }
        let mut t = fin.mul_truncated(&pochhammer_series(x(kh) + int_exp(1), None, order - mu), order);
        for j in (1..=n).filter(|&j| !bp.in_k(j)) {
            let idx = exp(bp.l[j - 1], 2) + m_at(j);
            if !idx.is_integer() || idx.is_negative() {
                return Err(Error::Inconsistent(format!("(q)_{{L_{j}/2 + m_{j}}} has index {idx}")));
            }
            let lo = t.min_exp().unwrap_or(order);
            t = t.mul_truncated(&inv_pochhammer(idx.to_integer(), order - lo), order);
        }
        sum += t;
    }
    let lo = sum.min_exp().unwrap_or_else(Exp::zero);
    let inv = qinf_inv(order - lo).pow(h + 1).truncate(order - lo);
    Ok(sum.mul_truncated(&inv, order))
}

/// The `k_h = N` simplification, where `x_N = 1` cancels one `(q)_inf`.
pub fn b_function_top(bp: &BFuncParams, ctx: &SeriesCtx) -> Result<QPoly> {
    let n = bp.n;
    if !bp.in_k(n) {
        return Err(Error::InvalidParams("the simplified form needs N in K".into()));
    }
    let nn = n as i64;
    let order = ctx.order;
    let ci = cinv_matrix(n);
    let lambda = cinv_min_eigen(n);
    let reach = quad_reach(lambda, Exp::zero(), order) + 1;
    let lo: Vec<i64> = (1..n).map(|j| if bp.in_k(j) { -reach } else { 0 }).collect();
    let mut sum = QPoly::zero();
    for steps in grid(&lo, &vec![reach; n - 1]) {
        let m: Vec<Exp> = steps.iter().enumerate().map(|(i, &s)| int_exp(s) + exp(bp.offset_twice(i + 1), 2)).collect();
        let cm = mat_vec(&ci, &m);
        let top = exp(bp.a, 2 * nn) + if n >= 2 { cm[n - 2] } else { Exp::zero() } - exp(bp.sigma[n - 1], 2);
        if !top.is_integer() {
            continue;
        }
        let e = dot(&m, &cm);
        if e > order {
            continue;
        }
        let mut t = QPoly::q_pow(e);
        for j in (1..n).filter(|&j| !bp.in_k(j)) {
            let idx = exp(bp.l[j - 1], 2) + m[j - 1];
            t = t.mul_truncated(&inv_pochhammer(idx.to_integer(), order - e), order);
        }
        sum += t;
    }
    let lo = sum.min_exp().unwrap_or_else(Exp::zero);
    let inv = qinf_inv(order - lo).pow(bp.k.len() as u32).truncate(order - lo);
    Ok(sum.mul_truncated(&inv, order))
}

/// `lim T(L, a/2)` with every `L_k`, `k in K`, escalated along `L_k = sigma_k + 2s`.
pub fn b_function_limit(bp: &BFuncParams, ctx: &SeriesCtx) -> Result<QPoly> {
    let half = HalfInt::from_twice(bp.a);
    let (v, _) = escalate(start_at(ctx.order, 0) / 2, 1, ctx.order, |s| {
        let l: Vec<i64> = (1..=bp.n).map(|j| if bp.in_k(j) { bp.sigma[j - 1] + 2 * s } else { bp.l[j - 1] }).collect();
        big_t(&LVec::new(l)?, half)
    })?;
    Ok(v)
}

/// `c_a^{L,sigma} = q^{-N L C^{-1} L / (4(N+2))} lim T((L, L_N), a/2)`.
pub fn string_function_limit(sp: &StringParams, ctx: &SeriesCtx) -> Result<QPoly> {
    let n = sp.n;
    let shift = exp(n as i64, 4 * (n as i64 + 2)) * quad_cinv(n, &sp.l);
    let inner = SeriesCtx { order: ctx.order + shift };
    let mut l = sp.l.clone();
    l.push(0);
    let mut sigma = vec![0; n];
    sigma[n - 1] = sp.sigma;
    let bp = BFuncParams::new(n, vec![n], l, sigma, sp.a)?;
    Ok(b_function_limit(&bp, &inner)?.shift(-shift).truncate(ctx.order))
}

// ---------------------------------------------------------------------------
// Branching functions.

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchParams {
    pub n: usize,
    pub p: i64,
    pub pp: i64,
    pub r: i64,
    pub s: i64,
    /// Length `N-1`.
    pub l: Vec<i64>,
    pub sigma: i64,
}

impl BranchParams {
    pub fn new(n: usize, p: i64, pp: i64, r: i64, s: i64, l: Vec<i64>, sigma: i64) -> Result<Self> {
        let nn = n as i64;
        if n == 0 || !(0 < p && p < pp) || (pp - p) % nn != 0 || ((pp - p) / nn).gcd(&pp) != 1 {
            return Err(Error::InvalidParams(format!("need P < P', N | P'-P and gcd((P'-P)/N, P') = 1; got N = {n}, P = {p}, P' = {pp}")));
        }
        if !(1..p).contains(&r) || !(1..pp).contains(&s) {
            return Err(Error::InvalidParams(format!("need 1 <= r < P and 1 <= s < P'; got r = {r}, s = {s}")));
        }
        if l.len() + 1 != n || l.iter().any(|&x| x < 0) || !(0..=1).contains(&sigma) {
            return Err(Error::InvalidParams("need L >= 0 of length N-1 and sigma in {0,1}".into()));
        }
        let weighted: i64 = l.iter().enumerate().map(|(j, x)| (j as i64 + 1) * x).sum();
        if (r - s + weighted + nn * sigma).rem_euclid(2) != 0 {
            return Err(Error::InvalidParams("r - s + N (C^-1 L)_(N-1) + N sigma must be even".into()));
        }
        Ok(BranchParams { n, p, pp, r, s, l, sigma })
    }
}

/// `j` with `q^{f(j)} <= bound`, for a quadratic `f` with positive leading term and vertex in `(-1, 1)`.
fn theta_range(f: &dyn Fn(i64) -> Exp, bound: Exp) -> Vec<i64> {
    let mut out = Vec::new();
    for dir in [1i64, -1] {
        let mut j = if dir == 1 { 0 } else { -1 };
        loop {
            if f(j) <= bound {
                out.push(j);
            } else if j.abs() >= 2 {
                break;
            }
            j += dir;
        }
    }
    out
}

/// The generalized branching function `hat chi`.
pub fn branching_function(bp: &BranchParams, ctx: &SeriesCtx) -> Result<QPoly> {
    let n = bp.n;
    let nn = n as i64;
    let order = ctx.order;
    let (p, pp, r, s) = (bp.p, bp.pp, bp.r, bp.s);
    let pre = -quad_cinv(n, &bp.l) / int_exp(2 * (nn + 2));
    let first = |j: i64| exp(j * (j * p * pp + pp * r - p * s), nn);
    let second = |j: i64| exp((j * pp + s) * (j * p + r), nn);
    let theta_min = [first(-1), first(0), first(1), second(-1), second(0), second(1)].into_iter().min().expect("six values");
    let c_order = order - pre - theta_min.min(Exp::zero());
    let mut total = QPoly::zero();
    // 2m runs over 0..=N with the parity of r - s.
    for twice_m in (0..=nn).filter(|x| (x - (r - s)).rem_euclid(2) == 0) {
        let sp = StringParams::new(n, bp.l.clone(), bp.sigma, twice_m)?;
        let c = string_function(&sp, &SeriesCtx { order: c_order })?;
        let Some(c_lo) = c.min_exp() else { continue };
        let bound = order - pre - c_lo;
        // m_a(j) = a/2 + P'j is congruent to +-m modulo N, i.e. a + 2P'j -+ 2m = 0 mod 2N.
        let hits = |a: i64, j: i64| {
            let t = a + 2 * pp * j;
            (t - twice_m).rem_euclid(2 * nn) == 0 || (t + twice_m).rem_euclid(2 * nn) == 0
        };
        let mut theta = QPoly::zero();
        for j in theta_range(&first, bound) {
            if hits(r - s, j) {
                theta.add_term(first(j), 1.into());
            }
        }
        for j in theta_range(&second, bound) {
            if hits(r + s, j) {
                theta.add_term(second(j), (-1).into());
            }
        }
        total += c.mul_truncated(&theta, order - pre);
    }
    Ok(total.shift(pre).truncate(order))
}

/// The parameters of the branching function reached by the `L_N` limit of `B`,
/// with `sigma' = sigma + b - bbar (mod 2)` on the branching side.
pub fn branch_params_for(bf: &BfParams, l: &[i64], sigma: i64) -> Result<BranchParams> {
    let n = bf.n;
    let sigma_prime = (sigma + bf.b - bf.bbar).rem_euclid(2);
    BranchParams::new(n, bf.p() - bf.k() * n as i64, bf.p(), bf.r, bf.a, l.to_vec(), sigma_prime)
}

/// `q^{-(b-a)^2/(4N) - L C^{-1} L / 4} lim B((L, L_N))` with `L_N = sigma (mod 2)` escalated.
pub fn bosonic_branching_limit(p: i64, k: i64, n: usize, a: i64, b: i64, l: &[i64], sigma: i64, ctx: &SeriesCtx) -> Result<QPoly> {
    let shift = exp((b - a) * (b - a), 4 * n as i64) + quad_cinv(n, l) / int_exp(4);
    let (v, _) = escalate(start_at(ctx.order + shift, sigma), 2, ctx.order + shift, |ln| {
        let mut full = l.to_vec();
        full.push(ln);
        let bf = BfParams::new(p, k, n, a, b, LVec::new(full)?)?;
        bosonic_b(&bf)
    })?;
    Ok(v.shift(-shift).truncate(ctx.order))
}

/// Both sides of the branching-function limit of `B`.
pub fn branching_limit_sides(p: i64, k: i64, n: usize, a: i64, b: i64, l: &[i64], sigma: i64, ctx: &SeriesCtx) -> Result<(QPoly, QPoly)> {
    let mut full = l.to_vec();
    full.push(sigma);
    let bf = BfParams::new(p, k, n, a, b, LVec::new(full)?)?;
    let chi = branching_function(&branch_params_for(&bf, l, sigma)?, ctx)?;
    let lim = bosonic_branching_limit(p, k, n, a, b, l, sigma, ctx)?;
    Ok((chi, lim))
}

// ---------------------------------------------------------------------------
// Fermionic limits.

/// Box-escalated sum over `m = Q (mod 2)` of `q^{mBm/4 - A.m/2}` times `1/(q)_{m_j}`
/// for `j in K` and `[m_j + n_j; m_j]` otherwise, where
/// `n = (u_a + u_b + sum_{j not in K} L_j e_j - B m)/2` must be integral off `K`.
/// `bf.l` supplies `L_j` off `K` and `sigma_j = L_j mod 2` on `K`.
pub fn fermionic_limit(bf: &BfParams, k_set: &[usize], ctx: &SeriesCtx) -> Result<QPoly> {
    let ts = &bf.ts;
    let t = ts.size();
    let order = ctx.order;
    let delta = compute_delta(ts, bf.a, bf.b)?;
    let weights: Vec<i64> =
        bf.l.as_slice().iter().enumerate().map(|(i, &x)| if k_set.contains(&(i + 1)) { x.rem_euclid(2) } else { x }).collect();
    let q = bf.q_ab_with(&weights);
    let av = bf.a_vec();
    let mut v: Vec<i64> = bf.u_vec(bf.alpha).iter().zip(bf.u_vec(bf.beta)).map(|(x, y)| x + y).collect();
    for (i, &x) in bf.l.as_slice().iter().enumerate() {
        if !k_set.contains(&(i + 1)) {
            v[i] += x;
        }
    }
    let inner = order - delta;
    let boxed_sum = |reach: i64| -> Result<QPoly> {
        let lo: Vec<i64> = q.iter().map(|x| x.rem_euclid(2)).collect();
        let mut acc = QPoly::zero();
        let mut m = lo.clone();
        loop {
            let bm: Vec<i64> = (0..t).map(|j| (0..t).map(|c| ts.b[j][c] * m[c]).sum()).collect();
            let mut ok = true;
            let mut term = QPoly::q_pow(
                exp(m.iter().zip(&bm).map(|(a, b)| a * b).sum(), 4) - exp(av.iter().zip(&m).map(|(a, b)| a * b).sum(), 2),
            );
            for j in 0..t {
                if k_set.contains(&(j + 1)) {
                    continue;
                }
                let twice = v[j] - bm[j];
                if twice.is_odd() {
                    ok = false;
                    break;
                }
                term = &term * &qbinomial(m[j] + twice / 2, m[j]);
                if term.is_zero() {
                    break;
                }
            }
            if ok && !term.is_zero() {
                for &j in k_set {
                    let lo = term.min_exp().unwrap_or(inner);
                    term = term.mul_truncated(&inv_pochhammer(m[j - 1], inner - lo), inner);
                }
                acc += term.truncate(inner);
            }
            let mut i = t;
            loop {
                if i == 0 {
                    return Ok(acc);
                }
                i -= 1;
                if m[i] + 2 <= reach {
                    m[i] += 2;
                    break;
                }
                m[i] = lo[i];
            }
        }
    };
    let (v, _) = escalate(4, 2, inner, boxed_sum)?;
    Ok(v.shift(delta))
}

/// The fermionic side of the branching-function limit.
pub fn fermionic_branching(p: i64, k: i64, n: usize, a: i64, b: i64, l: &[i64], sigma: i64, ctx: &SeriesCtx) -> Result<QPoly> {
    let mut full = l.to_vec();
    full.push(sigma);
    let bf = BfParams::new(p, k, n, a, b, LVec::new(full)?)?;
    let shift = exp((b - a) * (b - a), 4 * n as i64) + quad_cinv(n, l) / int_exp(4);
    let f = fermionic_limit(&bf, &[n], &SeriesCtx { order: ctx.order + shift })?;
    Ok(f.shift(-shift).truncate(ctx.order))
}

/// `F` summed only over terms that can reach `order`.
pub fn fermionic_f_truncated(bf: &BfParams, ctx: &SeriesCtx, budget: u64) -> Result<QPoly> {
    let order = ctx.order;
    let delta = compute_delta(&bf.ts, bf.a, bf.b)?;
    let inner = order - delta;
    let b = bf.ts.b.clone();
    let av = bf.a_vec();
    let parity = bf.q_ab().iter().map(|&x| Some(x.rem_euclid(2))).collect();
    let sys = MnSystem::new(b.clone(), bf.v_vec(), parity)?;
    let t = b.len();
    let f = sys.sum(budget, |m, nv| {
        let bm: i64 = (0..t).map(|j| m[j] * (0..t).map(|c| b[j][c] * m[c]).sum::<i64>()).sum();
        let lin: i64 = av.iter().zip(m).map(|(x, y)| x * y).sum();
        let e = exp(bm, 4) - exp(lin, 2);
        // Negative rows carry Laurent binomials with negative exponents.
        let lowest: i64 = (0..t)
            .filter(|&j| m[j] + nv[j] < 0)
            .map(|j| {
                let (mm, a) = (-(m[j] + nv[j]), m[j]);
                -(a * mm + a * (a - 1) / 2)
            })
            .sum();
        if e + int_exp(lowest) > inner {
            return QPoly::zero();
        }
        let mut term = QPoly::q_pow(e);
        for j in 0..t {
            term = term.mul_truncated(&qbinomial(m[j] + nv[j], m[j]), inner - int_exp(lowest.min(0)));
        }
        term.truncate(inner)
    })?;
    Ok(f.shift(delta))
}

/// `lim F` with the components in `K` escalated together, `L_k = sigma_k + 2s`.
pub fn fermionic_escalated(bf: &BfParams, k_set: &[usize], ctx: &SeriesCtx, budget: u64) -> Result<QPoly> {
    let base = bf.l.as_slice().to_vec();
    let (v, _) = escalate(start_at(ctx.order, 0) / 2, 1, ctx.order, |s| {
        let l: Vec<i64> =
            base.iter().enumerate().map(|(i, &x)| if k_set.contains(&(i + 1)) { x.rem_euclid(2) + 2 * s } else { x }).collect();
        fermionic_f_truncated(&bf.with_l(LVec::new(l)?)?, ctx, budget)
    })?;
    Ok(v)
}

// ---------------------------------------------------------------------------
// Virasoro characters and the Durfee identity.

/// `1/(q)_inf sum_j {q^{j(pkj + p(b-bbar) - ka)} - q^{(pj+a)(kj + b - bbar)}}`.
pub fn vira_char_limit(bf: &BfParams, ctx: &SeriesCtx) -> QPoly {
    let (p, k, a) = (bf.p(), bf.k(), bf.a);
    let d = bf.b - bf.bbar;
    let order = ctx.order;
    let first = |j: i64| int_exp(j * (p * k * j + p * d - k * a));
    let second = |j: i64| int_exp((p * j + a) * (k * j + d));
    let mut theta = QPoly::zero();
    // Both exponents are >= 0 for |j| >= 1 and grow quadratically.
    for j in -(floor(order) + 2)..=floor(order) + 2 {
        if first(j) <= order {
            theta.add_term(first(j), 1.into());
        }
        if second(j) <= order {
            theta.add_term(second(j), (-1).into());
        }
    }
    let lo = theta.min_exp().unwrap_or_else(Exp::zero);
    theta.mul_truncated(&qinf_inv(order - lo), order)
}

/// `lim q^{L T^{-1} L / 4} B(L; 1/q)` with `L_m` escalated in steps of 2.
pub fn vira_escalated(bf: &BfParams, m: usize, ctx: &SeriesCtx) -> Result<QPoly> {
    if m == 0 || m > bf.n {
        return Err(Error::InvalidParams(format!("need 1 <= m <= {}", bf.n)));
    }
    let (v, _) = escalate(start_at(ctx.order, 0) + 2, 2, ctx.order, |x| {
        let l = bf.l.offset(&[(m as i64, x)]);
        let b = bosonic_b(&bf.with_l(l.clone())?)?;
        Ok(b.substitute_recip().shift(exp(l.quad_tinv(), 4)))
    })?;
    Ok(v)
}

/// `sum_{n >= m} q^{(n-m)(n+m)} / ((q)_{n-m} (q)_{n+m})` up to `order`.
pub fn durfee_sum(m: i64, ctx: &SeriesCtx) -> QPoly {
    let order = ctx.order;
    let mut acc = QPoly::zero();
    let mut n = m.max(0);
    while int_exp((n - m) * (n + m)) <= order {
        let e = int_exp((n - m) * (n + m));
        let t = inv_pochhammer(n - m, order - e).mul_truncated(&inv_pochhammer(n + m, order - e), order - e);
        acc += t.shift(e);
        n += 1;
    }
    acc
}

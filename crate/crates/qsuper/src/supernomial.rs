//! Supernomial coefficients at `q = 1` and their q-analogues.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qpoly::{binomial, exp, int_exp, pochhammer, qbinomial, Exp, HalfInt, QPoly};

/// Integer vector `L = (L_1..L_N)` together with `ell = T^{-1} L`, `ell_i = sum_j min(i,j) L_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LVec {
    l: Vec<i64>,
    ell: Vec<i64>,
}

impl LVec {
    pub fn new(l: Vec<i64>) -> Result<Self> {
        if l.is_empty() {
            return Err(Error::InvalidParams("L must have at least one entry".into()));
        }
        let n = l.len();
        let mut ell = vec![0; n];
        for (i, e) in ell.iter_mut().enumerate() {
            *e = l.iter().enumerate().map(|(j, lj)| (i.min(j) as i64 + 1) * lj).sum();
        }
        debug_assert_eq!(ell[n - 1], l.iter().enumerate().map(|(j, x)| (j as i64 + 1) * x).sum::<i64>());
        Ok(LVec { l, ell })
    }

    /// `L e_n` in dimension `dim`.
    pub fn unit(dim: usize, n: usize, value: i64) -> Result<Self> {
        let mut l = vec![0; dim];
        if (1..=dim).contains(&n) {
            l[n - 1] = value;
        }
        LVec::new(l)
    }

    pub fn n(&self) -> usize {
        self.l.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.l
    }

    /// `L_i` with `L_i = 0` outside `1..=N`.
    pub fn get(&self, i: i64) -> i64 {
        if i >= 1 && (i as usize) <= self.l.len() {
            self.l[i as usize - 1]
        } else {
            0
        }
    }

    pub fn ell(&self) -> &[i64] {
        &self.ell
    }

    pub fn ell_n(&self) -> i64 {
        self.ell[self.ell.len() - 1]
    }

    pub fn is_nonneg(&self) -> bool {
        self.l.iter().all(|&x| x >= 0)
    }

    pub fn total(&self) -> i64 {
        self.l.iter().sum()
    }

    /// `L T^{-1} L`.
    pub fn quad_tinv(&self) -> i64 {
        self.l.iter().zip(&self.ell).map(|(a, b)| a * b).sum()
    }

    /// Adds `delta` to `L_i` for each pair; indices outside `1..=N` are ignored (`e_i = 0`).
    pub fn offset(&self, shifts: &[(i64, i64)]) -> LVec {
        let mut l = self.l.clone();
        for &(i, d) in shifts {
            if i >= 1 && (i as usize) <= l.len() {
                l[i as usize - 1] += d;
            }
        }
        LVec::new(l).expect("dimension preserved")
    }

    /// Pads with zeros to dimension `m >= N`.
    pub fn padded(&self, m: usize) -> LVec {
        let mut l = self.l.clone();
        l.resize(m.max(self.l.len()), 0);
        LVec::new(l).expect("nonempty")
    }

    /// `a + ell_N / 2`, which must be an integer.
    pub fn index(&self, a: HalfInt) -> Result<i64> {
        (a + HalfInt::from_twice(self.ell_n()))
            .to_int()
            .ok_or_else(|| Error::NonIntegralIndex(format!("a = {a}, ell_N = {}", self.ell_n())))
    }
}

impl fmt::Display for LVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.l.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for LVec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let l = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad L entry {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        LVec::new(l)
    }
}

impl Serialize for LVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.l.serialize(s)
    }
}

fn gen_binomial(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    if n >= 0 {
        return binomial(n, k);
    }
    let b = binomial(-n + k - 1, k);
    if k % 2 == 0 {
        b
    } else {
        -b
    }
}

/// Coefficient of `x^idx` in `prod_j (1 + x + ... + x^j)^{L_j}` as a power series.
pub fn supernomial_q1_product(l: &LVec, idx: i64) -> BigInt {
    if idx < 0 {
        return BigInt::zero();
    }
    let d = idx as usize;
    let mut c = vec![BigInt::zero(); d + 1];
    c[0] = BigInt::one();
    for (j0, &lj) in l.as_slice().iter().enumerate() {
        let j = j0 + 1;
        for _ in 0..lj.abs() {
            if lj > 0 {
                // Multiply by (1 - x^{j+1}) / (1 - x).
                for i in (j + 1..=d).rev() {
                    let t = c[i - j - 1].clone();
                    c[i] -= t;
                }
                for i in 1..=d {
                    let t = c[i - 1].clone();
                    c[i] += t;
                }
            } else {
                // Multiply by (1 - x) / (1 - x^{j+1}).
                for i in (1..=d).rev() {
                    let t = c[i - 1].clone();
                    c[i] -= t;
                }
                for i in j + 1..=d {
                    let t = c[i - j - 1].clone();
                    c[i] += t;
                }
            }
        }
    }
    c.swap_remove(d)
}

/// The nested binomial sum over compositions `j_1 + ... + j_N = idx`.
pub fn supernomial_q1_nested(l: &LVec, idx: i64) -> BigInt {
    if idx < 0 {
        return BigInt::zero();
    }
    fn rec(l: &[i64], k: usize, upper: i64, rest: i64) -> BigInt {
        // Chooses j_k given j_{k+1} = upper - L_k, for k counting down.
        if k == 0 {
            return if rest == 0 { BigInt::one() } else { BigInt::zero() };
        }
        let lk = l[k - 1];
        let mut acc = BigInt::zero();
        for jk in 0..=rest {
            let b = gen_binomial(lk + upper, jk);
            if !b.is_zero() {
                acc += b * rec(l, k - 1, jk, rest - jk);
            }
        }
        acc
    }
    rec(l.as_slice(), l.n(), 0, idx)
}

/// Supernomial coefficient at `q = 1`, computed two ways that must agree.
pub fn supernomial_q1(l: &LVec, a: HalfInt) -> Result<BigInt> {
    let idx = l.index(a)?;
    let p = supernomial_q1_product(l, idx);
    let s = supernomial_q1_nested(l, idx);
    if p != s {
        return Err(Error::Inconsistent(format!("supernomial {l} at {a}: product {p} vs nested sum {s}")));
    }
    Ok(p)
}

/// `S_k = L_k + ... + L_N`.
fn tail_sums(l: &[i64]) -> Vec<i64> {
    let n = l.len();
    let mut s = vec![0; n + 2];
    for k in (1..=n).rev() {
        s[k] = s[k + 1] + l[k - 1];
    }
    s
}

/// Upper limit for `j_k` in the chain `[L_k + j_{k+1}; j_k]` given the remaining sum.
fn chain_cap(lk: i64, next: i64, rest: i64) -> i64 {
    let top = lk + next;
    if top >= 0 {
        rest.min(top)
    } else {
        rest
    }
}

/// q-supernomial `[L; a]` of the chained q-binomial sum.
pub fn q_supernomial(l: &LVec, a: HalfInt) -> Result<QPoly> {
    let idx = l.index(a)?;
    Ok(q_supernomial_at_index(l, idx))
}

/// q-supernomial at composition total `idx = a + ell_N/2`.
pub fn q_supernomial_at_index(l: &LVec, idx: i64) -> QPoly {
    SupernomialTable::new(l).at_index(idx)
}

/// `[L; a]` for one `L` and many `a`, sharing the chain memo between indices.
pub struct SupernomialTable {
    l: LVec,
    s: Vec<i64>,
    memo: HashMap<(usize, i64, i64), QPoly>,
}

impl SupernomialTable {
    pub fn new(l: &LVec) -> Self {
        SupernomialTable { l: l.clone(), s: tail_sums(l.as_slice()), memo: HashMap::new() }
    }

    pub fn at_index(&mut self, idx: i64) -> QPoly {
        if idx < 0 {
            return QPoly::zero();
        }
        let n = self.l.n();
        self.chain(n, 0, idx)
    }

    pub fn q_supernomial(&mut self, a: HalfInt) -> Result<QPoly> {
        let idx = self.l.index(a)?;
        Ok(self.at_index(idx))
    }

    pub fn big_t(&mut self, a: HalfInt) -> Result<QPoly> {
        let pre = big_t_prefactor(&self.l, a);
        Ok(self.q_supernomial(a)?.substitute_recip().shift(pre))
    }

    /// Sum over `j_1..j_k` with total `rest` and `j_{k+1} = next`, including
    /// the coupling `q^{j_k (S_{k+1} - next)}`.
    fn chain(&mut self, k: usize, next: i64, rest: i64) -> QPoly {
        if k == 0 {
            return if rest == 0 { QPoly::one() } else { QPoly::zero() };
        }
        if let Some(p) = self.memo.get(&(k, next, rest)) {
            return p.clone();
        }
        let lk = self.l.as_slice()[k - 1];
        let mut acc = QPoly::zero();
        let cap = if k == 1 { rest } else { chain_cap(lk, next, rest) };
        let lo = if k == 1 { rest } else { 0 };
        for jk in lo..=cap {
            let b = qbinomial(lk + next, jk);
            if b.is_zero() {
                continue;
            }
            let inner = self.chain(k - 1, jk, rest - jk);
            if inner.is_zero() {
                continue;
            }
            let coupling = jk * (self.s[k + 1] - next);
            acc += (&b * &inner).shift(int_exp(coupling));
        }
        self.memo.insert((k, next, rest), acc.clone());
        acc
    }
}

/// Exponent `L T^{-1} L / 4 - a^2 / N` of the prefactor of `T(L, a)`.
pub fn big_t_prefactor(l: &LVec, a: HalfInt) -> Exp {
    let ae = a.to_exp();
    exp(l.quad_tinv(), 4) - ae * ae / int_exp(l.n() as i64)
}

/// `T(L, a) = q^{L T^{-1} L / 4 - a^2/N} [L; a]_{1/q}`.
pub fn big_t(l: &LVec, a: HalfInt) -> Result<QPoly> {
    let s = q_supernomial(l, a)?;
    Ok(s.substitute_recip().shift(big_t_prefactor(l, a)))
}

/// `tilde T(L, a)` from its own composition sum.
pub fn tilde_t(l: &LVec, a: i64) -> QPoly {
    if a < 0 {
        return QPoly::zero();
    }
    let ls = l.as_slice();
    // Prefix sums P_{k-1} = L_1 + ... + L_{k-1}.
    let mut prefix = vec![0; ls.len() + 1];
    for k in 1..=ls.len() {
        prefix[k] = prefix[k - 1] + ls[k - 1];
    }
    fn h(
        ls: &[i64],
        prefix: &[i64],
        k: usize,
        next: i64,
        rest: i64,
        memo: &mut HashMap<(usize, i64, i64), QPoly>,
    ) -> QPoly {
        if k == 0 {
            return if rest == 0 { QPoly::one() } else { QPoly::zero() };
        }
        if let Some(p) = memo.get(&(k, next, rest)) {
            return p.clone();
        }
        let lk = ls[k - 1];
        let mut acc = QPoly::zero();
        let cap = if k == 1 { rest } else { chain_cap(lk, next, rest) };
        let lo = if k == 1 { rest } else { 0 };
        for jk in lo..=cap {
            let b = qbinomial(lk + next, jk);
            if b.is_zero() {
                continue;
            }
            let inner = h(ls, prefix, k - 1, jk, rest - jk, memo);
            if inner.is_zero() {
                continue;
            }
            acc += (&b * &inner).shift(int_exp(jk * (jk + prefix[k - 1])));
        }
        memo.insert((k, next, rest), acc.clone());
        acc
    }
    let mut memo = HashMap::new();
    h(ls, &prefix, ls.len(), 0, a, &mut memo)
}

/// `tilde T` expressed through the q-supernomial: `q^{a ell_1} [L; a - ell_N/2]_{1/q}`.
pub fn tilde_t_via_supernomial(l: &LVec, a: i64) -> QPoly {
    q_supernomial_at_index(l, a).substitute_recip().shift(int_exp(a * l.ell()[0]))
}

/// `C^{-1}_{ij} = min(i,j) - ij/N`, indices `1..N-1`.
pub fn cartan_inv(n: usize, i: usize, j: usize) -> Exp {
    exp((i.min(j) * n) as i64 - (i * j) as i64, n as i64)
}

/// `T(L, a)` from the explicit fermionic sum over `m_1..m_{N-1}`, for `L >= 0`.
pub fn big_t_explicit(l: &LVec, a: HalfInt) -> Result<QPoly> {
    if !l.is_nonneg() {
        return Err(Error::Domain(format!("explicit form needs L >= 0, got {l}")));
    }
    let idx = l.index(a)?;
    if idx < 0 || idx > l.ell_n() {
        return Err(Error::Domain(format!("a = {a} outside [-ell_N/2, ell_N/2] for L = {l}")));
    }
    let n = l.n();
    let nn = n as i64;
    let ls = l.as_slice();
    let ae = a.to_exp();
    let half = |x: i64| exp(x, 2);
    // m_i = k_i - L_i/2 with k_i >= 0; m_0 >= 0 bounds each k_i.
    let reach = half(l.ell()[0]) + ae / int_exp(nn)
        + (1..n).map(|j| cartan_inv(n, 1, j) * half(ls[j - 1])).sum::<Exp>();
    let caps: Vec<i64> = (1..n)
        .map(|i| {
            let c = reach / cartan_inv(n, 1, i);
            if c < Exp::zero() {
                -1
            } else {
                c.floor().to_integer()
            }
        })
        .collect();

    struct Term {
        exponent: Exp,
        numer: QPoly,
        k: Vec<i64>,
    }
    let mut terms: Vec<Term> = Vec::new();
    let mut ks = vec![0i64; n.saturating_sub(1)];
    let full = |caps: &[i64]| caps.iter().all(|&c| c >= 0);
    if full(&caps) {
        loop {
            let m: Vec<Exp> = (1..n).map(|i| int_exp(ks[i - 1]) - half(ls[i - 1])).collect();
            let cm = |row: usize| -> Exp {
                (1..n).map(|j| cartan_inv(n, row, j) * m[j - 1]).sum()
            };
            let (m0, m_last) = if n == 1 {
                (half(l.ell()[0]) + ae, -ae)
            } else {
                (half(l.ell()[0]) + ae / int_exp(nn) - cm(1), -ae / int_exp(nn) - cm(n - 1))
            };
            let k0 = m0;
            let k_last = m_last + half(ls[n - 1]);
            if k0.is_integer() && k0 >= Exp::zero() && k_last.is_integer() && k_last >= Exp::zero() {
                let mut all_m = vec![m0];
                all_m.extend(m.iter().copied());
                all_m.push(m_last);
                let lfull: Vec<i64> = std::iter::once(0).chain(ls.iter().copied()).collect();
                let mut quad = Exp::zero();
                for i in 1..n {
                    quad += m[i - 1] * cm(i);
                }
                let mut numer = QPoly::one();
                let mut x = Exp::zero();
                let mut kk = Vec::with_capacity(n + 1);
                for j in 0..=n {
                    x += all_m[j] - half(lfull[j]);
                    if j == n && !x.is_zero() {
                        return Err(Error::Inconsistent(format!("x_N = q^{x}, expected 1")));
                    }
                    numer = &numer * &pochhammer(x + int_exp(1), lfull[j] as u32);
                    kk.push((half(lfull[j]) + all_m[j]).to_integer());
                }
                if !numer.is_zero() {
                    terms.push(Term { exponent: quad, numer, k: kk });
                }
            }
            // Odometer over the box.
            let mut i = 0;
            loop {
                if i == ks.len() {
                    break;
                }
                if ks[i] < caps[i] {
                    ks[i] += 1;
                    break;
                }
                ks[i] = 0;
                i += 1;
            }
            if i == ks.len() {
                break;
            }
        }
    }
    if terms.is_empty() {
        return Ok(QPoly::zero());
    }
    let mut kmax = vec![0i64; n + 1];
    for t in &terms {
        for (j, &k) in t.k.iter().enumerate() {
            kmax[j] = kmax[j].max(k);
        }
    }
    let mut total = QPoly::zero();
    for t in &terms {
        let mut p = t.numer.shift(t.exponent);
        for j in 0..=n {
            let fill = pochhammer(int_exp(t.k[j] + 1), (kmax[j] - t.k[j]) as u32);
            p = &p * &fill;
        }
        total += p;
    }
    let mut denom = QPoly::one();
    for &k in &kmax {
        denom = &denom * &pochhammer(int_exp(1), k as u32);
    }
    total
        .div_exact(&denom)
        .ok_or_else(|| Error::Inconsistent(format!("explicit sum for T({l}, {a}) is not a polynomial")))
}

/// Checks both recurrences at `n` (`1 <= n <= N-1`), valid for all integer `L`.
pub fn check_recurrence(l: &LVec, a: HalfInt, n: usize) -> Result<bool> {
    if n == 0 || n >= l.n() {
        return Err(Error::InvalidParams(format!("recurrence index {n} outside 1..{}", l.n() - 1)));
    }
    let ni = n as i64;
    let down = l.offset(&[(ni, -2)]);
    let mix = l.offset(&[(ni - 1, 1), (ni, -2), (ni + 1, 1)]);
    let lhs = q_supernomial(l, a)?;
    let rhs = q_supernomial(&down, a)?.shift(int_exp(l.ell()[n - 1] - ni)) + q_supernomial(&mix, a)?;
    if lhs != rhs {
        return Ok(false);
    }
    let lhs_t = big_t(l, a)?;
    let rhs_t = big_t(&down, a)? + big_t(&mix, a)?.shift(exp(l.get(ni) - 1, 2));
    Ok(lhs_t == rhs_t)
}

/// `check_recurrence` for every `a` with `|a| <= bound / 2` of the right parity.
pub fn check_recurrence_range(l: &LVec, n: usize, bound: i64) -> Result<bool> {
    if n == 0 || n >= l.n() {
        return Err(Error::InvalidParams(format!("recurrence index {n} outside 1..{}", l.n() - 1)));
    }
    let ni = n as i64;
    let down = l.offset(&[(ni, -2)]);
    let mix = l.offset(&[(ni - 1, 1), (ni, -2), (ni + 1, 1)]);
    let (mut tl, mut td, mut tm) = (SupernomialTable::new(l), SupernomialTable::new(&down), SupernomialTable::new(&mix));
    let e = l.ell_n();
    for t in -bound..=bound {
        if (t + e).rem_euclid(2) != 0 {
            continue;
        }
        let a = HalfInt::from_twice(t);
        let rhs = td.q_supernomial(a)?.shift(int_exp(l.ell()[n - 1] - ni)) + tm.q_supernomial(a)?;
        if tl.q_supernomial(a)? != rhs {
            return Ok(false);
        }
        let rhs_t = td.big_t(a)? + tm.big_t(a)?.shift(exp(l.get(ni) - 1, 2));
        if tl.big_t(a)? != rhs_t {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the two `n = N` recurrences for `tilde T`; needs `N >= 2` and `L - 2e_N >= 0`.
pub fn check_recurrence_n(l: &LVec, a: i64) -> Result<bool> {
    let n = l.n() as i64;
    if n < 2 {
        return Err(Error::InvalidParams("n = N recurrences need N >= 2".into()));
    }
    let low = l.offset(&[(n, -2)]);
    if !low.is_nonneg() {
        return Err(Error::Domain(format!("L - 2e_N must be nonnegative, L = {l}")));
    }
    let ls = l.as_slice();
    let w0: i64 = (1..=n).map(|i| (n - i) * ls[i as usize - 1]).sum();
    let w1: i64 = (1..=n).map(|i| (n - i + 1) * ls[i as usize - 1]).sum();
    let step = l.offset(&[(n - 1, 1), (n, -1)]);
    let cross = l.offset(&[(n - 1, 1), (n, -2)]);
    let lhs = tilde_t(l, a);
    let middle = tilde_t(&low, a - n).shift(int_exp(2 * a - n + w0));
    let r42 = tilde_t(&step, a - 1).shift(int_exp(l.ell()[0])) + middle.clone() + tilde_t(&cross, a);
    let r43 = tilde_t(&step, a)
        + middle
        + tilde_t(&cross, a - n - 1).shift(int_exp(2 * a - n - 1 + w1));
    Ok(lhs == r42 && lhs == r43)
}

/// Exact rational helper for callers building exponents.
pub fn ratio(n: i64, d: i64) -> Exp {
    Ratio::new(n, d)
}

impl LVec {
    /// Sum of `j L_j`; equals `ell_N`.
    pub fn weighted_total(&self) -> i64 {
        self.l.iter().enumerate().map(|(j, x)| (j as i64 + 1) * x).sum()
    }

    /// True when `L` has a negative entry.
    pub fn has_negative(&self) -> bool {
        self.l.iter().any(|x| x.is_negative())
    }
}

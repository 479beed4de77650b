//! Acceptance criteria as executable checks, and the parallel identity sweep.
//!
//! Every criterion enumerates its cases up front, checks them on the rayon
//! pool and reports failures sorted by case label, so reports do not depend
//! on scheduling.

use std::time::Instant;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identities::{
    ag_bosonic, ag_fermionic, bosonic_b, compute_delta, fermionic_f, k1_matches_general, stability_check,
    takahashi_pairs, AgParams, BfParams, DEFAULT_BUDGET,
};
use crate::matprod::{family_properties, matrix_identity_check};
use crate::partitions::admissible_genfun;
use crate::qpoly::{binomial, exp, int_exp, qbinomial, HalfInt, QPoly};
use crate::qseries::{
    branching_limit_sides, durfee_sum, limit_check_supernomial, qinf_inv, string_function, string_function_limit,
    SeriesCtx, StringParams,
};
use crate::supernomial::{big_t, big_t_explicit, check_recurrence_n, check_recurrence_range, q_supernomial, tilde_t, LVec};
use crate::tsdecomp::{build_ts, reconstruct};

/// Pairs `(p, k)` of the main-theorem grid.
pub const THEOREM_PAIRS: [(i64, i64); 8] = [(5, 1), (7, 1), (8, 1), (5, 2), (7, 2), (9, 2), (7, 3), (8, 3)];

/// Fixed seed for the randomly drawn stability points.
pub const STABILITY_SEED: u64 = 0x5EED_0008;

/// Wall-clock limit for the full self test, in seconds.
pub const SELFTEST_LIMIT_SECS: f64 = 600.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Scale::Quick => quick,
            Scale::Full => full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    /// Up to `MAX_LISTED` failing case labels, sorted.
    pub failures: Vec<String>,
    pub failure_count: u64,
    pub seconds: f64,
}

const MAX_LISTED: usize = 20;

/// A check that yields `Ok(true)` on success.
type Case = (String, Box<dyn Fn() -> Result<bool> + Send + Sync>);

fn case<F: Fn() -> Result<bool> + Send + Sync + 'static>(label: String, f: F) -> Case {
    (label, Box::new(f))
}

fn run_cases(id: u32, name: &str, cases: Vec<Case>) -> CriterionReport {
    let start = Instant::now();
    let total = cases.len() as u64;
    let mut failures: Vec<String> = cases
        .par_iter()
        .filter_map(|(label, f)| match f() {
            Ok(true) => None,
            Ok(false) => Some(label.clone()),
            Err(e) => Some(format!("{label}: {e}")),
        })
        .collect();
    failures.sort();
    let failure_count = failures.len() as u64;
    failures.truncate(MAX_LISTED);
    CriterionReport {
        id,
        name: name.to_string(),
        passed: failure_count == 0 && total > 0,
        cases: total,
        failures,
        failure_count,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Nonnegative vectors of length `n` with `weight(v) <= s`.
fn vectors_by<W: Fn(&[i64]) -> i64>(n: usize, s: i64, weight: W) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (0..=s).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .filter(|v| weight(v) <= s)
            .collect();
    }
    out
}

fn nonneg(n: usize, total: i64) -> Vec<Vec<i64>> {
    vectors_by(n, total, |v| v.iter().sum())
}

fn boxed(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn lvec(v: &[i64]) -> LVec {
    LVec::new(v.to_vec()).expect("nonempty L")
}

/// Half-integers `a` with `|a| <= ell_N/2` and `a + ell_N/2` integral.
fn a_range(l: &LVec) -> Vec<HalfInt> {
    let e = l.ell_n().max(0);
    (0..=e).map(|i| HalfInt::from_twice(2 * i - e)).collect()
}

pub fn criterion_1(scale: Scale) -> CriterionReport {
    let total = scale.pick(4, 6);
    let mut cases = Vec::new();
    for n in 1..=3 {
        for v in nonneg(n, total) {
            for a in 0..=8 {
                let l = lvec(&v);
                cases.push(case(format!("L={l} a={a}"), move || Ok(admissible_genfun(&l, a, DEFAULT_BUDGET)? == tilde_t(&l, a))));
            }
        }
    }
    run_cases(1, "admissible partitions generate tilde T", cases)
}

pub fn criterion_2(scale: Scale) -> CriterionReport {
    let total = scale.pick(5, 8);
    let mut cases = Vec::new();
    for n in 1..=3 {
        for v in nonneg(n, total) {
            let l = lvec(&v);
            cases.push(case(format!("L={l}"), move || {
                for a in a_range(&l) {
                    if big_t_explicit(&l, a)? != big_t(&l, a)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }));
        }
    }
    run_cases(2, "explicit form of T equals the chained form", cases)
}

pub fn criterion_3(scale: Scale) -> CriterionReport {
    let (hi, max_n) = scale.pick((3, 3), (4, 4));
    let mut cases = Vec::new();
    for n_dim in 2..=max_n {
        for v in boxed(n_dim, -2, hi) {
            let l = lvec(&v);
            cases.push(case(format!("L={l}"), move || {
                for n in 1..n_dim {
                    if !check_recurrence_range(&l, n, l.ell_n().abs() + 4)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }));
        }
    }
    for n_dim in 2..=3usize {
        for v in nonneg(n_dim, scale.pick(3, 4)) {
            let l = lvec(&v).offset(&[(n_dim as i64, 2)]);
            cases.push(case(format!("top L={l}"), move || {
                for a in 0..=l.ell_n() + 1 {
                    if !check_recurrence_n(&l, a)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }));
        }
    }
    run_cases(3, "recurrences of the q-supernomials", cases)
}

pub fn criterion_4(scale: Scale) -> CriterionReport {
    let bound = scale.pick(8, 12);
    let mut cases = Vec::new();
    for n in 1..=4usize {
        let weighted = |v: &[i64]| v.iter().enumerate().map(|(j, x)| (j as i64 + 1) * x).sum::<i64>();
        for v in vectors_by(n, bound, weighted) {
            let l = lvec(&v);
            cases.push(case(format!("L={l}"), move || {
                for a in a_range(&l) {
                    if q_supernomial(&l, a)? != q_supernomial(&l, -a)? || big_t(&l, a)? != big_t(&l, -a)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }));
        }
    }
    run_cases(4, "symmetry under a -> -a", cases)
}

pub fn criterion_5(scale: Scale) -> CriterionReport {
    let top = scale.pick(2, 3);
    let mut cases = Vec::new();
    for k in 1..=3usize {
        for m in boxed(k, 0, top) {
            for a in 1..=k as i64 + 1 {
                let Ok(p) = AgParams::new(k, a, m.clone()) else { continue };
                if !p.l_vec().is_nonneg() {
                    continue;
                }
                cases.push(case(format!("k={k} a={a} M={m:?}"), move || Ok(ag_fermionic(&p, DEFAULT_BUDGET)? == ag_bosonic(&p)?)));
            }
        }
    }
    for m in 0..=1 {
        cases.push(case(format!("P({m}) = 1"), move || {
            let p = AgParams::new(1, 2, vec![m])?;
            Ok(ag_fermionic(&p, DEFAULT_BUDGET)? == QPoly::one())
        }));
    }
    run_cases(5, "Andrews-Gordon finitizations", cases)
}

/// Every grid point of the main theorem: valid `N`, Takahashi `(a, b)` with `beta >= N`, parity, `sum L <= total`.
pub fn theorem_grid(pairs: &[(i64, i64)], total: i64, n_max: Option<usize>) -> Vec<SweepPoint> {
    let mut out = Vec::new();
    for &(p, k) in pairs {
        let Ok(ts) = build_ts(p, k) else { continue };
        let mut n = 1usize;
        while (n as i64 + 1) * k < p - 1 && n_max.is_none_or(|m| n <= m) {
            for (a, b) in takahashi_pairs(&ts) {
                for v in nonneg(n, total) {
                    let Ok(bf) = BfParams::new(p, k, n, a, b, lvec(&v)) else { continue };
                    if bf.theorem_applies() {
                        out.push(SweepPoint { p, k, n, a, b, l: v });
                    }
                }
            }
            n += 1;
        }
    }
    out
}

pub fn criterion_6(scale: Scale) -> CriterionReport {
    let grid = theorem_grid(&THEOREM_PAIRS, scale.pick(3, 4), None);
    let cases = grid.into_iter().map(|pt| case(pt.label(), move || pt.check())).collect();
    run_cases(6, "bosonic B equals fermionic F", cases)
}

pub fn criterion_7(_scale: Scale) -> CriterionReport {
    let mut cases = Vec::new();
    for p in 5..=8i64 {
        let ts = build_ts(p, 1).expect("k = 1 decomposition");
        for (a, b) in takahashi_pairs(&ts) {
            let ts = ts.clone();
            cases.push(case(format!("Delta p={p} a={a} b={b}"), move || Ok(compute_delta(&ts, a, b)? == exp(b - a, 4))));
            for n in 1..p as usize - 2 {
                for v in nonneg(n, 3) {
                    let l = lvec(&v);
                    if BfParams::new(p, 1, n, a, b, l.clone()).is_ok_and(|bf| bf.theorem_applies()) {
                        cases.push(case(format!("p={p} N={n} a={a} b={b} L={l}"), move || {
                            k1_matches_general(p, n, a, b, &l, DEFAULT_BUDGET)
                        }));
                    }
                }
            }
        }
    }
    run_cases(7, "k = 1 closed forms", cases)
}

/// Ten stability points drawn from the main-theorem grid with `sum L <= 3`,
/// each padded to a random `M` with `N < M <= rank`.
pub fn stability_points(seed: u64) -> Vec<(SweepPoint, usize)> {
    let rank = |pt: &SweepPoint| build_ts(pt.p, pt.k).map(|ts| ts.size()).unwrap_or(0);
    let grid: Vec<(SweepPoint, usize)> =
        theorem_grid(&THEOREM_PAIRS, 3, None).into_iter().map(|pt| (rank(&pt), pt)).filter(|(r, pt)| pt.n < *r).map(|(r, pt)| (pt, r)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..10)
        .map(|_| {
            let (pt, rank) = grid[rng.random_range(0..grid.len())].clone();
            let m = rng.random_range(pt.n + 1..=rank);
            (pt, m)
        })
        .collect()
}

pub fn criterion_8(_scale: Scale) -> CriterionReport {
    let cases = stability_points(STABILITY_SEED)
        .into_iter()
        .map(|(pt, m)| {
            case(format!("{} M={m}", pt.label()), move || {
                let (b_ok, f_ok) = stability_check(&pt.params()?, m, DEFAULT_BUDGET)?;
                Ok(b_ok && f_ok)
            })
        })
        .collect();
    run_cases(8, "stability under zero padding", cases)
}

pub fn criterion_9(scale: Scale) -> CriterionReport {
    let max_p = scale.pick(25, 40);
    let mut cases = Vec::new();
    for p in 3..=max_p {
        for k in 1..p {
            if 2 * k >= p || p.gcd(&k) != 1 {
                continue;
            }
            cases.push(case(format!("p={p} k={k}"), move || {
                let d = build_ts(p, k)?;
                let mut ok = reconstruct(d.n, &d.nu) == num_rational::Ratio::new(p, k)
                    && d.y_m(d.n as i64 + 1) == p
                    && d.ybar_m(d.n as i64 + 1) == p - k;
                if k == 1 && p >= 4 {
                    let size = (p - 3) as usize;
                    ok &= d.size() == size;
                    for i in 0..size {
                        for j in 0..size {
                            ok &= d.b[i][j] == 2 * i64::from(i == j) - i64::from(i.abs_diff(j) == 1);
                        }
                    }
                }
                Ok(ok)
            }));
        }
    }
    run_cases(9, "Takahashi-Suzuki decomposition", cases)
}

pub fn criterion_10(scale: Scale) -> CriterionReport {
    let order = scale.pick(8, 12);
    let ctx = SeriesCtx::new(order);
    let mut cases = Vec::new();
    for n in 1..=3 {
        for v in nonneg(n, 2) {
            for a in 0..=3 {
                for m in 1..=n {
                    let l = lvec(&v);
                    cases.push(case(format!("[L;a] limit L={l} a={a} m={m}"), move || limit_check_supernomial(&l, a, m, &ctx)));
                }
            }
        }
    }
    for n in 2..=3usize {
        for v in nonneg(n - 1, 1) {
            for sigma in 0..=1 {
                for a in 0..=n as i64 {
                    let Ok(sp) = StringParams::new(n, v.clone(), sigma, a) else { continue };
                    cases.push(case(format!("string N={n} L={v:?} sigma={sigma} a={a}"), move || {
                        Ok(string_function(&sp, &ctx)? == string_function_limit(&sp, &ctx)?)
                    }));
                }
            }
        }
    }
    for (p, k, n, a, b, l, sigma) in [
        (5, 1, 1, 1, 3, vec![], 0),
        (7, 2, 1, 1, 2, vec![], 1),
        (8, 3, 1, 2, 3, vec![], 1),
        (7, 1, 2, 1, 3, vec![0], 0),
        (7, 1, 2, 2, 3, vec![1], 0),
    ] {
        cases.push(case(format!("branching {p}/{k} N={n} a={a} b={b} L={l:?} sigma={sigma}"), move || {
            let (chi, lim) = branching_limit_sides(p, k, n, a, b, &l, sigma, &ctx)?;
            Ok(chi == lim)
        }));
    }
    let durfee = SeriesCtx::new(20);
    for m in 0..=3 {
        cases.push(case(format!("Durfee m={m}"), move || Ok(durfee_sum(m, &durfee) == qinf_inv(durfee.order))));
    }
    run_cases(10, "limits of the polynomials", cases)
}

pub fn criterion_11(scale: Scale) -> CriterionReport {
    let total = scale.pick(4, 5);
    let mut cases = Vec::new();
    for p in 4..=7i64 {
        for v in nonneg((p - 3) as usize, total) {
            let l = lvec(&v);
            cases.push(case(format!("p={p} L={l}"), move || {
                for a in 1..p {
                    for b in 1..p {
                        match matrix_identity_check(p, &l, a, b) {
                            Ok(true) | Err(Error::InvalidParams(_)) => {}
                            Ok(false) => return Ok(false),
                            Err(e) => return Err(e),
                        }
                    }
                }
                Ok(true)
            }));
        }
    }
    for p in 4..=9 {
        cases.push(case(format!("family p={p}"), move || Ok(family_properties(p)?.all())));
    }
    run_cases(11, "matrix product identity", cases)
}

pub fn criterion_12(_scale: Scale) -> CriterionReport {
    let mut cases = Vec::new();
    for l in 0..=8i64 {
        cases.push(case(format!("expansion L={l}"), move || {
            // Coefficients in x of prod_{i<L} (1 + x q^i).
            let mut coeffs = vec![QPoly::one()];
            for i in 0..l {
                let mut next = vec![QPoly::zero(); coeffs.len() + 1];
                for (k, c) in coeffs.iter().enumerate() {
                    next[k] += c;
                    next[k + 1] += c.shift(int_exp(i));
                }
                coeffs = next;
            }
            Ok((0..=l + 2).all(|a| {
                let expect = coeffs.get(a as usize).cloned().unwrap_or_default();
                qbinomial(l, a).shift(int_exp(a * (a - 1) / 2)) == expect
            }))
        }));
    }
    for l in 0..=9i64 {
        cases.push(case(format!("reciprocal L={l}"), move || {
            Ok((0..=l).all(|a| {
                let b = qbinomial(l, a);
                b.substitute_recip() == b.shift(int_exp(-a * (l - a))) && b.eval_at_one() == binomial(l, a)
            }))
        }));
    }
    for l in -4..=8i64 {
        cases.push(case(format!("recurrences L={l}"), move || {
            Ok((-2..=10i64).all(|a| {
                let lhs = qbinomial(l, a);
                lhs == qbinomial(l - 1, a - 1) + qbinomial(l - 1, a).shift(int_exp(a))
                    && lhs == qbinomial(l - 1, a) + qbinomial(l - 1, a - 1).shift(int_exp(l - a))
            }))
        }));
    }
    run_cases(12, "q-binomial layer", cases)
}

pub type CriterionFn = fn(Scale) -> CriterionReport;

pub const CRITERIA: [CriterionFn; 12] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub scale: Scale,
    pub criteria: Vec<CriterionReport>,
    pub seconds: f64,
    pub passed: bool,
}

/// Runs criteria 1 to 12 in order.
pub fn selftest(scale: Scale) -> SelftestReport {
    let start = Instant::now();
    let criteria: Vec<CriterionReport> = CRITERIA.iter().map(|f| f(scale)).collect();
    let passed = criteria.iter().all(|c| c.passed);
    SelftestReport { scale, criteria, seconds: start.elapsed().as_secs_f64(), passed }
}

// ---------------------------------------------------------------------------
// Sweeps.

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: i64,
    pub k: i64,
    pub n: usize,
    pub a: i64,
    pub b: i64,
    pub l: Vec<i64>,
}

impl SweepPoint {
    pub fn label(&self) -> String {
        format!("{}/{} N={} a={} b={} L={:?}", self.p, self.k, self.n, self.a, self.b, self.l)
    }

    pub fn params(&self) -> Result<BfParams> {
        BfParams::new(self.p, self.k, self.n, self.a, self.b, LVec::new(self.l.clone())?)
    }

    pub fn check(&self) -> Result<bool> {
        let bf = self.params()?;
        Ok(bosonic_b(&bf)? == fermionic_f(&bf, DEFAULT_BUDGET)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default = "default_pairs")]
    pub pairs: Vec<(i64, i64)>,
    /// Largest `N`; all valid `N` when absent.
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default = "default_l_budget")]
    pub l_budget: i64,
    /// Not echoed in reports, which must not depend on it.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing)]
    pub output: Option<String>,
}

fn default_pairs() -> Vec<(i64, i64)> {
    THEOREM_PAIRS.to_vec()
}

fn default_l_budget() -> i64 {
    4
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { pairs: default_pairs(), n_max: None, l_budget: default_l_budget(), workers: None, output: None }
    }
}

impl SweepConfig {
    /// `QSUPER_WORKERS` wins over the configured count; the default is the rayon default.
    pub fn effective_workers(&self) -> Result<Option<usize>> {
        match std::env::var("QSUPER_WORKERS") {
            Ok(s) => s
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&w| w > 0)
                .map(Some)
                .ok_or_else(|| Error::Parse(format!("QSUPER_WORKERS = {s:?} is not a positive integer"))),
            Err(_) => Ok(self.workers),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.l_budget < 0 {
            return Err(Error::InvalidParams("l_budget must be >= 0".into()));
        }
        for &(p, k) in &self.pairs {
            build_ts(p, k)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointResult {
    #[serde(flatten)]
    pub point: SweepPoint,
    pub status: PointStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Exit code class of the error, if any.
    #[serde(skip)]
    pub error_code: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub config: SweepConfig,
    pub points: Vec<PointResult>,
    pub passed: u64,
    pub failed: u64,
    pub errors: u64,
}

impl SweepReport {
    /// 0 when every point passes, 1 on any failure, else the worst error code.
    pub fn exit_code(&self) -> i32 {
        if self.failed > 0 {
            return 1;
        }
        self.points.iter().filter_map(|p| p.error_code).max().unwrap_or(0)
    }

    /// The report with per-point timings removed.
    pub fn without_timing(&self) -> SweepReport {
        let mut r = self.clone();
        for p in &mut r.points {
            p.millis = None;
        }
        r
    }
}

/// Checks every grid point on a pool of the configured size; points come back in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let grid = theorem_grid(&config.pairs, config.l_budget, config.n_max);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.effective_workers()? {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?;
    let points: Vec<PointResult> = pool.install(|| {
        grid.into_par_iter()
            .map(|pt| {
                let start = Instant::now();
                let outcome = pt.check();
                let millis = Some(start.elapsed().as_secs_f64() * 1e3);
                let (status, detail, error_code) = match outcome {
                    Ok(true) => (PointStatus::Pass, None, None),
                    Ok(false) => (PointStatus::Fail, Some("B != F".to_string()), None),
                    Err(e) => (PointStatus::Error, Some(e.to_string()), Some(e.exit_code())),
                };
                PointResult { point: pt, status, detail, error_code, millis }
            })
            .collect()
    });
    let count = |s: PointStatus| points.iter().filter(|p| p.status == s).count() as u64;
    Ok(SweepReport {
        schema: 1,
        config: config.clone(),
        passed: count(PointStatus::Pass),
        failed: count(PointStatus::Fail),
        errors: count(PointStatus::Error),
        points,
    })
}

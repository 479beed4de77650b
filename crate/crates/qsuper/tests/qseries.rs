use num_bigint::BigInt;
use proptest::prelude::*;
use qsuper::identities::{BfParams, DEFAULT_BUDGET};
use qsuper::qpoly::{exp, int_exp, pochhammer, Exp};
use qsuper::qseries::*;
use qsuper::{Error, LVec, QPoly};

fn lv(v: &[i64]) -> LVec {
    LVec::new(v.to_vec()).unwrap()
}

fn ctx(order: i64) -> SeriesCtx {
    SeriesCtx::new(order)
}

fn poly(terms: &[(i64, i64)]) -> QPoly {
    QPoly::from_terms(terms.iter().map(|&(e, c)| (int_exp(e), BigInt::from(c))))
}

/// Partition counts by direct recursion, as an oracle for `1/(q)_inf`.
fn partitions_upto(n: usize) -> Vec<i64> {
    let mut p = vec![0i64; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            p[total] += p[total - part];
        }
    }
    p
}

/// Nonnegative vectors of length `n` with total at most `s`.
fn small_l(n: usize, s: i64) -> Vec<Vec<i64>> {
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
            .collect();
    }
    out.into_iter().filter(|v| v.iter().sum::<i64>() <= s).collect()
}

#[test]
fn inv_pochhammer_examples() {
    assert_eq!(inv_pochhammer(1, int_exp(4)), poly(&[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)]));
    assert_eq!(inv_pochhammer(2, int_exp(4)), poly(&[(0, 1), (1, 1), (2, 2), (3, 2), (4, 3)]));
    assert_eq!(inv_pochhammer(0, int_exp(4)), QPoly::one());
    assert_eq!(inv_pochhammer(3, int_exp(-1)), QPoly::zero());
}

#[test]
fn qinf_inv_counts_partitions() {
    let p = partitions_upto(30);
    let series = qinf_inv(int_exp(30));
    for (n, &c) in p.iter().enumerate() {
        assert_eq!(series.coeff(&int_exp(n as i64)), BigInt::from(c), "p({n})");
    }
}

proptest! {
    #[test]
    fn inv_pochhammer_inverts_pochhammer(a in 0i64..8, order in 0i64..25) {
        let o = int_exp(order);
        let prod = inv_pochhammer(a, o).mul_truncated(&pochhammer(int_exp(1), a as u32), o);
        prop_assert_eq!(prod, QPoly::one());
    }

    #[test]
    fn pochhammer_series_matches_exact_product(num in -12i64..12, den in 1i64..3, n in 0i64..6, order in 0i64..15) {
        let s = exp(num, den);
        let exact = pochhammer(s, n as u32).truncate(int_exp(order));
        prop_assert_eq!(pochhammer_series(s, Some(n), int_exp(order)), exact);
    }

    #[test]
    fn infinite_pochhammer_is_a_long_finite_one(num in -6i64..8, order in 0i64..12) {
        let s = exp(num, 2);
        let o = int_exp(order);
        prop_assert_eq!(pochhammer_series(s, None, o), pochhammer(s, 40).truncate(o));
    }
}

#[test]
fn limit_check_examples() {
    assert!(limit_check_supernomial(&lv(&[0, 0]), 2, 1, &ctx(6)).unwrap());
    assert!(limit_check_supernomial(&lv(&[0, 0]), 2, 2, &ctx(6)).unwrap());
    assert!(matches!(limit_check_supernomial(&lv(&[0, 0]), 2, 3, &ctx(6)), Err(Error::InvalidParams(_))));
}

#[test]
fn supernomial_limit_is_independent_of_the_escalated_component() {
    for n in 1..=3 {
        for l in small_l(n, 2) {
            for a in 0..=3 {
                for m in 1..=n {
                    assert!(limit_check_supernomial(&lv(&l), a, m, &ctx(6)).unwrap(), "L = {l:?}, a = {a}, m = {m}");
                }
            }
        }
    }
}

#[test]
fn escalation_reports_divergence() {
    let r = escalate(0, 1, int_exp(3), |x| Ok(QPoly::constant(x)));
    assert!(matches!(r, Err(Error::NoConvergence(_))));
}

#[test]
fn string_function_at_rank_one_is_the_partition_series() {
    let sp = StringParams::new(1, vec![], 0, 0).unwrap();
    assert_eq!(string_function(&sp, &ctx(12)).unwrap(), qinf_inv(int_exp(12)));
    assert!(matches!(StringParams::new(1, vec![], 0, 1), Err(Error::InvalidParams(_))));
    assert!(matches!(StringParams::new(2, vec![], 0, 0), Err(Error::InvalidParams(_))));
}

fn string_cases(max_n: usize) -> Vec<StringParams> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for l in small_l(n - 1, 2) {
            for sigma in 0..=1 {
                for a in -2..=(n as i64 + 2) {
                    if let Ok(sp) = StringParams::new(n, l.clone(), sigma, a) {
                        out.push(sp);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn string_function_symmetries() {
    let c = ctx(8);
    let f = |n: usize, l: &[i64], sigma: i64, a: i64| string_function(&StringParams::new(n, l.to_vec(), sigma, a).unwrap(), &c).unwrap();
    for sp in string_cases(4) {
        let (n, l, s, a) = (sp.n, &sp.l, sp.sigma, sp.a);
        let nn = n as i64;
        let base = f(n, l, s, a);
        assert_eq!(base, f(n, l, s, -a), "{sp:?} a -> -a");
        assert_eq!(base, f(n, l, s, a + 2 * nn), "{sp:?} a -> a + 2N");
        assert_eq!(base, f(n, l, 1 - s, nn - a), "{sp:?} a -> N - a");
        let rev: Vec<i64> = l.iter().rev().copied().collect();
        let s_rev = (s + l.iter().sum::<i64>()).rem_euclid(2);
        assert_eq!(base, f(n, &rev, s_rev, a), "{sp:?} reflected L");
    }
}

#[test]
fn string_function_is_a_limit_of_t() {
    let c = ctx(6);
    for sp in string_cases(3) {
        assert_eq!(string_function(&sp, &c).unwrap(), string_function_limit(&sp, &c).unwrap(), "{sp:?}");
    }
}

#[test]
fn b_function_forms_agree_for_one_component() {
    let c = ctx(6);
    for sp in string_cases(3) {
        let n = sp.n;
        let mut l = sp.l.clone();
        l.push(0);
        let mut sigma = vec![0; n];
        sigma[n - 1] = sp.sigma;
        let bp = BFuncParams::new(n, vec![n], l, sigma, sp.a).unwrap();
        let b = b_function(&bp, &c).unwrap();
        assert_eq!(b, b_function_top(&bp, &c).unwrap(), "{bp:?}");
        // b = q^{N L C^{-1} L / (4(N+2))} c.
        let shift = exp(n as i64, 4 * (n as i64 + 2)) * quad_cinv(n, &sp.l);
        let string = string_function(&sp, &SeriesCtx { order: c.order - shift }).unwrap();
        assert_eq!(b, string.shift(shift), "{bp:?}");
    }
}

#[test]
fn b_function_is_a_limit_of_t() {
    let c = ctx(5);
    let mut checked = 0;
    for n in 1..=3usize {
        for mask in 1u32..(1 << n) {
            let k: Vec<usize> = (1..=n).filter(|j| mask >> (j - 1) & 1 == 1).collect();
            for l in small_l(n, 1) {
                for sigma in small_l(n, n as i64).into_iter().filter(|s| s.iter().all(|&x| x <= 1)) {
                    for a in 0..=2 {
                        let Ok(bp) = BFuncParams::new(n, k.clone(), l.clone(), sigma.clone(), a) else { continue };
                        let b = b_function(&bp, &c).unwrap();
                        assert_eq!(b, b_function_limit(&bp, &c).unwrap(), "{bp:?}");
                        if bp.in_k(n) {
                            assert_eq!(b, b_function_top(&bp, &c).unwrap(), "{bp:?}");
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100, "only {checked} cases");
}

#[test]
fn b_function_rejects_bad_parameters() {
    assert!(BFuncParams::new(2, vec![], vec![0, 0], vec![0, 0], 0).is_err());
    assert!(BFuncParams::new(2, vec![2, 1], vec![0, 0], vec![0, 0], 0).is_err());
    assert!(BFuncParams::new(2, vec![2], vec![0, 0], vec![0, 2], 0).is_err());
    let bp = BFuncParams::new(2, vec![1], vec![0, 0], vec![0, 0], 0).unwrap();
    assert!(matches!(b_function_top(&bp, &ctx(4)), Err(Error::InvalidParams(_))));
}

/// `chi_{r,s}^{(P,P')}` from the alternating sum of Virasoro characters.
fn virasoro_oracle(pp: i64, ppp: i64, r: i64, s: i64, order: i64) -> QPoly {
    let mut theta = QPoly::zero();
    for j in -order - 2..=order + 2 {
        let e1 = j * (j * pp * ppp + ppp * r - pp * s);
        let e2 = (j * pp + r) * (j * ppp + s);
        if e1 <= order {
            theta.add_term(int_exp(e1), BigInt::from(1));
        }
        if e2 <= order {
            theta.add_term(int_exp(e2), BigInt::from(-1));
        }
    }
    theta.mul_truncated(&qinf_inv(int_exp(order)), int_exp(order))
}

#[test]
fn rank_one_branching_functions_are_virasoro_characters() {
    let c = ctx(10);
    for (p, pp) in [(3, 4), (4, 5), (2, 5), (3, 5), (5, 7)] {
        for r in 1..p {
            for s in 1..pp {
                let bp = BranchParams::new(1, p, pp, r, s, vec![], (r - s).rem_euclid(2)).unwrap();
                assert_eq!(branching_function(&bp, &c).unwrap(), virasoro_oracle(p, pp, r, s, 10), "({p},{pp}) r = {r}, s = {s}");
            }
        }
    }
}

#[test]
fn branching_parameters_are_validated() {
    assert!(BranchParams::new(2, 3, 4, 1, 1, vec![0], 0).is_err());
    assert!(BranchParams::new(2, 3, 9, 1, 1, vec![0], 0).is_err());
    assert!(BranchParams::new(1, 3, 4, 3, 1, vec![], 0).is_err());
    assert!(BranchParams::new(1, 3, 4, 1, 2, vec![], 0).is_err());
}

/// Parameters `(p, k, N, a, b, L_1..L_{N-1}, sigma)` with a valid branching side.
fn branching_cases() -> Vec<(i64, i64, usize, i64, i64, Vec<i64>, i64)> {
    let mut out = Vec::new();
    for (p, k) in [(5, 1), (7, 1), (7, 2), (8, 3), (9, 2)] {
        let ts = qsuper::tsdecomp::build_ts(p, k).unwrap();
        for n in 1..=2usize {
            for (a, b) in qsuper::identities::takahashi_pairs(&ts) {
                for l in small_l(n - 1, 1) {
                    for sigma in 0..=1 {
                        let mut full = l.clone();
                        full.push(sigma);
                        let Ok(bf) = BfParams::new(p, k, n, a, b, lv(&full)) else { continue };
                        if branch_params_for(&bf, &l, sigma).is_ok() {
                            out.push((p, k, n, a, b, l.clone(), sigma));
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn bosonic_limit_is_a_branching_function() {
    let c = ctx(6);
    let cases = branching_cases();
    assert!(cases.len() >= 20, "only {} cases", cases.len());
    for (p, k, n, a, b, l, sigma) in cases {
        let (chi, lim) = branching_limit_sides(p, k, n, a, b, &l, sigma, &c).unwrap();
        assert_eq!(chi, lim, "{p}/{k} N = {n}, a = {a}, b = {b}, L = {l:?}, sigma = {sigma}");
    }
}

#[test]
fn fermionic_limit_is_a_branching_function() {
    let c = ctx(6);
    for (p, k, n, a, b, l, sigma) in branching_cases() {
        let (chi, _) = branching_limit_sides(p, k, n, a, b, &l, sigma, &c).unwrap();
        let ferm = fermionic_branching(p, k, n, a, b, &l, sigma, &c).unwrap();
        assert_eq!(chi, ferm, "{p}/{k} N = {n}, a = {a}, b = {b}, L = {l:?}, sigma = {sigma}");
    }
}

#[test]
fn branching_sigma_absorbs_b_minus_bbar() {
    // 8/3 with b = 3 has bbar = 2, so N (b - bbar) is odd and sigma must shift.
    let bf = BfParams::new(8, 3, 1, 2, 3, lv(&[1])).unwrap();
    assert_eq!(bf.b - bf.bbar, 1);
    let shifted = branch_params_for(&bf, &[], 1).unwrap();
    assert_eq!(shifted.sigma, 0);
    assert!(BranchParams::new(1, 5, 8, bf.r, bf.a, vec![], 1).is_err());
}

#[test]
fn multi_component_fermionic_limit() {
    let c = ctx(6);
    let bf = BfParams::new(7, 1, 2, 1, 3, lv(&[2, 0])).unwrap();
    let escalated = fermionic_escalated(&bf, &[1, 2], &c, DEFAULT_BUDGET).unwrap();
    assert_eq!(escalated, fermionic_limit(&bf, &[1, 2], &c).unwrap());
    assert!(!escalated.is_zero());
}

#[test]
fn truncated_fermionic_matches_the_full_sum() {
    let c = ctx(5);
    for (p, k, n, a, b, l) in [(7, 2, 1, 1, 2, vec![3]), (8, 3, 1, 2, 3, vec![3]), (7, 1, 2, 1, 3, vec![2, 1])] {
        let bf = BfParams::new(p, k, n, a, b, lv(&l)).unwrap();
        let full = qsuper::identities::fermionic_f(&bf, DEFAULT_BUDGET).unwrap().truncate(c.order);
        assert_eq!(fermionic_f_truncated(&bf, &c, DEFAULT_BUDGET).unwrap(), full, "{p}/{k} L = {l:?}");
    }
}

#[test]
fn virasoro_limit_of_the_reciprocal_bosonic_sum() {
    let c = ctx(8);
    let mut nonzero = 0;
    for (p, k, n, a, b, l) in [
        (7, 2, 1, 1, 2, vec![1]),
        (8, 3, 1, 2, 3, vec![1]),
        (8, 3, 1, 1, 5, vec![0]),
        (9, 2, 2, 1, 2, vec![1, 0]),
        (9, 2, 2, 2, 3, vec![1, 1]),
        (7, 1, 2, 1, 3, vec![2, 1]),
    ] {
        let Ok(bf) = BfParams::new(p, k, n, a, b, lv(&l)) else { panic!("{p}/{k} a = {a}, b = {b}, L = {l:?}") };
        let v = vira_char_limit(&bf, &c);
        if !v.is_zero() {
            nonzero += 1;
        }
        for m in 1..=n {
            assert_eq!(vira_escalated(&bf, m, &c).unwrap(), v, "{p}/{k} a = {a}, b = {b}, L = {l:?}, m = {m}");
        }
    }
    assert!(nonzero >= 3);
}

#[test]
fn durfee_identity() {
    let target = qinf_inv(int_exp(20));
    for m in 0..=3 {
        assert_eq!(durfee_sum(m, &ctx(20)), target, "m = {m}");
    }
}

#[test]
fn series_are_truncated_at_the_order() {
    let c = ctx(5);
    let top = |q: &QPoly| q.max_exp().unwrap_or_else(|| Exp::from_integer(0));
    let sp = StringParams::new(3, vec![1, 1], 1, 0).unwrap();
    assert!(top(&string_function(&sp, &c).unwrap()) <= c.order);
    let bp = BranchParams::new(2, 5, 7, 1, 2, vec![1], 0).unwrap();
    assert!(top(&branching_function(&bp, &c).unwrap()) <= c.order);
}

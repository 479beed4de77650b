use num_bigint::BigInt;
use proptest::prelude::*;
use qsuper::qpoly::{exp, int_exp, qbinomial};
use qsuper::supernomial::*;
use qsuper::{Error, HalfInt, LVec, QPoly};

fn lv(v: &[i64]) -> LVec {
    LVec::new(v.to_vec()).unwrap()
}

fn h(twice: i64) -> HalfInt {
    HalfInt::from_twice(twice)
}

fn poly(terms: &[(i64, i64)]) -> QPoly {
    QPoly::from_terms(terms.iter().map(|&(e, c)| (int_exp(e), c)))
}

/// Every composition of `total` into `n` nonnegative parts, no pruning.
fn compositions(n: usize, total: i64) -> Vec<Vec<i64>> {
    if n == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(n - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The chained q-binomial sum written out term by term.
fn naive_q_supernomial(l: &LVec, idx: i64) -> QPoly {
    if idx < 0 {
        return QPoly::zero();
    }
    let ls = l.as_slice();
    let n = ls.len();
    let mut acc = QPoly::zero();
    for j in compositions(n, idx) {
        let jn = |k: usize| if k < n { j[k] } else { 0 };
        let mut e = 0;
        for k in 1..n {
            let tail: i64 = ls[k..].iter().sum();
            e += j[k - 1] * (tail - j[k]);
        }
        let mut term = QPoly::q_pow(int_exp(e));
        for k in 0..n {
            term = &term * &qbinomial(ls[k] + jn(k + 1), j[k]);
        }
        acc += term;
    }
    acc
}

fn nonneg_vectors(n: usize, max_sum: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for s in 0..=max_sum {
        out.extend(compositions(n, s));
    }
    out
}

fn box_vectors(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
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

/// Half-integers `a` with `a + ell_N/2` in `0..=ell_N`.
fn a_range(l: &LVec) -> Vec<HalfInt> {
    let e = l.ell_n();
    (0..=e.max(0)).map(|i| h(2 * i - e)).collect()
}

#[test]
fn lvec_basics() {
    let l = lv(&[1, 2, 3]);
    assert_eq!(l.ell(), &[6, 11, 14]);
    assert_eq!(l.ell_n(), 1 + 4 + 9);
    assert_eq!(l.quad_tinv(), 6 + 22 + 42);
    assert_eq!("1, 2,3".parse::<LVec>().unwrap(), l);
    assert!(LVec::new(vec![]).is_err());
    assert_eq!(l.offset(&[(0, 5), (2, -2), (4, 1)]).as_slice(), &[1, 0, 3]);
    assert!(matches!(l.index(h(1)), Err(Error::NonIntegralIndex(_))));
}

#[test]
fn q1_examples() {
    for n in 1..=3 {
        let z = LVec::new(vec![0; n]).unwrap();
        assert_eq!(supernomial_q1(&z, h(0)).unwrap(), BigInt::from(1));
        assert_eq!(supernomial_q1(&z, h(2)).unwrap(), BigInt::from(0));
        assert_eq!(supernomial_q1(&z, h(-4)).unwrap(), BigInt::from(0));
    }
    let l = lv(&[1, 1]);
    let got: Vec<BigInt> = [-3, -1, 1, 3].iter().map(|&t| supernomial_q1(&l, h(t)).unwrap()).collect();
    assert_eq!(got, [1, 2, 2, 1].map(BigInt::from));
    assert_eq!(supernomial_q1(&lv(&[0, 2]), h(0)).unwrap(), BigInt::from(3));
    assert!(supernomial_q1(&l, h(0)).is_err());
}

#[test]
fn q1_product_and_nested_agree_for_negative_entries() {
    for v in box_vectors(3, -2, 2) {
        let l = LVec::new(v).unwrap();
        for idx in 0..=8 {
            assert_eq!(supernomial_q1_product(&l, idx), supernomial_q1_nested(&l, idx), "L={l} idx={idx}");
        }
    }
}

#[test]
fn q1_recurrences() {
    for n_dim in 2..=3usize {
        for v in box_vectors(n_dim, -2, 3) {
            let l = LVec::new(v).unwrap();
            for n in 1..n_dim as i64 {
                let mix = l.offset(&[(n - 1, 1), (n, -2), (n + 1, 1)]);
                let low = l.offset(&[(n, -2)]);
                for idx in 0..=10 {
                    let lhs = supernomial_q1_product(&l, idx);
                    let rhs = supernomial_q1_product(&mix, idx) + supernomial_q1_product(&low, idx - n);
                    assert_eq!(lhs, rhs, "L={l} n={n} idx={idx}");
                }
            }
        }
    }
}

#[test]
fn q_supernomial_examples() {
    let l = lv(&[1, 1]);
    assert_eq!(q_supernomial(&l, h(-1)).unwrap(), poly(&[(0, 1), (1, 1)]));
    assert_eq!(q_supernomial(&l, h(3)).unwrap(), QPoly::one());
    for big_l in 0..=6 {
        for n in 1..=3 {
            let l = LVec::unit(n, 1, big_l).unwrap();
            for t in -big_l - 2..=big_l + 2 {
                if (t + big_l) % 2 != 0 {
                    continue;
                }
                let a = h(t);
                let idx = (t + big_l) / 2;
                assert_eq!(q_supernomial(&l, a).unwrap(), qbinomial(big_l, idx));
            }
        }
    }
}

#[test]
fn q_supernomial_matches_naive_sum() {
    for n in 1..=3 {
        for v in box_vectors(n, -2, 3) {
            let l = LVec::new(v).unwrap();
            for idx in 0..=7 {
                assert_eq!(q_supernomial_at_index(&l, idx), naive_q_supernomial(&l, idx), "L={l} idx={idx}");
            }
        }
    }
}

#[test]
fn q_supernomial_at_one_and_multinomials() {
    for n in 1..=3 {
        for v in nonneg_vectors(n, 5) {
            let l = LVec::new(v).unwrap();
            for a in a_range(&l) {
                assert_eq!(q_supernomial(&l, a).unwrap().eval_at_one(), supernomial_q1(&l, a).unwrap());
            }
        }
    }
    // (1 + x + ... + x^n)^L expanded directly.
    for n in 1..=3usize {
        for big_l in 0..=4i64 {
            let mut c = vec![BigInt::from(1)];
            for _ in 0..big_l {
                let mut next = vec![BigInt::from(0); c.len() + n];
                for (i, x) in c.iter().enumerate() {
                    for s in 0..=n {
                        next[i + s] += x;
                    }
                }
                c = next;
            }
            let l = LVec::unit(n, n, big_l).unwrap();
            for (idx, want) in c.iter().enumerate() {
                assert_eq!(&q_supernomial_at_index(&l, idx as i64).eval_at_one(), want);
            }
        }
    }
}

#[test]
fn big_t_examples() {
    assert_eq!(big_t(&lv(&[2]), h(0)).unwrap(), poly(&[(0, 1), (1, 1)]));
    let t = big_t(&lv(&[1, 1]), h(1)).unwrap();
    assert_eq!(t, QPoly::from_terms([(exp(1, 8), 1), (exp(9, 8), 1)]));
    // L e_1 in dimension N.
    for n in 1..=4usize {
        for big_l in 0..=5i64 {
            let l = LVec::unit(n, 1, big_l).unwrap();
            for a in a_range(&l) {
                let ae = a.to_exp();
                let want = qbinomial(big_l, (a.twice() + big_l) / 2)
                    .shift(ae * ae * int_exp(n as i64 - 1) / int_exp(n as i64));
                assert_eq!(big_t(&l, a).unwrap(), want, "N={n} L={big_l} a={a}");
            }
        }
    }
}

#[test]
fn big_t_padding() {
    for n in 1..=2usize {
        for v in nonneg_vectors(n, 4) {
            let l = LVec::new(v).unwrap();
            for m in n..=n + 2 {
                let padded = l.padded(m);
                for a in a_range(&l) {
                    let ae = a.to_exp();
                    let shift = ae * ae * int_exp((m - n) as i64) / int_exp((m * n) as i64);
                    assert_eq!(big_t(&padded, a).unwrap(), big_t(&l, a).unwrap().shift(shift));
                }
            }
        }
    }
}

#[test]
fn explicit_form_matches_definition() {
    assert_eq!(big_t_explicit(&lv(&[2]), h(0)).unwrap(), poly(&[(0, 1), (1, 1)]));
    for n in 1..=3 {
        for v in nonneg_vectors(n, 6) {
            let l = LVec::new(v).unwrap();
            for a in a_range(&l) {
                assert_eq!(big_t_explicit(&l, a).unwrap(), big_t(&l, a).unwrap(), "L={l} a={a}");
            }
        }
    }
}

#[test]
fn explicit_form_domain_errors() {
    assert!(matches!(big_t_explicit(&lv(&[-1, 2]), h(1)), Err(Error::Domain(_))));
    assert!(matches!(big_t_explicit(&lv(&[2]), h(4)), Err(Error::Domain(_))));
}

#[test]
fn tilde_t_examples_and_consistency() {
    assert_eq!(tilde_t(&lv(&[3, 1, 2]), 0), QPoly::one());
    assert_eq!(tilde_t(&lv(&[1, 1]), 1), poly(&[(1, 1), (2, 1)]));
    assert_eq!(tilde_t(&lv(&[1, 1]), -1), QPoly::zero());
    for n in 1..=3 {
        for v in box_vectors(n, -2, 3) {
            let l = LVec::new(v).unwrap();
            for a in 0..=7 {
                assert_eq!(tilde_t(&l, a), tilde_t_via_supernomial(&l, a), "L={l} a={a}");
            }
        }
    }
}

#[test]
fn symmetry_under_a_negation() {
    for n in 1..=4 {
        for v in nonneg_vectors(n, 6) {
            let l = LVec::new(v).unwrap();
            if l.ell_n() > 12 {
                continue;
            }
            for a in a_range(&l) {
                assert_eq!(q_supernomial(&l, a).unwrap(), q_supernomial(&l, -a).unwrap());
                assert_eq!(big_t(&l, a).unwrap(), big_t(&l, -a).unwrap());
            }
        }
    }
}

#[test]
fn recurrence_examples() {
    assert!(check_recurrence(&lv(&[3, 1]), h(1), 1).unwrap());
    for t in -6..=6 {
        if (t + 3) % 2 == 0 {
            assert!(check_recurrence(&lv(&[-1, 2]), h(t), 1).unwrap());
        }
    }
    assert!(check_recurrence(&lv(&[2, 2, 2]), h(0), 2).unwrap());
    assert!(check_recurrence(&lv(&[2, 2]), h(0), 2).is_err());
    assert!(check_recurrence_n(&lv(&[1, 2]), 2).unwrap());
    assert!(check_recurrence_n(&lv(&[0, 2]), 0).unwrap());
    assert!(check_recurrence_n(&lv(&[2, 2]), 3).unwrap());
    assert!(check_recurrence_n(&lv(&[2, 1]), 1).is_err());
}

#[test]
fn recurrences_on_integer_box() {
    for n_dim in 2..=3usize {
        for v in box_vectors(n_dim, -2, 3) {
            let l = LVec::new(v).unwrap();
            let e = l.ell_n();
            for n in 1..n_dim {
                for t in -e.abs() - 4..=e.abs() + 4 {
                    if (t + e).rem_euclid(2) == 0 {
                        assert!(check_recurrence(&l, h(t), n).unwrap(), "L={l} a={t}/2 n={n}");
                    }
                }
            }
        }
    }
}

#[test]
fn n_equals_top_recurrences() {
    for n_dim in 2..=3usize {
        for v in nonneg_vectors(n_dim, 4) {
            let l = LVec::new(v).unwrap().offset(&[(n_dim as i64, 2)]);
            for a in 0..=l.ell_n() + 1 {
                assert!(check_recurrence_n(&l, a).unwrap(), "L={l} a={a}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetry_random(v in prop::collection::vec(0i64..3, 1..4), t in 0i64..20) {
        let l = LVec::new(v).unwrap();
        let e = l.ell_n();
        let a = h((t % (e + 1)) * 2 - e);
        prop_assert_eq!(big_t(&l, a).unwrap(), big_t(&l, -a).unwrap());
    }

    #[test]
    fn recurrence_random(v in prop::collection::vec(-3i64..5, 2..5), t in -8i64..8, n in 1usize..4) {
        let l = LVec::new(v).unwrap();
        prop_assume!(n < l.n());
        let a = h(2 * t - l.ell_n().rem_euclid(2));
        prop_assert!(check_recurrence(&l, a, n).unwrap());
    }
}

use proptest::prelude::*;
use qsuper::partitions::*;
use qsuper::qpoly::int_exp;
use qsuper::supernomial::tilde_t;
use qsuper::{LVec, QPoly};

fn pi() -> Partition {
    "10+9+7+6+5+4+4+3".parse().unwrap()
}

fn lv(v: &[i64]) -> LVec {
    LVec::new(v.to_vec()).unwrap()
}

fn heights(p: &Partition, ex: &[u32]) -> Vec<u32> {
    durfee_dissection(p, ex).iter().map(|r| r.height).collect()
}

/// Largest `h` whose `h x (h+E)` block of nodes lies inside the Ferrers graph, by node test.
fn rect_by_nodes(p: &Partition, e: u32) -> u32 {
    let inside = |row: usize, col: u32| p.parts().get(row).is_some_and(|&len| col <= len);
    (0..=p.len() as u32)
        .filter(|&h| (0..h as usize).all(|r| (1..=h + e).all(|c| inside(r, c))))
        .max()
        .unwrap()
}

#[test]
fn durfee_examples() {
    assert_eq!(durfee_rectangle(&pi(), 3), Rect { width: 6, height: 3 });
    for e in 0..4 {
        assert_eq!(durfee_rectangle(&Partition::empty(), e), Rect { width: e, height: 0 });
    }
    assert_eq!(durfee_rectangle(&"5+5+5".parse().unwrap(), 0), Rect { width: 3, height: 3 });
}

#[test]
fn dissection_examples() {
    assert_eq!(heights(&pi(), &[3, 1, 0]), vec![3, 3, 2]);
    assert_eq!(heights(&pi(), &[2, 0, 0]), vec![4, 3, 1]);
    assert_eq!(heights(&Partition::empty(), &[0, 0]), vec![0, 0]);
    assert_eq!(heights(&"4+3+2+1".parse().unwrap(), &[0, 0]), vec![2, 1]);
}

#[test]
fn admissibility_examples() {
    for big in 7..10 {
        assert!(is_admissible(&pi(), &lv(&[1, 2, big]), 8).unwrap());
        assert!(is_admissible(&pi(), &lv(&[0, 2, big + 1]), 8).unwrap());
    }
    assert!(!is_admissible(&pi(), &lv(&[1, 2, 6]), 8).unwrap());
    assert!(!is_admissible(&"3".parse().unwrap(), &lv(&[1, 1]), 2).unwrap());
    assert!(is_admissible(&pi(), &lv(&[-1, 2]), 8).is_err());
}

#[test]
fn enumeration_examples() {
    let one_two: Vec<Partition> = vec!["1".parse().unwrap(), "2".parse().unwrap()];
    assert_eq!(enumerate_admissible(&lv(&[1, 1]), 1, DEFAULT_BUDGET).unwrap(), one_two);
    assert_eq!(enumerate_admissible(&lv(&[2]), 1, DEFAULT_BUDGET).unwrap(), one_two);
    assert_eq!(enumerate_admissible(&lv(&[3, 1]), 0, DEFAULT_BUDGET).unwrap(), vec![Partition::empty()]);
    let q = |e: i64| QPoly::q_pow(int_exp(e));
    assert_eq!(admissible_genfun(&lv(&[1, 1]), 1, DEFAULT_BUDGET).unwrap(), q(1) + q(2));
    assert_eq!(admissible_genfun(&lv(&[2]), 2, DEFAULT_BUDGET).unwrap(), q(4));
    assert_eq!(admissible_genfun(&lv(&[0, 0, 0]), 0, DEFAULT_BUDGET).unwrap(), QPoly::one());
    assert!(enumerate_admissible(&lv(&[20, 20]), 20, 1000).is_err());
}

#[test]
fn enumeration_is_sorted_and_distinct() {
    let v = enumerate_admissible(&lv(&[2, 1, 1]), 4, DEFAULT_BUDGET).unwrap();
    assert!(v.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn genfun_equals_tilde_t() {
    for n in 1..=3usize {
        let mut stack = vec![vec![]];
        while let Some(v) = stack.pop() {
            if v.len() == n {
                let l = LVec::new(v).unwrap();
                for a in 0..=8 {
                    assert_eq!(admissible_genfun(&l, a, DEFAULT_BUDGET).unwrap(), tilde_t(&l, a), "L={l} a={a}");
                }
                continue;
            }
            let used: i64 = v.iter().sum();
            for x in 0..=4 - used {
                let mut w = v.clone();
                w.push(x);
                stack.push(w);
            }
        }
    }
}

fn arb_partition() -> impl Strategy<Value = Partition> {
    prop::collection::vec(1u32..12, 0..10).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v).unwrap()
    })
}

proptest! {
    #[test]
    fn rectangle_matches_node_test(p in arb_partition(), e in 0u32..5) {
        prop_assert_eq!(durfee_rectangle(&p, e).height, rect_by_nodes(&p, e));
    }

    #[test]
    fn dissection_heights_bounded(p in arb_partition(), ex in prop::collection::vec(0u32..5, 0..4)) {
        let total: u32 = heights(&p, &ex).iter().sum();
        prop_assert!(total as usize <= p.len());
        prop_assert_eq!(total as usize == p.len(), below_dissection(&p, &ex).is_empty());
    }

    #[test]
    fn display_round_trip(p in arb_partition()) {
        prop_assert_eq!(p.to_string().parse::<Partition>().unwrap(), p);
    }
}

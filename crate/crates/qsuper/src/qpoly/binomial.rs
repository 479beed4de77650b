use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{int_exp, Exp, QPoly};

thread_local! {
    static GAUSS: RefCell<HashMap<(u32, u32), QPoly>> = RefCell::new(HashMap::new());
}

/// Gaussian polynomial `(q)_n / ((q)_k (q)_{n-k})` for `0 <= k <= n`.
pub fn gaussian(n: u32, k: u32) -> QPoly {
    assert!(k <= n, "gaussian({n}, {k}) needs k <= n");
    let k = k.min(n - k);
    if let Some(p) = GAUSS.with(|c| c.borrow().get(&(n, k)).cloned()) {
        return p;
    }
    // Multiply by (1 - q^{n-i}), then divide by (1 - q^{i+1}); each partial
    // quotient is again a Gaussian polynomial, so every division is exact.
    let deg = (k as usize) * ((n - k) as usize);
    // Intermediate products reach degree k(n-k+1) before the last division.
    let mut c = vec![BigInt::zero(); deg + k as usize + 1];
    c[0] = BigInt::one();
    let mut cur = 0usize;
    for i in 0..k as usize {
        let up = n as usize - i;
        let down = i + 1;
        let new_deg = cur + up - down;
        for j in (up..=cur + up).rev() {
            let t = c[j - up].clone();
            c[j] -= t;
        }
        // Divide by (1 - q^down): out[j] = in[j] + out[j - down].
        for j in down..=cur + up {
            let t = c[j - down].clone();
            c[j] += t;
        }
        debug_assert!(c[new_deg + 1..].iter().all(Zero::is_zero));
        cur = new_deg;
    }
    let p = QPoly::from_dense(int_exp(0), &c[..=deg]);
    GAUSS.with(|g| g.borrow_mut().insert((n, k), p.clone()));
    p
}

/// `(q^{L-a+1})_a / (q)_a` for `a >= 0`, zero for `a < 0`.
///
/// For `L < 0` this is the Laurent polynomial
/// `(-1)^a q^{-(a|L| + a(a-1)/2)} [|L|+a-1; a]`.
pub fn qbinomial(l: i64, a: i64) -> QPoly {
    if a < 0 {
        return QPoly::zero();
    }
    if l >= 0 {
        if a > l {
            return QPoly::zero();
        }
        return gaussian(l as u32, a as u32);
    }
    let m = -l;
    let g = gaussian((m + a - 1) as u32, a as u32);
    let shifted = g.shift(int_exp(-(a * m + a * (a - 1) / 2)));
    if a % 2 == 0 {
        shifted
    } else {
        -shifted
    }
}

/// `(q^s)_n = prod_{i<n} (1 - q^{s+i})`.
pub fn pochhammer(s: Exp, n: u32) -> QPoly {
    let mut acc = QPoly::one();
    for i in 0..n {
        let factor = QPoly::from_terms([(int_exp(0), 1), (s + int_exp(i as i64), -1)]);
        if factor.is_zero() {
            return QPoly::zero();
        }
        acc = &acc * &factor;
    }
    acc
}

/// Ordinary binomial coefficient, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

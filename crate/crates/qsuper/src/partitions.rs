//! Durfee rectangles, dissections and `(L; a)`-admissible partitions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qpoly::{binomial, int_exp, QPoly};
use crate::supernomial::LVec;

/// Default cap on the number of candidate partitions visited by enumeration.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidParams("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParams("partition parts must be weakly decreasing".into()));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    pub fn largest(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// Rows strictly below the first `rows` rows.
    pub fn below(&self, rows: usize) -> Partition {
        Partition { parts: self.parts.get(rows..).unwrap_or_default().to_vec() }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join("+"))
    }
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(['+', ','])
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad part {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// Width and height of a Durfee rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Rect {
    pub width: u32,
    pub height: u32,
}

/// Maximal `h` such that the first `h` parts are all at least `h + excess`.
pub fn durfee_rectangle(p: &Partition, excess: u32) -> Rect {
    let h = p
        .parts
        .iter()
        .enumerate()
        .take_while(|&(i, &part)| part as usize >= i + 1 + excess as usize)
        .count() as u32;
    Rect { width: h + excess, height: h }
}

/// Successive Durfee rectangles, each drawn in the rows below the previous one.
pub fn durfee_dissection(p: &Partition, excesses: &[u32]) -> Vec<Rect> {
    let mut rest = p.clone();
    let mut out = Vec::with_capacity(excesses.len());
    for &e in excesses {
        let r = durfee_rectangle(&rest, e);
        rest = rest.below(r.height as usize);
        out.push(r);
    }
    out
}

/// The rows left below the whole dissection.
pub fn below_dissection(p: &Partition, excesses: &[u32]) -> Partition {
    let used: u32 = durfee_dissection(p, excesses).iter().map(|r| r.height).sum();
    p.below(used as usize)
}

/// Excesses `(L_{N-1}+...+L_1, ..., L_1, 0)`.
pub fn admissible_excesses(l: &LVec) -> Result<Vec<u32>> {
    if !l.is_nonneg() {
        return Err(Error::Domain(format!("admissibility needs L >= 0, got {l}")));
    }
    let ls = l.as_slice();
    let n = ls.len();
    let mut out = Vec::with_capacity(n);
    for k in (0..n).rev() {
        out.push(ls[..k].iter().sum::<i64>() as u32);
    }
    Ok(out)
}

/// Checks the three admissibility conditions; the third is evaluated in both
/// stated forms, and disagreement between them is an error.
pub fn is_admissible(p: &Partition, l: &LVec, a: i64) -> Result<bool> {
    let ex = admissible_excesses(l)?;
    if p.len() as i64 != a || p.largest() as i64 > l.total() {
        return Ok(false);
    }
    let nothing_below = below_dissection(p, &ex).is_empty();
    let heights: i64 = durfee_dissection(p, &ex).iter().map(|r| r.height as i64).sum();
    if nothing_below != (heights == a) {
        return Err(Error::Inconsistent(format!("dissection conditions disagree for {p}")));
    }
    Ok(nothing_below)
}

/// Number of partitions with exactly `a` parts, each at most `m`.
fn candidate_count(a: i64, m: i64) -> Option<u64> {
    if a == 0 {
        return Some(1);
    }
    if m <= 0 {
        return Some(0);
    }
    let c: BigInt = binomial(a + m - 1, a);
    c.to_u64()
}

/// All `(L; a)`-admissible partitions in increasing lexicographic order.
pub fn enumerate_admissible(l: &LVec, a: i64, budget: u64) -> Result<Vec<Partition>> {
    let ex = admissible_excesses(l)?;
    if a < 0 {
        return Ok(Vec::new());
    }
    let m = l.total();
    match candidate_count(a, m) {
        Some(c) if c <= budget => {}
        c => {
            return Err(Error::Budget(format!(
                "{} candidate partitions for L = {l}, a = {a} exceed budget {budget}",
                c.map_or("too many".to_string(), |c| c.to_string())
            )))
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(a as usize);
    fn dfs(cur: &mut Vec<u32>, left: usize, max: u32, ex: &[u32], out: &mut Vec<Partition>) {
        if left == 0 {
            let p = Partition { parts: cur.clone() };
            if below_dissection(&p, ex).is_empty() {
                out.push(p);
            }
            return;
        }
        for part in 1..=max {
            cur.push(part);
            dfs(cur, left - 1, part, ex, out);
            cur.pop();
        }
    }
    // Lexicographic order is by first part, so the outer loop runs upward.
    for first in 1..=m.max(0) as u32 {
        if a == 0 {
            break;
        }
        cur.push(first);
        dfs(&mut cur, a as usize - 1, first, &ex, &mut out);
        cur.pop();
    }
    if a == 0 {
        out.push(Partition::empty());
    }
    Ok(out)
}

/// `sum q^{|p|}` over the admissible set.
pub fn admissible_genfun(l: &LVec, a: i64, budget: u64) -> Result<QPoly> {
    let mut g = QPoly::zero();
    for p in enumerate_admissible(l, a, budget)? {
        g.add_term(int_exp(p.weight() as i64), 1.into());
    }
    Ok(g)
}

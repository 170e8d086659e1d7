use std::fmt;

use num_bigint::BigInt;
use serde_json::Value;

use crate::error::{Error, Result};

pub const MATCHING_CAP: usize = 12;

/// A non-crossing perfect matching of the points `1..=2m` on a line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrossinglessMatching {
    /// Pairs `(a, b)` with `a < b`, sorted by `a`.
    pairs: Vec<(usize, usize)>,
}

impl CrossinglessMatching {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        for p in &mut pairs {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let n = 2 * pairs.len();
        let mut seen = vec![false; n + 1];
        for &(a, b) in &pairs {
            for x in [a, b] {
                if x == 0 || x > n || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Configuration(format!("{x} is not a fresh point in 1..={n}")));
                }
            }
        }
        let m = Self { pairs };
        if !m.is_noncrossing() {
            return Err(Error::Configuration("pairs cross".into()));
        }
        Ok(m)
    }

    /// The nested matching `{(1, 2m), (2, 2m - 1), ...}`.
    pub fn horseshoe(m: usize) -> Self {
        Self { pairs: (1..=m).map(|i| (i, 2 * m + 1 - i)).collect() }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_noncrossing(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| self.pairs.iter().all(|&(c, d)| !(a < c && c < b && b < d)))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.pairs.iter().map(|&(a, b)| Value::from(vec![a, b])).collect())
    }
}

impl fmt::Display for CrossinglessMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn fill(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
    if lo > hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // lo pairs with k; the points strictly between must match among themselves
    for k in (lo + 1..=hi).step_by(2) {
        for inner in fill(lo + 1, k - 1) {
            for outer in fill(k + 1, hi) {
                let mut v = Vec::with_capacity(inner.len() + outer.len() + 1);
                v.push((lo, k));
                v.extend_from_slice(&inner);
                v.extend_from_slice(&outer);
                out.push(v);
            }
        }
    }
    out
}

/// Every crossingless matching of `2m` points.
pub fn enumerate_matchings(m: usize) -> Result<Vec<CrossinglessMatching>> {
    if m > MATCHING_CAP {
        return Err(Error::CapExceeded { what: "matching size", value: m, cap: MATCHING_CAP });
    }
    Ok(fill(1, 2 * m)
        .into_iter()
        .map(|mut pairs| {
            pairs.sort_unstable();
            CrossinglessMatching { pairs }
        })
        .collect())
}

/// `C(2m, m) / (m + 1)`.
pub fn catalan(m: usize) -> BigInt {
    let mut binom = BigInt::from(1);
    for k in 0..m {
        binom = binom * BigInt::from(2 * m - k) / BigInt::from(k + 1);
    }
    binom / BigInt::from(m + 1)
}

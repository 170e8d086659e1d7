//! Laurent polynomials with half-integer exponents and exact integer coefficients.
//!
//! A term is stored under the *numerator* of its exponent over the fixed
//! denominator 2, so `t^(3/2)` lives under key `3` and `t^2` under key `4`.
//! The same type doubles as a q-polynomial: `q^k` is stored under `2k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct HalfLaurent {
    terms: BTreeMap<i64, BigInt>,
}

impl HalfLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    /// `c * t^(half/2)`.
    pub fn monomial(half: i64, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(half, c.into());
        p
    }

    /// `c * q^k`, i.e. a term with integral exponent `k`.
    pub fn integral_monomial(k: i64, c: impl Into<BigInt>) -> Self {
        Self::monomial(2 * k, c)
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (h, c) in terms {
            p.add_term(h, c.into());
        }
        p
    }

    pub fn add_term(&mut self, half: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(half).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&half);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, half: i64) -> BigInt {
        self.terms.get(&half).cloned().unwrap_or_default()
    }

    /// Iterates `(numerator, coefficient)` in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// Multiplies by `t^(half/2)`.
    pub fn shift(&self, half: i64) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (k + half, v.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Rewrites every exponent numerator through `f`, summing collisions.
    pub fn map_exponents(&self, f: impl Fn(i64) -> i64) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(f(*k), v.clone());
        }
        out
    }

    /// `t -> t^-1`.
    pub fn invert_variable(&self) -> Self {
        self.map_exponents(|k| -k)
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &HalfLaurent) -> Option<HalfLaurent> {
        let (lead_k, lead_c) = divisor.terms.iter().next_back()?;
        let (low_k, _) = divisor.terms.iter().next()?;
        let span = lead_k - low_k;
        let mut rem = self.clone();
        let mut quot = HalfLaurent::zero();
        loop {
            let Some((&k, c)) = rem.terms.iter().next_back() else {
                return Some(quot);
            };
            let rem_low = *rem.terms.keys().next().unwrap();
            if k - rem_low < span {
                return None;
            }
            let (q, r) = c.div_rem(lead_c);
            if !r.is_zero() {
                return None;
            }
            let step = HalfLaurent::monomial(k - lead_k, q);
            rem = &rem - &(&step * divisor);
            quot = &quot + &step;
        }
    }

    /// Substitutes `q = -sqrt(t)`: `q^k -> (-1)^k t^(k/2)`.
    ///
    /// Input keys are read as `2k` for `q^k`; a half-integral q-exponent is rejected.
    pub fn substitute_q_minus_sqrt_t(&self) -> Result<HalfLaurent> {
        let mut out = HalfLaurent::zero();
        for (h, c) in &self.terms {
            if h.is_odd() {
                return Err(Error::NonIntegralExponent(*h));
            }
            let k = h / 2;
            let c = if k.is_odd() { -c } else { c.clone() };
            out.add_term(k, c);
        }
        Ok(out)
    }

    /// Canonical text with a custom variable name.
    pub fn to_text(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    s.push('-');
                }
            } else {
                s.push_str(if c.is_negative() { " - " } else { " + " });
            }
            if *k == 0 {
                s.push_str(&mag.to_string());
            } else {
                s.push_str(&format!("{mag}*{var}^({k}/2)"));
            }
        }
        s
    }

    /// Parses the canonical text produced by [`HalfLaurent::to_text`].
    pub fn parse_text(text: &str, var: &str) -> Result<HalfLaurent> {
        let bad = || Error::Parse(format!("bad polynomial term in {text:?}"));
        let t = text.trim();
        if t == "0" {
            return Ok(HalfLaurent::zero());
        }
        let mut out = HalfLaurent::zero();
        let normalized = t.replace(" - ", " + -").replace(" + ", "\u{1}");
        for tok in normalized.split('\u{1}') {
            let tok = tok.trim();
            let (neg, body) = match tok.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, tok),
            };
            let (coef, exp) = match body.split_once('*') {
                None => (body, 0i64),
                Some((c, rest)) => {
                    let e = rest
                        .strip_prefix(var)
                        .and_then(|r| r.strip_prefix("^("))
                        .and_then(|r| r.strip_suffix("/2)"))
                        .ok_or_else(bad)?;
                    (c, e.parse::<i64>().map_err(|_| bad())?)
                }
            };
            let mut c: BigInt = coef.parse().map_err(|_| bad())?;
            if neg {
                c = -c;
            }
            out.add_term(exp, c);
        }
        Ok(out)
    }

    /// JSON list of `[numerator, coefficient]` pairs.
    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(k, c)| Value::Array(vec![Value::from(*k), bigint_json(c)])).collect())
    }
}

/// Integers that fit in `i64` become JSON numbers, larger ones strings.
pub fn bigint_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(c.to_string()),
    }
}

impl fmt::Display for HalfLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text("t"))
    }
}

impl fmt::Debug for HalfLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HalfLaurent({self})")
    }
}

impl<'a> Add<&'a HalfLaurent> for &'a HalfLaurent {
    type Output = HalfLaurent;
    fn add(self, rhs: &HalfLaurent) -> HalfLaurent {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for HalfLaurent {
    type Output = HalfLaurent;
    fn add(self, rhs: HalfLaurent) -> HalfLaurent {
        &self + &rhs
    }
}

impl AddAssign<&HalfLaurent> for HalfLaurent {
    fn add_assign(&mut self, rhs: &HalfLaurent) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, v.clone());
        }
    }
}

impl<'a> Sub<&'a HalfLaurent> for &'a HalfLaurent {
    type Output = HalfLaurent;
    fn sub(self, rhs: &HalfLaurent) -> HalfLaurent {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v);
        }
        out
    }
}

impl Sub for HalfLaurent {
    type Output = HalfLaurent;
    fn sub(self, rhs: HalfLaurent) -> HalfLaurent {
        &self - &rhs
    }
}

impl<'a> Mul<&'a HalfLaurent> for &'a HalfLaurent {
    type Output = HalfLaurent;
    fn mul(self, rhs: &HalfLaurent) -> HalfLaurent {
        let mut out = HalfLaurent::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

impl Mul for HalfLaurent {
    type Output = HalfLaurent;
    fn mul(self, rhs: HalfLaurent) -> HalfLaurent {
        &self * &rhs
    }
}

impl Neg for &HalfLaurent {
    type Output = HalfLaurent;
    fn neg(self) -> HalfLaurent {
        HalfLaurent { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

impl Neg for HalfLaurent {
    type Output = HalfLaurent;
    fn neg(self) -> HalfLaurent {
        -&self
    }
}

impl Zero for HalfLaurent {
    fn zero() -> Self {
        HalfLaurent::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for HalfLaurent {
    fn one() -> Self {
        HalfLaurent::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q_plus_qinv() -> HalfLaurent {
        HalfLaurent::from_terms([(2, 1), (-2, 1)])
    }

    #[test]
    fn substitution_examples() {
        let s = q_plus_qinv().substitute_q_minus_sqrt_t().unwrap();
        assert_eq!(s, HalfLaurent::from_terms([(1, -1), (-1, -1)]));
        assert_eq!(HalfLaurent::one().substitute_q_minus_sqrt_t().unwrap(), HalfLaurent::one());
        let q2 = HalfLaurent::integral_monomial(2, 1);
        assert_eq!(q2.substitute_q_minus_sqrt_t().unwrap(), HalfLaurent::monomial(2, 1));
        assert!(HalfLaurent::monomial(1, 1).substitute_q_minus_sqrt_t().is_err());
    }

    #[test]
    fn canonical_text() {
        let p = HalfLaurent::from_terms([(8, -1), (6, 1), (2, 1)]);
        assert_eq!(p.to_string(), "1*t^(2/2) + 1*t^(6/2) - 1*t^(8/2)");
        assert_eq!(HalfLaurent::one().to_string(), "1");
        assert_eq!(HalfLaurent::zero().to_string(), "0");
        let u2 = HalfLaurent::from_terms([(1, -1), (-1, -1)]);
        assert_eq!(u2.to_string(), "-1*t^(-1/2) - 1*t^(1/2)");
        assert_eq!(HalfLaurent::parse_text(&u2.to_string(), "t").unwrap(), u2);
    }

    #[test]
    fn division() {
        let a = HalfLaurent::from_terms([(2, 1), (6, 1), (10, 1), (18, -1)]);
        let q = a.div_exact(&q_plus_qinv()).unwrap();
        assert_eq!(q, HalfLaurent::from_terms([(4, 1), (12, 1), (16, -1)]));
        assert!(HalfLaurent::one().div_exact(&q_plus_qinv()).is_none());
    }

    fn arb_poly() -> impl Strategy<Value = HalfLaurent> {
        proptest::collection::vec((-6i64..6, -5i64..5), 0..5).prop_map(HalfLaurent::from_terms)
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &a), &HalfLaurent::zero());
        }

        #[test]
        fn text_round_trip(a in arb_poly()) {
            prop_assert_eq!(HalfLaurent::parse_text(&a.to_string(), "t").unwrap(), a);
        }

        #[test]
        fn product_divides(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
        }
    }
}

//! Jones and Alexander polynomials.
//!
//! Two independent routes to the Jones polynomial: the Kauffman state sum
//! ([`jones_bracket`]) and a skein tree that descends to unlinks
//! ([`jones_skein`]). The Alexander polynomial uses the same skein tree with
//! `Δ(L+) - Δ(L-) = (t^(-1/2) - t^(1/2)) Δ(L0)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::diagram::{LinkDiagram, Sign, SmoothingTable, UnionFind};
use crate::error::{Error, Result};
use crate::laurent::HalfLaurent;

/// Largest diagram the state sum accepts (`2^30` states).
pub const BRACKET_CROSSING_CAP: usize = 30;

/// `-t^(1/2) - t^(-1/2)`, the value of the 2-component unlink.
pub fn unlink_factor() -> HalfLaurent {
    HalfLaurent::from_terms([(1, -1), (-1, -1)])
}

/// `t^(-1/2) - t^(1/2)`.
fn conway_z() -> HalfLaurent {
    HalfLaurent::from_terms([(-1, 1), (1, -1)])
}

/// Jones polynomial by the Kauffman bracket state sum, normalised to `V(unknot) = 1`.
pub fn jones_bracket(d: &LinkDiagram) -> Result<HalfLaurent> {
    let n = d.crossing_count();
    if n > BRACKET_CROSSING_CAP {
        return Err(Error::CapExceeded { what: "crossings", value: n, cap: BRACKET_CROSSING_CAP });
    }
    let table = SmoothingTable::new(d);
    let total: u64 = 1 << n;
    let chunk: u64 = 1 << n.min(12);

    // (#0-smoothings - #1-smoothings, circles) -> number of states
    let counts: HashMap<(i64, usize), u64> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|ci| {
            let mut uf = UnionFind::new(table.edge_count());
            let mut local: HashMap<(i64, usize), u64> = HashMap::new();
            for s in ci * chunk..((ci + 1) * chunk).min(total) {
                let ones = s.count_ones() as i64;
                let c = table.circle_count(s, &mut uf);
                *local.entry((n as i64 - 2 * ones, c)).or_default() += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });

    // bracket in the variable A (integer keys here are powers of A)
    let delta = HalfLaurent::from_terms([(2, -1), (-2, -1)]);
    let max_c = counts.keys().map(|k| k.1).max().unwrap_or(1);
    let mut delta_pows = vec![HalfLaurent::one()];
    for i in 1..max_c {
        let next = &delta_pows[i - 1] * &delta;
        delta_pows.push(next);
    }
    let mut keys: Vec<_> = counts.keys().copied().collect();
    keys.sort_unstable();
    let mut bracket = HalfLaurent::zero();
    for key @ (a, c) in keys {
        let term = delta_pows[c - 1].shift(a).scale(&BigInt::from(counts[&key]));
        bracket += &term;
    }
    // V = (-A^3)^(-w) <D>, then A = t^(-1/4)
    let w = d.writhe();
    let sign = if w.rem_euclid(2) == 1 { -1 } else { 1 };
    let normalized = bracket.shift(-3 * w).scale(&BigInt::from(sign));
    Ok(normalized.map_exponents(|k| {
        debug_assert!(k % 2 == 0, "odd power of A survived normalisation");
        -k / 2
    }))
}

/// Which basepoints and component order the skein tree uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentOrder {
    /// Components by ascending smallest edge, each started at its smallest edge.
    Forward,
    /// Components by descending smallest edge, each started at its largest edge.
    Reversed,
}

/// First crossing met as an under-pass before it has been met as an over-pass.
fn first_violation(d: &LinkDiagram, order: DescentOrder) -> Option<usize> {
    let mut head: HashMap<u32, (usize, usize)> = HashMap::new();
    for (x, c) in d.crossings().iter().enumerate() {
        let over_in = if c.sign == Sign::Positive { 3 } else { 1 };
        head.insert(c.edges[0], (x, 0));
        head.insert(c.edges[over_in], (x, over_in));
    }
    let mut comps = d.components();
    if order == DescentOrder::Reversed {
        comps.reverse();
        for comp in &mut comps {
            let k = (0..comp.len()).max_by_key(|&i| comp[i]).unwrap();
            comp.rotate_left(k);
        }
    }
    let mut seen = vec![false; d.crossing_count()];
    for comp in comps {
        for e in comp {
            let Some(&(x, slot)) = head.get(&e) else { continue };
            if seen[x] {
                continue;
            }
            if slot == 0 {
                return Some(x);
            }
            seen[x] = true;
        }
    }
    None
}

#[derive(Clone, Copy)]
enum SkeinKind {
    Jones,
    Alexander,
}

fn skein_tree(d: &LinkDiagram, kind: SkeinKind, order: DescentOrder) -> Result<HalfLaurent> {
    let n = d.crossing_count();
    if n > BRACKET_CROSSING_CAP {
        return Err(Error::CapExceeded { what: "crossings", value: n, cap: BRACKET_CROSSING_CAP });
    }
    let cap = n * (n + 3) / 2 + 8;
    skein_rec(d, kind, order, 0, cap)
}

fn skein_rec(d: &LinkDiagram, kind: SkeinKind, order: DescentOrder, depth: usize, cap: usize) -> Result<HalfLaurent> {
    if depth > cap {
        return Err(Error::RecursionDepth(cap));
    }
    let Some(c) = first_violation(d, order) else {
        let k = d.component_count() as u32;
        return Ok(match kind {
            SkeinKind::Jones => unlink_factor().pow(k - 1),
            SkeinKind::Alexander if k == 1 => HalfLaurent::one(),
            SkeinKind::Alexander => HalfLaurent::zero(),
        });
    };
    let sign = d.crossings()[c].sign;
    let switched = d.switch_crossing(c)?;
    let smoothed = d.smooth_crossing(c, d.crossings()[c].oriented_smoothing())?;
    let vs = skein_rec(&switched, kind, order, depth + 1, cap)?;
    let v0 = skein_rec(&smoothed, kind, order, depth + 1, cap)?;
    Ok(match (kind, sign) {
        // V+ = t^2 V- + (t^(3/2) - t^(1/2)) V0
        (SkeinKind::Jones, Sign::Positive) => &vs.shift(4) + &(&v0 * &HalfLaurent::from_terms([(3, 1), (1, -1)])),
        // V- = t^-2 V+ + (t^(-3/2) - t^(-1/2)) V0
        (SkeinKind::Jones, Sign::Negative) => &vs.shift(-4) + &(&v0 * &HalfLaurent::from_terms([(-3, 1), (-1, -1)])),
        (SkeinKind::Alexander, Sign::Positive) => &vs + &(&v0 * &conway_z()),
        (SkeinKind::Alexander, Sign::Negative) => &vs - &(&v0 * &conway_z()),
    })
}

/// Jones polynomial by skein-tree descent to unlinks.
pub fn jones_skein(d: &LinkDiagram) -> Result<HalfLaurent> {
    skein_tree(d, SkeinKind::Jones, DescentOrder::Forward)
}

pub fn jones_skein_with(d: &LinkDiagram, order: DescentOrder) -> Result<HalfLaurent> {
    skein_tree(d, SkeinKind::Jones, order)
}

/// Conway-normalised Alexander polynomial; `Δ(unknot) = 1`, split links give 0.
pub fn alexander_skein(d: &LinkDiagram) -> Result<HalfLaurent> {
    skein_tree(d, SkeinKind::Alexander, DescentOrder::Forward)
}

pub fn alexander_skein_with(d: &LinkDiagram, order: DescentOrder) -> Result<HalfLaurent> {
    skein_tree(d, SkeinKind::Alexander, order)
}

/// True iff both skein relations hold exactly for `(L+, L-, L0)`.
pub fn verify_skein_triple(plus: &LinkDiagram, minus: &LinkDiagram, zero: &LinkDiagram) -> bool {
    let check = || -> Result<bool> {
        let (vp, vm, v0) = (jones_bracket(plus)?, jones_bracket(minus)?, jones_bracket(zero)?);
        // t^-1 V+ - t V- + (t^(-1/2) - t^(1/2)) V0
        let jones = &(&vp.shift(-2) - &vm.shift(2)) + &(&conway_z() * &v0);
        let (ap, am, a0) = (alexander_skein(plus)?, alexander_skein(minus)?, alexander_skein(zero)?);
        let alex = &(&ap - &am) - &(&conway_z() * &a0);
        Ok(jones.is_zero() && alex.is_zero())
    };
    check().unwrap_or(false)
}

/// One line of the refined skein relation: a crossing, its oriented smoothing,
/// its other smoothing (oriented somehow), and the integer `v`.
///
/// For a positive crossing: `t^(-1/2) V(L0) + t^(3v/2) V(L∞) + t^-1 V(L+) = 0`.
/// For a negative crossing: `t^(3v/2) V(L∞) + t^(1/2) V(L0) + t V(L-) = 0`.
#[derive(Clone, Debug)]
pub struct RefinedSkein {
    pub sign: Sign,
    pub crossing: LinkDiagram,
    pub oriented: LinkDiagram,
    pub unoriented: LinkDiagram,
    pub v: i64,
}

impl RefinedSkein {
    /// Builds the instance at crossing `c` of `d`, measuring `v` from the
    /// writhe lost by the unoriented smoothing: `w(L∞) = w(L±) ∓ 1 - 2v`
    /// (upper sign for positive crossings).
    pub fn at_crossing(d: &LinkDiagram, c: usize) -> Result<Self> {
        let x = d.crossings().get(c).ok_or(Error::UnknownCrossing(c))?;
        let sign = x.sign;
        let oriented = d.smooth_crossing(c, x.oriented_smoothing())?;
        let unoriented = d.smooth_crossing(c, 1 - x.oriented_smoothing())?;
        let v = (d.writhe() - sign.value() - unoriented.writhe()) / 2;
        Ok(Self { sign, crossing: d.clone(), oriented, unoriented, v })
    }

    /// Residual of the relation; zero iff it holds.
    pub fn residual(&self) -> Result<HalfLaurent> {
        let vx = jones_bracket(&self.crossing)?;
        let v0 = jones_bracket(&self.oriented)?;
        let vi = jones_bracket(&self.unoriented)?;
        let k = 3 * self.v;
        Ok(match self.sign {
            Sign::Positive => &(&v0.shift(-1) + &vi.shift(k)) + &vx.shift(-2),
            Sign::Negative => &(&vi.shift(k) + &v0.shift(1)) + &vx.shift(2),
        })
    }
}

pub fn verify_refined_skein(instance: &RefinedSkein) -> bool {
    instance.residual().map(|r| r.is_zero()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::BraidWord;

    fn closure(s: &str) -> LinkDiagram {
        s.parse::<BraidWord>().unwrap().closure()
    }

    fn poly(terms: &[(i64, i64)]) -> HalfLaurent {
        HalfLaurent::from_terms(terms.iter().copied())
    }

    /// Independent oracle: the bracket summed state by state with no grouping,
    /// directly in `t` via `A = t^(-1/4)` stored as quarter powers.
    fn brute_force_jones(d: &LinkDiagram) -> HalfLaurent {
        let n = d.crossing_count();
        let mut quarter: HashMap<i64, i64> = HashMap::new();
        for s in 0..(1u64 << n) {
            let bits: Vec<bool> = (0..n).map(|k| s >> k & 1 == 1).collect();
            let c = d.resolve_all(&crate::diagram::ResolutionState::new(bits)).unwrap();
            let a = (n as i64) - 2 * s.count_ones() as i64;
            // A^a (-A^2 - A^-2)^(c-1), expanded binomially
            let m = c as i64 - 1;
            let mut binom = 1i64;
            for i in 0..=m {
                let a_pow = a + 2 * (m - i) - 2 * i;
                let sign = if m % 2 == 0 { 1 } else { -1 };
                *quarter.entry(-a_pow).or_default() += sign * binom;
                binom = binom * (m - i) / (i + 1);
            }
        }
        let w = d.writhe();
        let mut out = HalfLaurent::zero();
        for (q, c) in quarter {
            // (-A^3)^(-w) = (-1)^w t^(3w/4)
            let e = q + 3 * w;
            assert_eq!(e % 2, 0);
            let sign = if w % 2 == 0 { 1 } else { -1 };
            out.add_term(e / 2, BigInt::from(sign * c));
        }
        out
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(jones_bracket(&LinkDiagram::unknot()).unwrap(), HalfLaurent::one());
        assert_eq!(jones_bracket(&LinkDiagram::unlink(2).unwrap()).unwrap(), unlink_factor());
        // right trefoil -t^4 + t^3 + t, confirmed by the brute-force oracle below
        let t = closure("2: 1 1 1");
        let expected = poly(&[(2, 1), (6, 1), (8, -1)]);
        assert_eq!(brute_force_jones(&t), expected);
        assert_eq!(jones_bracket(&t).unwrap(), expected);
    }

    #[test]
    fn bracket_matches_brute_force() {
        for b in ["3: 1 -2 1 -2", "2: 1 1", "2: -1 -1", "3: 1 2 -1 2", "4: 1 2 3 -1 2", "2: 1 1 1 1 1"] {
            let d = closure(b);
            assert_eq!(jones_bracket(&d).unwrap(), brute_force_jones(&d), "{b}");
        }
    }

    #[test]
    fn skein_agrees_with_bracket() {
        assert_eq!(jones_skein(&LinkDiagram::unknot()).unwrap(), HalfLaurent::one());
        let hopf = closure("2: 1 1");
        let hopf_rev = hopf.reverse_components(&[true, false]);
        for d in [hopf.clone(), hopf_rev.clone(), closure("2: 1 1 1"), closure("3: 1 -2 1 -2")] {
            let b = jones_bracket(&d).unwrap();
            assert_eq!(jones_skein(&d).unwrap(), b);
            assert_eq!(jones_skein_with(&d, DescentOrder::Reversed).unwrap(), b);
        }
        // relative orientation matters for links
        assert_ne!(jones_bracket(&hopf).unwrap(), jones_bracket(&hopf_rev).unwrap());
        assert_eq!(jones_bracket(&hopf).unwrap(), poly(&[(1, -1), (5, -1)]));
    }

    #[test]
    fn alexander_examples() {
        assert_eq!(alexander_skein(&LinkDiagram::unknot()).unwrap(), HalfLaurent::one());
        // a split 2-component link: a clasp-free 2-braid closure on separate strands
        let split = closure("3:");
        let clasp_split = closure("4: 1 -1 3");
        for d in [split, clasp_split, LinkDiagram::unlink(2).unwrap()] {
            assert!(alexander_skein(&d).unwrap().is_zero());
            assert!(alexander_skein_with(&d, DescentOrder::Reversed).unwrap().is_zero());
        }
        let t = closure("2: 1 1 1");
        let expected = poly(&[(2, 1), (0, -1), (-2, 1)]);
        assert_eq!(alexander_skein(&t).unwrap(), expected);
        assert_eq!(alexander_skein_with(&t, DescentOrder::Reversed).unwrap(), expected);
        assert_eq!(alexander_skein(&closure("2: 1 1")).unwrap(), conway_z());
    }

    #[test]
    fn mirror_inverts_variable() {
        for b in ["2: 1 1 1", "3: 1 1 2 -1 2", "2: 1 1"] {
            let d = closure(b);
            assert_eq!(jones_bracket(&d.mirror()).unwrap(), jones_bracket(&d).unwrap().invert_variable());
        }
    }

    #[test]
    fn knot_jones_is_orientation_free() {
        let d = closure("3: 1 1 1 2 -1 2");
        assert_eq!(d.component_count(), 1);
        assert_eq!(jones_bracket(&d.reverse()).unwrap(), jones_bracket(&d).unwrap());
    }

    #[test]
    fn skein_triples() {
        let t = closure("2: 1 1 1");
        for c in 0..3 {
            let minus = t.switch_crossing(c).unwrap();
            let zero = t.smooth_crossing(c, 0).unwrap();
            assert!(verify_skein_triple(&t, &minus, &zero));
            assert!(!verify_skein_triple(&t, &minus, &t));
        }
        let kink_plus = closure("2: 1");
        let kink_minus = closure("2: -1");
        let u2 = LinkDiagram::unlink(2).unwrap();
        assert!(verify_skein_triple(&kink_plus, &kink_minus, &u2));
        assert!(!verify_skein_triple(&kink_plus, &kink_minus, &LinkDiagram::unknot()));
    }

    #[test]
    fn refined_relations() {
        let kp = RefinedSkein::at_crossing(&closure("2: 1"), 0).unwrap();
        assert_eq!(kp.v, 0);
        assert!(verify_refined_skein(&kp));
        let km = RefinedSkein::at_crossing(&closure("2: -1"), 0).unwrap();
        assert_eq!(km.v, 0);
        assert!(verify_refined_skein(&km));
        for b in ["2: 1 1 1", "3: 1 -2 1 -2", "2: 1 1", "3: 1 1 -2 -2"] {
            let d = closure(b);
            for c in 0..d.crossing_count() {
                let inst = RefinedSkein::at_crossing(&d, c).unwrap();
                assert!(verify_refined_skein(&inst), "{b} at {c}");
                let mut wrong = inst.clone();
                wrong.v += 1;
                assert!(!verify_refined_skein(&wrong));
            }
        }
    }

    #[test]
    fn caps() {
        let big = BraidWord::new(2, vec![1; 31]).unwrap().closure();
        assert!(matches!(jones_bracket(&big), Err(Error::CapExceeded { .. })));
    }
}

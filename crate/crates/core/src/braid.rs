//! Braid words, Markov moves and trace closure.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{Crossing, LinkDiagram, Sign};
use crate::error::{Error, Result};

/// A word in the Artin generators of `Br_n`.
///
/// Letter `g > 0` is `σ_g`, `g < 0` is `σ_{|g|}^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidBraid("strand count must be positive".into()));
        }
        for &g in &letters {
            if g == 0 || g.unsigned_abs() as usize >= strands {
                return Err(Error::InvalidBraid(format!("letter {g} out of range for {strands} strands")));
            }
        }
        Ok(Self { strands, letters })
    }

    pub fn identity(strands: usize) -> Result<Self> {
        Self::new(strands, Vec::new())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn writhe(&self) -> i64 {
        self.letters.iter().map(|g| g.signum() as i64).sum()
    }

    /// Image in `Sym_n`; `perm[i]` is where the strand starting at `i` (0-based) ends.
    pub fn permutation(&self) -> Vec<usize> {
        // pos[k] = which starting strand currently occupies position k
        let mut pos: Vec<usize> = (0..self.strands).collect();
        for &g in &self.letters {
            let k = g.unsigned_abs() as usize - 1;
            pos.swap(k, k + 1);
        }
        let mut perm = vec![0; self.strands];
        for (k, &s) in pos.iter().enumerate() {
            perm[s] = k;
        }
        perm
    }

    pub fn inverse(&self) -> Self {
        Self { strands: self.strands, letters: self.letters.iter().rev().map(|g| -g).collect() }
    }

    pub fn concat(&self, other: &BraidWord) -> Result<Self> {
        if self.strands != other.strands {
            return Err(Error::StrandMismatch(self.strands, other.strands));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Self { strands: self.strands, letters })
    }

    /// `s · self · s⁻¹`.
    pub fn conjugate(&self, s: &BraidWord) -> Result<Self> {
        s.concat(self)?.concat(&s.inverse())
    }

    /// Markov II±: appends `σ_n^{±1}` on a new strand.
    pub fn stabilize(&self, positive: bool) -> Self {
        let n = self.strands as i32;
        let mut letters = self.letters.clone();
        letters.push(if positive { n } else { -n });
        Self { strands: self.strands + 1, letters }
    }

    /// Inverse of [`BraidWord::stabilize`]; only fires when the last letter is
    /// `±(n-1)` and that generator occurs nowhere else.
    pub fn destabilize(&self) -> Option<Self> {
        let top = self.strands as i32 - 1;
        let last = *self.letters.last()?;
        if last.abs() != top || self.letters.iter().filter(|g| g.abs() == top).count() != 1 {
            return None;
        }
        let mut letters = self.letters.clone();
        letters.pop();
        Some(Self { strands: self.strands - 1, letters })
    }

    /// `β ↦ β × id ∈ Br_{2n}`.
    pub fn double(&self) -> Self {
        Self { strands: 2 * self.strands, letters: self.letters.clone() }
    }

    /// Cancels adjacent `g g⁻¹` pairs.
    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &g in &self.letters {
            if out.last() == Some(&-g) {
                out.pop();
            } else {
                out.push(g);
            }
        }
        Self { strands: self.strands, letters: out }
    }

    pub fn cycle_count(&self) -> usize {
        let perm = self.permutation();
        let mut seen = vec![false; perm.len()];
        let mut cycles = 0;
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
            }
        }
        cycles
    }

    /// Trace closure as an oriented PD; crossing `k` comes from letter `k`.
    pub fn closure(&self) -> LinkDiagram {
        let n = self.strands;
        let mut current: Vec<u32> = (1..=n as u32).collect();
        let mut next_label = n as u32 + 1;
        let mut crossings = Vec::with_capacity(self.letters.len());
        for &g in &self.letters {
            let k = g.unsigned_abs() as usize - 1;
            let (x, y) = (current[k], current[k + 1]);
            let (u, v) = (next_label, next_label + 1);
            next_label += 2;
            // strands run upward; the left strand ends at top-right (v)
            if g > 0 {
                crossings.push(Crossing { edges: [y, v, u, x], sign: Sign::Positive });
            } else {
                crossings.push(Crossing { edges: [x, y, v, u], sign: Sign::Negative });
            }
            current[k] = u;
            current[k + 1] = v;
        }
        // close: the top edge at position i is the bottom edge i
        let mut rename = std::collections::HashMap::new();
        for (i, &top) in current.iter().enumerate() {
            rename.insert(top, i as u32 + 1);
        }
        for c in &mut crossings {
            for e in &mut c.edges {
                if let Some(&r) = rename.get(e) {
                    *e = r;
                }
            }
        }
        let circles = (0..n).filter(|&i| current[i] == i as u32 + 1).map(|i| i as u32 + 1).collect();
        LinkDiagram::new(crossings, circles).expect("braid closure is a valid diagram")
    }

    /// Seeded walk through Markov moves and braid-group relations.
    ///
    /// The word never grows beyond `self.len() + 4` letters or
    /// `self.strands() + 2` strands.
    pub fn random_markov_walk(&self, steps: usize, seed: u64) -> BraidWord {
        MarkovWalk::new(self, seed).run(steps)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.strands)?;
        for g in &self.letters {
            write!(f, " {g}")?;
        }
        Ok(())
    }
}

impl FromStr for BraidWord {
    type Err = Error;

    /// Parses `n: g1 g2 ...`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) =
            s.split_once(':').ok_or_else(|| Error::InvalidBraid(format!("missing `n:` prefix in {s:?}")))?;
        let strands = head
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidBraid(format!("bad strand count {:?}", head.trim())))?;
        let letters = tail
            .split_whitespace()
            .map(|t| t.parse::<i32>().map_err(|_| Error::InvalidBraid(format!("bad letter {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        BraidWord::new(strands, letters)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    ConjugateGenerator,
    Rotate,
    BraidRelation,
    FarCommute,
    Stabilize,
    Destabilize,
}

const MOVES: [Move; 6] =
    [Move::ConjugateGenerator, Move::Rotate, Move::BraidRelation, Move::FarCommute, Move::Stabilize, Move::Destabilize];

struct MarkovWalk {
    word: BraidWord,
    rng: ChaCha8Rng,
    max_len: usize,
    max_strands: usize,
}

impl MarkovWalk {
    fn new(start: &BraidWord, seed: u64) -> Self {
        Self {
            word: start.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_len: start.len() + 4,
            max_strands: start.strands() + 2,
        }
    }

    fn run(mut self, steps: usize) -> BraidWord {
        for _ in 0..steps {
            let mut order = MOVES;
            order.shuffle(&mut self.rng);
            // first applicable move in random order
            let _ = order.iter().any(|m| self.try_move(*m));
        }
        self.word
    }

    fn try_move(&mut self, m: Move) -> bool {
        let w = &self.word;
        let next = match m {
            Move::ConjugateGenerator => {
                if w.strands() < 2 {
                    return false;
                }
                let i = self.rng.gen_range(1..w.strands()) as i32;
                let g = if self.rng.gen_bool(0.5) { i } else { -i };
                let s = BraidWord { strands: w.strands(), letters: vec![g] };
                let c = w.conjugate(&s).expect("same strand count").free_reduce();
                (c.len() <= self.max_len).then_some(c)
            }
            Move::Rotate => {
                if w.is_empty() {
                    return false;
                }
                // conjugation by the last letter
                let mut letters = w.letters.clone();
                let g = letters.pop().unwrap();
                letters.insert(0, g);
                Some(BraidWord { strands: w.strands(), letters })
            }
            Move::BraidRelation => self.braid_relation(),
            Move::FarCommute => {
                let spots: Vec<usize> = (0..w.len().saturating_sub(1))
                    .filter(|&k| (w.letters[k].abs() - w.letters[k + 1].abs()).abs() >= 2)
                    .collect();
                spots.choose(&mut self.rng).map(|&k| {
                    let mut letters = w.letters.clone();
                    letters.swap(k, k + 1);
                    BraidWord { strands: w.strands(), letters }
                })
            }
            Move::Stabilize => {
                if w.len() + 1 > self.max_len || w.strands() + 1 > self.max_strands {
                    return false;
                }
                Some(w.stabilize(self.rng.gen_bool(0.5)))
            }
            Move::Destabilize => w.destabilize(),
        };
        match next {
            Some(b) => {
                self.word = b;
                true
            }
            None => false,
        }
    }

    /// Rewrites one occurrence of
    /// `a b a = b a b` (equal signs) or `a b a⁻¹ = b⁻¹ a b` (positive `a`, `b`),
    /// with `|a|`, `|b|` adjacent generators.
    fn braid_relation(&mut self) -> Option<BraidWord> {
        let w = &self.word.letters;
        let adjacent = |a: i32, b: i32| (a.abs() - b.abs()).abs() == 1;
        let mut spots = Vec::new();
        for k in 0..w.len().saturating_sub(2) {
            let (a, b, c) = (w[k], w[k + 1], w[k + 2]);
            if !adjacent(a, b) {
                continue;
            }
            if a == c && a.signum() == b.signum() {
                spots.push((k, [b, a, b]));
            } else if a > 0 && b > 0 && c == -a {
                spots.push((k, [-b, a, b]));
            } else if a < 0 && b > 0 && c == -a {
                // b⁻¹ a b = a b a⁻¹ read right to left
                spots.push((k, [b, c, -b]));
            }
        }
        let &(k, rep) = spots.choose(&mut self.rng)?;
        let mut letters = w.clone();
        letters[k..k + 3].copy_from_slice(&rep);
        Some(BraidWord { strands: self.word.strands(), letters })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bw(s: &str) -> BraidWord {
        s.parse().unwrap()
    }

    #[test]
    fn writhe_examples() {
        assert_eq!(bw("2: 1 1 1").writhe(), 3);
        assert_eq!(bw("3:").writhe(), 0);
        assert_eq!(bw("2: 1 -1 1 -1 1").writhe(), 1);
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(bw("2: 1").permutation(), vec![1, 0]);
        assert_eq!(bw("3: 1 2 1").permutation(), bw("3: 2 1 2").permutation());
        assert_eq!(bw("3: 1 2 1").permutation(), vec![2, 1, 0]);
        assert_eq!(bw("3:").permutation(), vec![0, 1, 2]);
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(bw("2: 1").conjugate(&bw("2:")).unwrap(), bw("2: 1"));
        assert_eq!(bw("3: 1").conjugate(&bw("3: 2")).unwrap(), bw("3: 2 1 -2"));
        assert!(bw("3: 1").conjugate(&bw("2: 1")).is_err());
    }

    #[test]
    fn stabilize_and_double() {
        assert_eq!(bw("1:").stabilize(true), bw("2: 1"));
        let b = bw("3: 1 -2 1");
        assert_eq!(b.stabilize(false).writhe(), b.writhe() - 1);
        assert_eq!(b.stabilize(false).destabilize(), Some(b.clone()));
        assert_eq!(bw("2: 1").double(), bw("4: 1"));
        let d = b.double();
        assert_eq!(d.writhe(), b.writhe());
        let p = d.permutation();
        assert!((3..6).all(|i| p[i] == i));
        assert_eq!(bw("3: 2 1 2").destabilize(), None);
    }

    #[test]
    fn parse_errors() {
        assert!("2 1 1".parse::<BraidWord>().is_err());
        assert!("2: 2".parse::<BraidWord>().is_err());
        assert!("2: 0".parse::<BraidWord>().is_err());
        assert!("0:".parse::<BraidWord>().is_err());
        assert!("2: x".parse::<BraidWord>().is_err());
        assert_eq!(bw("2: 1 -1").to_string(), "2: 1 -1");
    }

    #[test]
    fn closure_components() {
        assert_eq!(bw("1:").closure().crossing_count(), 0);
        assert_eq!(bw("1:").closure().component_count(), 1);
        let t = bw("2: 1 1 1").closure();
        assert_eq!((t.crossing_count(), t.component_count()), (3, 1));
        let h = bw("2: 1 1").closure();
        assert_eq!((h.crossing_count(), h.component_count()), (2, 2));
        assert_eq!(bw("4: 1 -3").closure().component_count(), 2);
        assert_eq!(bw("3: 1").closure().component_count(), 2);
    }

    #[test]
    fn walk_is_deterministic() {
        let b = bw("3: 1 -2 1 -2");
        assert_eq!(b.random_markov_walk(0, 9), b);
        assert_eq!(b.random_markov_walk(40, 9), b.random_markov_walk(40, 9));
        let w = b.random_markov_walk(40, 9);
        assert!(w.len() <= b.len() + 4 && w.strands() <= b.strands() + 2);
    }

    use proptest::prelude::*;

    fn arb_braid() -> impl Strategy<Value = BraidWord> {
        (2usize..6).prop_flat_map(|n| {
            let gen = (1..n as i32).prop_flat_map(|g| prop_oneof![Just(g), Just(-g)]);
            proptest::collection::vec(gen, 0..10).prop_map(move |l| BraidWord::new(n, l).unwrap())
        })
    }

    fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
        // (p ∘ q)(i) = p(q(i))
        q.iter().map(|&i| p[i]).collect()
    }

    fn invert(p: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; p.len()];
        for (i, &x) in p.iter().enumerate() {
            inv[x] = i;
        }
        inv
    }

    proptest! {
        #[test]
        fn conjugation_is_homomorphic((b, s) in (2usize..6).prop_flat_map(|n| {
            let gen = (1..n as i32).prop_flat_map(|g| prop_oneof![Just(g), Just(-g)]);
            (proptest::collection::vec(gen.clone(), 0..8), proptest::collection::vec(gen, 0..8))
                .prop_map(move |(a, c)| (BraidWord::new(n, a).unwrap(), BraidWord::new(n, c).unwrap()))
        })) {
            let lhs = b.conjugate(&s).unwrap().permutation();
            // the word s·b·s⁻¹ acts by s first, so its permutation is perm(s⁻¹)∘perm(b)∘perm(s)
            let ps = s.permutation();
            let rhs = compose(&invert(&ps), &compose(&b.permutation(), &ps));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn closure_components_match_cycles(b in arb_braid()) {
            let d = b.closure();
            prop_assert_eq!(d.component_count(), b.cycle_count());
            prop_assert_eq!(d.writhe(), b.writhe());
            prop_assert_eq!(d.crossing_count(), b.len());
        }

        #[test]
        fn walk_preserves_component_count(b in arb_braid(), seed in 0u64..1000) {
            let w = b.random_markov_walk(25, seed);
            prop_assert_eq!(w.cycle_count(), b.cycle_count());
        }
    }
}

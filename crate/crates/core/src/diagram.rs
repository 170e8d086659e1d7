//! Oriented planar diagrams in PD notation.
//!
//! A crossing `X(a,b,c,d)` lists its four edges counterclockwise starting at
//! the incoming under-strand, so the under-strand runs `a -> c`. The
//! over-strand runs `d -> b` at a positive crossing and `b -> d` at a
//! negative one. Smoothing `0` joins `(a,b)` and `(c,d)`, smoothing `1`
//! joins `(a,d)` and `(b,c)`; `0` is the oriented smoothing of a positive
//! crossing and the unoriented smoothing of a negative one.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub edges: [u32; 4],
    pub sign: Sign,
}

impl Crossing {
    /// Slots through which an oriented strand enters this crossing.
    fn entering(&self) -> [usize; 2] {
        match self.sign {
            Sign::Positive => [0, 3],
            Sign::Negative => [0, 1],
        }
    }

    /// The two edge pairs joined by smoothing `which`.
    pub fn smoothing_pairs(&self, which: u8) -> [(u32, u32); 2] {
        let [a, b, c, d] = self.edges;
        if which == 0 {
            [(a, b), (c, d)]
        } else {
            [(a, d), (b, c)]
        }
    }

    /// The smoothing that respects orientation.
    pub fn oriented_smoothing(&self) -> u8 {
        match self.sign {
            Sign::Positive => 0,
            Sign::Negative => 1,
        }
    }
}

/// An oriented link diagram. Crossing ids are indices into [`LinkDiagram::crossings`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    circles: Vec<u32>,
}

/// One smoothing choice per crossing; bit `k` belongs to crossing `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResolutionState {
    bits: Vec<bool>,
}

impl ResolutionState {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_mask(mask: u64, len: usize) -> Self {
        Self { bits: (0..len).map(|k| mask >> k & 1 == 1).collect() }
    }

    pub fn mask(&self) -> u64 {
        self.bits.iter().enumerate().fold(0, |m, (k, &b)| if b { m | 1 << k } else { m })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl LinkDiagram {
    /// Builds an oriented diagram from crossings already in PD convention.
    pub fn new(crossings: Vec<Crossing>, mut circles: Vec<u32>) -> Result<Self> {
        circles.sort_unstable();
        let d = Self { crossings, circles };
        d.validate()?;
        Ok(d)
    }

    pub fn unknot() -> Self {
        Self { crossings: Vec::new(), circles: vec![1] }
    }

    /// `n` disjoint crossingless circles.
    pub fn unlink(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidBraid("an unlink needs at least one component".into()));
        }
        Ok(Self { crossings: Vec::new(), circles: (1..=n as u32).collect() })
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn circles(&self) -> &[u32] {
        &self.circles
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn positive_count(&self) -> usize {
        self.crossings.iter().filter(|c| c.sign == Sign::Positive).count()
    }

    pub fn negative_count(&self) -> usize {
        self.crossings.len() - self.positive_count()
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign.value()).sum()
    }

    /// All edge ids, ascending.
    pub fn edge_ids(&self) -> Vec<u32> {
        let mut ids: BTreeSet<u32> = self.circles.iter().copied().collect();
        for c in &self.crossings {
            ids.extend(c.edges);
        }
        ids.into_iter().collect()
    }

    fn validate(&self) -> Result<()> {
        let mut count: BTreeMap<u32, usize> = BTreeMap::new();
        let mut entering: BTreeMap<u32, usize> = BTreeMap::new();
        for c in &self.crossings {
            for (p, &e) in c.edges.iter().enumerate() {
                if e == 0 {
                    return Err(Error::Parse("edge ids must be positive".into()));
                }
                *count.entry(e).or_default() += 1;
                if c.entering().contains(&p) {
                    *entering.entry(e).or_default() += 1;
                }
            }
        }
        for &e in &self.circles {
            if e == 0 {
                return Err(Error::Parse("edge ids must be positive".into()));
            }
            if count.contains_key(&e) || self.circles.iter().filter(|&&x| x == e).count() > 1 {
                return Err(Error::EdgeCount(e, count.get(&e).copied().unwrap_or(0) + 1));
            }
        }
        for (&e, &n) in &count {
            if n != 2 {
                return Err(Error::EdgeCount(e, n));
            }
            if entering.get(&e).copied().unwrap_or(0) != 1 {
                return Err(Error::Orientation(e));
            }
        }
        Ok(())
    }

    /// Successor map along the orientation (`O(e)` circles map to themselves).
    pub fn successor_map(&self) -> BTreeMap<u32, u32> {
        let mut succ = BTreeMap::new();
        for c in &self.crossings {
            for p in c.entering() {
                succ.insert(c.edges[p], c.edges[(p + 2) % 4]);
            }
        }
        for &e in &self.circles {
            succ.insert(e, e);
        }
        succ
    }

    /// Components as edge cycles in traversal order, each starting at its minimal edge.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let succ = self.successor_map();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in succ.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut e = start;
            while seen.insert(e) {
                comp.push(e);
                e = succ[&e];
            }
            out.push(comp);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    fn check_crossing(&self, c: usize) -> Result<()> {
        if c >= self.crossings.len() {
            return Err(Error::UnknownCrossing(c));
        }
        Ok(())
    }

    /// Exchanges over and under at crossing `c`.
    pub fn switch_crossing(&self, c: usize) -> Result<LinkDiagram> {
        self.check_crossing(c)?;
        let mut out = self.clone();
        let x = &mut out.crossings[c];
        let [a, b, cc, d] = x.edges;
        // the old over-strand becomes the under-strand; its incoming end leads
        x.edges = match x.sign {
            Sign::Positive => [d, a, b, cc],
            Sign::Negative => [b, cc, d, a],
        };
        x.sign = x.sign.flip();
        Ok(out)
    }

    pub fn mirror(&self) -> LinkDiagram {
        let mut out = self.clone();
        for c in 0..out.crossings.len() {
            out = out.switch_crossing(c).expect("crossing exists");
        }
        out
    }

    /// Reverses the orientation of every component.
    pub fn reverse(&self) -> LinkDiagram {
        let comps: Vec<BTreeSet<u32>> = self.components().into_iter().map(|c| c.into_iter().collect()).collect();
        self.reverse_components(&comps.iter().map(|_| true).collect::<Vec<_>>())
    }

    /// Reverses the orientation of the components flagged in `flip`
    /// (indexed like [`LinkDiagram::components`]).
    pub fn reverse_components(&self, flip: &[bool]) -> LinkDiagram {
        let comps = self.components();
        let mut flipped = BTreeSet::new();
        for (comp, &f) in comps.iter().zip(flip) {
            if f {
                flipped.extend(comp.iter().copied());
            }
        }
        let raw = self
            .crossings
            .iter()
            .map(|c| {
                let ent = c.entering();
                let mut hint = [None; 4];
                for (p, h) in hint.iter_mut().enumerate() {
                    let incoming = ent.contains(&p);
                    *h = Some(incoming ^ flipped.contains(&c.edges[p]));
                }
                RawCrossing { slots: c.edges, incoming: hint }
            })
            .collect();
        orient(raw, self.circles.clone(), true).expect("reversal keeps consistency")
    }

    /// Number of circles after smoothing every crossing per `state`.
    pub fn resolve_all(&self, state: &ResolutionState) -> Result<usize> {
        if state.len() != self.crossings.len() {
            return Err(Error::StateLength { expected: self.crossings.len(), got: state.len() });
        }
        let table = SmoothingTable::new(self);
        let mut uf = UnionFind::new(table.edge_count());
        Ok(table.circle_count(state.mask(), &mut uf))
    }

    /// Circles of the oriented resolution. For a closed braid this is the
    /// strand count.
    pub fn seifert_circle_count(&self) -> usize {
        let bits = self.crossings.iter().map(|c| c.oriented_smoothing() == 1).collect();
        self.resolve_all(&ResolutionState::new(bits)).expect("one bit per crossing")
    }

    /// Removes crossing `c` by smoothing it (`which` is 0 or 1).
    ///
    /// Crossings after `c` shift down by one. Edges merged by the smoothing
    /// take the smallest id of their class. When the smoothing does not respect
    /// orientation, each affected component is re-oriented to agree with the old
    /// orientation at its first remaining crossing slot.
    pub fn smooth_crossing(&self, c: usize, which: u8) -> Result<LinkDiagram> {
        self.check_crossing(c)?;
        let removed = &self.crossings[c];
        let mut classes: BTreeMap<u32, u32> = BTreeMap::new();
        for e in removed.edges {
            classes.insert(e, e);
        }
        fn find(classes: &BTreeMap<u32, u32>, mut e: u32) -> u32 {
            while classes[&e] != e {
                e = classes[&e];
            }
            e
        }
        for (x, y) in removed.smoothing_pairs(which) {
            let (rx, ry) = (find(&classes, x), find(&classes, y));
            let (lo, hi) = (rx.min(ry), rx.max(ry));
            classes.insert(hi, lo);
        }
        let rep = |e: u32| if classes.contains_key(&e) { find(&classes, e) } else { e };

        let mut raw = Vec::with_capacity(self.crossings.len() - 1);
        let mut used = BTreeSet::new();
        for (k, x) in self.crossings.iter().enumerate() {
            if k == c {
                continue;
            }
            let ent = x.entering();
            let mut slots = [0; 4];
            let mut incoming = [None; 4];
            for p in 0..4 {
                slots[p] = rep(x.edges[p]);
                incoming[p] = Some(ent.contains(&p));
                used.insert(slots[p]);
            }
            raw.push(RawCrossing { slots, incoming });
        }
        let mut circles = self.circles.clone();
        for e in removed.edges {
            let r = rep(e);
            if !used.contains(&r) && !circles.contains(&r) {
                circles.push(r);
            }
        }
        orient(raw, circles, false)
    }

    /// PD text, `X(a,b,c,d)` terms then `O(e)` terms.
    pub fn to_pd(&self) -> String {
        let mut parts: Vec<String> = self
            .crossings
            .iter()
            .map(|c| {
                let [a, b, cc, d] = c.edges;
                format!("X({a},{b},{cc},{d})")
            })
            .collect();
        parts.extend(self.circles.iter().map(|e| format!("O({e})")));
        parts.join(" ")
    }

    /// Parses PD text. Orientation comes from the under-strands; a component
    /// that never passes under is oriented so that edge ids increase after
    /// its smallest edge.
    pub fn parse_pd(text: &str) -> Result<LinkDiagram> {
        let mut crossings = Vec::new();
        let mut circles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let (kind, after) = rest.split_at(1);
            let after = after.trim_start();
            let body_start =
                after.strip_prefix('(').ok_or_else(|| Error::Parse(format!("expected '(' after {kind:?}")))?;
            let close = body_start.find(')').ok_or_else(|| Error::Parse("unterminated term".into()))?;
            let ids = body_start[..close]
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .ok()
                        .filter(|&v| v > 0)
                        .ok_or_else(|| Error::Parse(format!("bad edge id {:?}", t.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            match (kind, ids.len()) {
                ("X", 4) => crossings.push([ids[0], ids[1], ids[2], ids[3]]),
                ("O", 1) => circles.push(ids[0]),
                _ => return Err(Error::Parse(format!("bad term {kind}({})", &body_start[..close]))),
            }
            rest = body_start[close + 1..].trim_start();
        }
        Self::from_raw_pd(&crossings, circles)
    }

    /// Parses `{"crossings":[[a,b,c,d],...],"circles":[e,...]}`.
    pub fn parse_pd_json(text: &str) -> Result<LinkDiagram> {
        let j: PdJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if j.crossings.iter().flatten().chain(&j.circles).any(|&e| e == 0) {
            return Err(Error::Parse("edge ids must be positive".into()));
        }
        Self::from_raw_pd(&j.crossings, j.circles)
    }

    pub fn to_pd_json(&self) -> serde_json::Value {
        let j = PdJson { crossings: self.crossings.iter().map(|c| c.edges).collect(), circles: self.circles.clone() };
        serde_json::to_value(j).expect("plain data")
    }

    fn from_raw_pd(crossings: &[[u32; 4]], circles: Vec<u32>) -> Result<LinkDiagram> {
        let mut count: BTreeMap<u32, usize> = BTreeMap::new();
        for e in crossings.iter().flatten() {
            *count.entry(*e).or_default() += 1;
        }
        for &e in &circles {
            *count.entry(e).or_default() += 2;
        }
        if let Some((&e, &n)) = count.iter().find(|(_, &n)| n != 2) {
            return Err(Error::EdgeCount(e, n));
        }
        let raw = crossings
            .iter()
            .map(|&slots| RawCrossing { slots, incoming: [Some(true), None, Some(false), None] })
            .collect();
        orient(raw, circles, true)
    }
}

impl fmt::Debug for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinkDiagram[{}]", self.to_pd())?;
        let signs: String = self.crossings.iter().map(|c| if c.sign == Sign::Positive { '+' } else { '-' }).collect();
        write!(f, "({signs})")
    }
}

impl fmt::Display for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pd())
    }
}

#[derive(Serialize, Deserialize)]
struct PdJson {
    crossings: Vec<[u32; 4]>,
    #[serde(default)]
    circles: Vec<u32>,
}

/// A crossing whose slots are known but whose strand directions are only hinted.
struct RawCrossing {
    slots: [u32; 4],
    /// `Some(true)` if the strand is believed to enter through this slot.
    incoming: [Option<bool>; 4],
}

/// Assigns an orientation to every component and rewrites crossings into PD
/// convention. With `strict`, every hint must agree with the result.
fn orient(raw: Vec<RawCrossing>, circles: Vec<u32>, strict: bool) -> Result<LinkDiagram> {
    let mut ends: HashMap<u32, Vec<(usize, usize)>> = HashMap::new();
    for (x, rc) in raw.iter().enumerate() {
        for (p, &e) in rc.slots.iter().enumerate() {
            ends.entry(e).or_default().push((x, p));
        }
    }
    if let Some((&e, v)) = ends.iter().find(|(_, v)| v.len() != 2) {
        return Err(Error::EdgeCount(e, v.len()));
    }
    let other_end = |e: u32, here: (usize, usize)| -> (usize, usize) {
        let v = &ends[&e];
        if v[0] == here {
            v[1]
        } else {
            v[0]
        }
    };

    let mut enters: Vec<[Option<bool>; 4]> = vec![[None; 4]; raw.len()];
    for x in 0..raw.len() {
        for p in 0..4 {
            if enters[x][p].is_some() {
                continue;
            }
            // walk the component entering at (x, p)
            let mut walk: Vec<((usize, usize), u32)> = Vec::new();
            let mut cur = (x, p);
            loop {
                let exit = (cur.0, (cur.1 + 2) % 4);
                let e = raw[exit.0].slots[exit.1];
                walk.push((cur, e));
                cur = other_end(e, exit);
                if cur == (x, p) {
                    break;
                }
            }
            let hinted = walk
                .iter()
                .flat_map(|&((cx, cp), _)| [(cx, cp), (cx, (cp + 2) % 4)])
                .filter_map(|(cx, cp)| raw[cx].incoming[cp].map(|h| ((cx, cp), h)))
                .min_by_key(|&(slot, _)| slot);
            let forward = match hinted {
                Some(((cx, cp), h)) => {
                    let entered_forward = walk.iter().any(|&(s, _)| s == (cx, cp));
                    entered_forward == h
                }
                None => {
                    let edges: Vec<u32> = walk.iter().map(|&(_, e)| e).collect();
                    let k = (0..edges.len()).min_by_key(|&i| edges[i]).unwrap();
                    let next = edges[(k + 1) % edges.len()];
                    let prev = edges[(k + edges.len() - 1) % edges.len()];
                    next >= prev
                }
            };
            for &((cx, cp), _) in &walk {
                let ep = (cp + 2) % 4;
                enters[cx][cp] = Some(forward);
                enters[cx][ep] = Some(!forward);
            }
        }
    }

    let mut crossings = Vec::with_capacity(raw.len());
    for (x, rc) in raw.iter().enumerate() {
        let ent: [bool; 4] = enters[x].map(|v| v.expect("every slot visited"));
        if strict {
            for p in 0..4 {
                if let Some(h) = rc.incoming[p] {
                    if h != ent[p] {
                        return Err(Error::Orientation(rc.slots[p]));
                    }
                }
            }
        }
        let (slots, ent) = if ent[0] {
            (rc.slots, ent)
        } else {
            let [a, b, c, d] = rc.slots;
            ([c, d, a, b], [ent[2], ent[3], ent[0], ent[1]])
        };
        let sign = if ent[3] { Sign::Positive } else { Sign::Negative };
        crossings.push(Crossing { edges: slots, sign });
    }
    LinkDiagram::new(crossings, circles)
}

/// Dense edge indexing shared by the state-sum and cube computations.
pub(crate) struct SmoothingTable {
    /// Edge ids, ascending; index in this list is the dense edge index.
    pub edge_ids: Vec<u32>,
    /// `pairs[k][which]` = the two dense index pairs joined at crossing `k`.
    pub pairs: Vec<[[(usize, usize); 2]; 2]>,
}

impl SmoothingTable {
    pub fn new(d: &LinkDiagram) -> Self {
        let edge_ids = d.edge_ids();
        let index: HashMap<u32, usize> = edge_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let pairs = d
            .crossings
            .iter()
            .map(|c| {
                let conv = |w: u8| {
                    let [(a, b), (x, y)] = c.smoothing_pairs(w);
                    [(index[&a], index[&b]), (index[&x], index[&y])]
                };
                [conv(0), conv(1)]
            })
            .collect();
        Self { edge_ids, pairs }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids.len()
    }

    fn fill(&self, state: u64, uf: &mut UnionFind) {
        uf.reset();
        for (k, p) in self.pairs.iter().enumerate() {
            let w = (state >> k & 1) as usize;
            for &(a, b) in &p[w] {
                uf.union(a, b);
            }
        }
    }

    pub fn circle_count(&self, state: u64, uf: &mut UnionFind) -> usize {
        self.fill(state, uf);
        (0..self.edge_count()).filter(|&i| uf.find(i) == i).count()
    }

    /// Circle index of every edge, circles numbered by their smallest edge id.
    pub fn circles(&self, state: u64, uf: &mut UnionFind) -> (Vec<u8>, usize) {
        self.fill(state, uf);
        let n = self.edge_count();
        let mut label = vec![u8::MAX; n];
        let mut root_label: HashMap<usize, u8> = HashMap::new();
        let mut next = 0u8;
        for (i, slot) in label.iter_mut().enumerate() {
            let r = uf.find(i);
            *slot = *root_label.entry(r).or_insert_with(|| {
                next += 1;
                next - 1
            });
        }
        (label, next as usize)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::BraidWord;
    use proptest::prelude::*;

    fn hopf() -> LinkDiagram {
        LinkDiagram::parse_pd("X(1,4,2,3) X(3,2,4,1)").unwrap()
    }

    fn trefoil() -> LinkDiagram {
        "2: 1 1 1".parse::<BraidWord>().unwrap().closure()
    }

    fn circles(d: &LinkDiagram, mask: u64) -> usize {
        d.resolve_all(&ResolutionState::from_mask(mask, d.crossing_count())).unwrap()
    }

    #[test]
    fn seifert_circles_of_closed_braids() {
        for w in ["1:", "2: 1 1 1", "3: 1 -2 1 -2", "4: 1 2 3 -1", "3: 2 2"] {
            let b: BraidWord = w.parse().unwrap();
            assert_eq!(b.closure().seifert_circle_count(), b.strands(), "{w}");
        }
        assert_eq!(LinkDiagram::unlink(3).unwrap().seifert_circle_count(), 3);
    }

    #[test]
    fn parse_unknot_and_hopf() {
        let u = LinkDiagram::parse_pd("O(1)").unwrap();
        assert_eq!((u.crossing_count(), u.component_count()), (0, 1));
        let h = hopf();
        assert_eq!((h.crossing_count(), h.component_count()), (2, 2));
        assert_eq!(h.writhe(), -2);
        let j = LinkDiagram::parse_pd_json(r#"{"crossings":[[1,4,2,3],[3,2,4,1]],"circles":[]}"#).unwrap();
        assert_eq!(j, h);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(LinkDiagram::parse_pd("X(1,1,1,2) X(2,3,3,4)"), Err(Error::EdgeCount(1, 3))));
        assert!(LinkDiagram::parse_pd("X(1,2,3)").is_err());
        assert!(LinkDiagram::parse_pd("Y(1)").is_err());
        assert!(LinkDiagram::parse_pd("X(1,4,2,3) X(3,2,4,1").is_err());
        assert!(LinkDiagram::parse_pd("X(0,4,2,3) X(3,2,4,0)").is_err());
        // edge 1 enters as under-strand at both of its ends
        assert!(matches!(LinkDiagram::parse_pd("X(1,3,2,4) X(1,4,2,3)"), Err(Error::Orientation(_))));
        assert!(LinkDiagram::parse_pd_json("{").is_err());
    }

    #[test]
    fn hopf_states() {
        let h = hopf();
        assert_eq!(circles(&h, 0b00), 2);
        assert_eq!(circles(&h, 0b11), 2);
        assert_eq!(circles(&h, 0b01), 1);
        assert_eq!(circles(&h, 0b10), 1);
        assert_eq!(LinkDiagram::unknot().resolve_all(&ResolutionState::new(vec![])).unwrap(), 1);
        assert!(h.resolve_all(&ResolutionState::new(vec![true])).is_err());
    }

    #[test]
    fn trefoil_seifert_state() {
        assert_eq!(circles(&trefoil(), 0), 2);
    }

    #[test]
    fn smoothing_trefoil_and_hopf() {
        let t = trefoil();
        let oriented = t.smooth_crossing(0, 0).unwrap();
        assert_eq!((oriented.crossing_count(), oriented.component_count()), (2, 2));
        assert_eq!(oriented.writhe(), 2);
        let other = t.smooth_crossing(0, 1).unwrap();
        assert_eq!((other.crossing_count(), other.component_count()), (2, 1));
        for c in 0..2 {
            for w in 0..2 {
                assert_eq!(hopf().smooth_crossing(c, w).unwrap().component_count(), 1);
            }
        }
        assert!(t.smooth_crossing(3, 0).is_err());
    }

    #[test]
    fn switching() {
        let t = trefoil();
        let s = t.switch_crossing(1).unwrap();
        assert_eq!((s.positive_count(), s.negative_count()), (2, 1));
        assert_eq!(s.switch_crossing(1).unwrap(), t);
        assert_eq!(s.component_count(), 1);
        assert!(t.switch_crossing(7).is_err());
        assert_eq!(t.mirror().mirror(), t);
        assert_eq!(t.mirror().writhe(), -3);
    }

    #[test]
    fn unlinks() {
        assert_eq!(LinkDiagram::unlink(1).unwrap(), LinkDiagram::unknot());
        let u2 = LinkDiagram::unlink(2).unwrap();
        assert_eq!((u2.component_count(), u2.crossing_count()), (2, 0));
        assert!(LinkDiagram::unlink(0).is_err());
    }

    #[test]
    fn reversal_keeps_signs_of_knots() {
        let t = trefoil();
        assert_eq!(t.reverse().writhe(), t.writhe());
        let h = "2: 1 1".parse::<BraidWord>().unwrap().closure();
        assert_eq!(h.reverse_components(&[true, false]).writhe(), -2);
    }

    fn arb_diagram() -> impl Strategy<Value = LinkDiagram> {
        (2usize..5).prop_flat_map(|n| {
            let gen = (1..n as i32).prop_flat_map(|g| prop_oneof![Just(g), Just(-g)]);
            proptest::collection::vec(gen, 0..7).prop_map(move |l| BraidWord::new(n, l).unwrap().closure())
        })
    }

    fn has_under_everywhere(d: &LinkDiagram) -> bool {
        let under: BTreeSet<u32> = d.crossings().iter().flat_map(|c| [c.edges[0], c.edges[2]]).collect();
        d.components()
            .iter()
            .all(|comp| comp.len() == 1 && d.circles().contains(&comp[0]) || comp.iter().any(|e| under.contains(e)))
    }

    proptest! {
        #[test]
        fn pd_round_trip(d in arb_diagram()) {
            prop_assume!(has_under_everywhere(&d));
            prop_assert_eq!(&LinkDiagram::parse_pd(&d.to_pd()).unwrap(), &d);
            let js = d.to_pd_json().to_string();
            prop_assert_eq!(&LinkDiagram::parse_pd_json(&js).unwrap(), &d);
        }

        #[test]
        fn circle_bounds(d in arb_diagram(), mask in any::<u64>()) {
            let n = d.crossing_count();
            let m = if n == 0 { 0 } else { mask & ((1u64 << n) - 1) };
            let c = circles(&d, m);
            prop_assert!(c >= 1);
            prop_assert!(c <= d.edge_ids().len() / 2 + d.component_count());
        }

        #[test]
        fn smoothing_commutes_with_resolution(d in arb_diagram(), mask in any::<u64>(), pick in any::<usize>()) {
            let n = d.crossing_count();
            prop_assume!(n > 0);
            let c = pick % n;
            let m = mask & ((1u64 << n) - 1);
            let bit = (m >> c & 1) as u8;
            let smoothed = d.smooth_crossing(c, bit).unwrap();
            let low = m & ((1u64 << c) - 1);
            let high = (m >> (c + 1)) << c;
            prop_assert_eq!(circles(&smoothed, low | high), circles(&d, m));
        }

        #[test]
        fn oriented_smoothing_keeps_other_signs(d in arb_diagram(), pick in any::<usize>()) {
            let n = d.crossing_count();
            prop_assume!(n > 0);
            let c = pick % n;
            let s = d.smooth_crossing(c, d.crossings()[c].oriented_smoothing()).unwrap();
            prop_assert_eq!(s.writhe(), d.writhe() - d.crossings()[c].sign.value());
        }
    }
}

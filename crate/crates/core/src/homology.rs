//! Integral homology of finite free cochain complexes.
//!
//! Differentials go up: `d_k : C_k -> C_{k+1}`. Homology is read off Smith
//! normal forms. Elimination runs on `i64` with overflow checks and restarts on
//! `BigInt` when an entry would overflow, so results are always exact.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::laurent::bigint_json;

/// Sparse integer matrix stored by rows. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, BigInt>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone().into());
            }
        }
        Ok(m)
    }

    /// Builds a matrix from `(row, col, value)` triples, summing repeats.
    pub fn from_triplets(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for &(r, c, v) in entries {
            let cur = m.get(r, c) + v;
            m.set(r, c, cur);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        assert!(c < self.cols, "column {c} out of range");
        self.data[r].get(&c).unwrap_or(&BigInt::ZERO)
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(c < self.cols, "column {c} out of range");
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    /// Nonzero entries of row `r` in column order.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &BigInt)> {
        self.data[r].iter().map(|(&c, v)| (c, v))
    }

    /// All nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.data.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(&c, v)| (r, c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.data[c].insert(r, v.clone());
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            let acc = &mut out.data[r];
            for (&k, a) in row {
                for (&c, b) in &other.data[k] {
                    *acc.entry(c).or_default() += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
        }
        Ok(out)
    }

    pub fn neg(&self) -> IntMatrix {
        let mut out = self.clone();
        for row in &mut out.data {
            for v in row.values_mut() {
                *v = -&*v;
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hcat row mismatch".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        out.put_block(0, 0, self);
        out.put_block(0, self.cols, other);
        Ok(out)
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &IntMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        for r in 0..block.rows {
            self.data[r0 + r].retain(|&c, _| c < c0 || c >= c0 + block.cols);
        }
        for (r, c, v) in block.entries() {
            self.data[r0 + r].insert(c0 + c, v.clone());
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> IntMatrix {
        let mut out = Self::zeros(rows, cols);
        for r in 0..rows {
            for (&c, v) in self.data[r0 + r].range(c0..c0 + cols) {
                out.data[r].insert(c - c0, v.clone());
            }
        }
        out
    }

    /// Columns `from..` as a new matrix.
    pub fn columns_from(&self, from: usize) -> IntMatrix {
        self.block(0, from, self.rows, self.cols - from)
    }

    pub fn determinant_is_unit(&self) -> bool {
        self.rows == self.cols && {
            let s = smith_normal_form(self);
            s.rank() == self.rows && s.factors.iter().all(One::is_one)
        }
    }

    /// Row-major JSON, for debugging.
    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|r| Value::Array((0..self.cols).map(|c| bigint_json(self.get(r, c))).collect()))
                .collect(),
        )
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} {}", self.rows, self.cols, self.to_json())
    }
}

/// Arithmetic the elimination needs; `None` signals overflow.
trait Scalar: Clone + PartialEq + Send + Sync {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn floor_div(&self, d: &Self) -> Self;
    fn is_multiple_of(&self, d: &Self) -> bool;
    /// `self - q * x`.
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self>;
    fn add_checked(&self, x: &Self) -> Option<Self>;
    fn neg_checked(&self) -> Option<Self>;
    fn is_neg(&self) -> bool;
    fn into_big(self) -> BigInt;
}

impl Scalar for i64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn floor_div(&self, d: &Self) -> Self {
        Integer::div_floor(self, d)
    }
    fn is_multiple_of(&self, d: &Self) -> bool {
        self % d == 0
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*x)?)
    }
    fn add_checked(&self, x: &Self) -> Option<Self> {
        i64::checked_add(*self, *x)
    }
    fn neg_checked(&self) -> Option<Self> {
        i64::checked_neg(*self)
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn into_big(self) -> BigInt {
        BigInt::from(self)
    }
}

impl Scalar for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn floor_div(&self, d: &Self) -> Self {
        Integer::div_floor(self, d)
    }
    fn is_multiple_of(&self, d: &Self) -> bool {
        Zero::is_zero(&(self % d))
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        Some(self - q * x)
    }
    fn add_checked(&self, x: &Self) -> Option<Self> {
        Some(self + x)
    }
    fn neg_checked(&self) -> Option<Self> {
        Some(-self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn into_big(self) -> BigInt {
        self
    }
}

struct Dense<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    fn identity(n: usize) -> Self {
        let mut data = vec![T::nil(); n * n];
        for i in 0..n {
            data[i * n + i] = T::unit();
        }
        Self { rows: n, cols: n, data }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[dst] -= q * row[src]`.
    fn row_sub(&mut self, dst: usize, src: usize, q: &T, cols: &[usize]) -> Option<()> {
        for &c in cols {
            let v = self.at(dst, c).sub_mul(q, self.at(src, c))?;
            self.data[dst * self.cols + c] = v;
        }
        Some(())
    }

    /// `col[dst] -= q * col[src]`.
    fn col_sub(&mut self, dst: usize, src: usize, q: &T, rows: &[usize]) -> Option<()> {
        for &r in rows {
            let v = self.at(r, dst).sub_mul(q, self.at(r, src))?;
            self.data[r * self.cols + dst] = v;
        }
        Some(())
    }

    fn row_add(&mut self, dst: usize, src: usize) -> Option<()> {
        for c in 0..self.cols {
            let v = self.at(dst, c).add_checked(self.at(src, c))?;
            self.data[dst * self.cols + c] = v;
        }
        Some(())
    }

    fn negate_row(&mut self, r: usize) -> Option<()> {
        for c in 0..self.cols {
            let v = self.at(r, c).neg_checked()?;
            self.data[r * self.cols + c] = v;
        }
        Some(())
    }

    fn nonzero_cols_in_row(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| !self.at(r, c).is_nil()).collect()
    }

    fn nonzero_rows_in_col(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| !self.at(r, c).is_nil()).collect()
    }

    fn into_matrix(self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for (i, v) in self.data.into_iter().enumerate() {
            if !v.is_nil() {
                out.data[i / self.cols].insert(i % self.cols, v.into_big());
            }
        }
        out
    }
}

/// Diagonal form of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero invariant factors `d_1 | d_2 | ...`, all positive.
    pub factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|f| !f.is_one()).cloned().collect()
    }
}

/// `P * M * Q = D` with `P`, `Q` unimodular.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub form: SmithForm,
    pub p: IntMatrix,
    pub q: IntMatrix,
    pub d: IntMatrix,
}

struct Elimination<T> {
    m: Dense<T>,
    p: Option<Dense<T>>,
    q: Option<Dense<T>>,
}

impl<T: Scalar> Elimination<T> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        if let Some(p) = &mut self.p {
            p.swap_rows(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.m.swap_cols(a, b);
        if let Some(q) = &mut self.q {
            q.swap_cols(a, b);
        }
    }

    /// Minimal nonzero |entry| in the lower-right block from `t`, stopping at a unit.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for c in t..self.m.cols {
            for r in t..self.m.rows {
                let v = self.m.at(r, c);
                if v.is_nil() {
                    continue;
                }
                if v.is_unit() {
                    return Some((r, c));
                }
                if best.is_none_or(|(br, bc)| v.abs_lt(self.m.at(br, bc))) {
                    best = Some((r, c));
                }
            }
        }
        best
    }

    fn run(&mut self) -> Option<Vec<T>> {
        let (rows, cols) = (self.m.rows, self.m.cols);
        let mut diag = Vec::new();
        let mut t = 0;
        while t < rows.min(cols) {
            let Some((pr, pc)) = self.find_pivot(t) else { break };
            self.swap_rows(t, pr);
            self.swap_cols(t, pc);
            loop {
                let piv = self.m.at(t, t).clone();
                let row_cols: Vec<usize> = self.m.nonzero_cols_in_row(t);
                let mut dirty = false;
                for r in (t + 1..rows).filter(|&r| !self.m.at(r, t).is_nil()).collect::<Vec<_>>() {
                    let q = self.m.at(r, t).floor_div(&piv);
                    self.m.row_sub(r, t, &q, &row_cols)?;
                    if let Some(p) = &mut self.p {
                        let all: Vec<usize> = (0..p.cols).collect();
                        p.row_sub(r, t, &q, &all)?;
                    }
                    dirty |= !self.m.at(r, t).is_nil();
                }
                let col_rows: Vec<usize> = self.m.nonzero_rows_in_col(t);
                for c in (t + 1..cols).filter(|&c| !self.m.at(t, c).is_nil()).collect::<Vec<_>>() {
                    let q = self.m.at(t, c).floor_div(&piv);
                    self.m.col_sub(c, t, &q, &col_rows)?;
                    if let Some(qm) = &mut self.q {
                        let all: Vec<usize> = (0..qm.rows).collect();
                        qm.col_sub(c, t, &q, &all)?;
                    }
                    dirty |= !self.m.at(t, c).is_nil();
                }
                if dirty {
                    // a remainder is now smaller than the pivot; bring it in
                    let mut best = (t, t);
                    for r in t + 1..rows {
                        let v = self.m.at(r, t);
                        if !v.is_nil() && v.abs_lt(self.m.at(best.0, best.1)) {
                            best = (r, t);
                        }
                    }
                    for c in t + 1..cols {
                        let v = self.m.at(t, c);
                        if !v.is_nil() && v.abs_lt(self.m.at(best.0, best.1)) {
                            best = (t, c);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                if piv.is_unit() {
                    break;
                }
                // divisibility: fold a row with a non-multiple into row t
                let bad = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| !self.m.at(r, c).is_multiple_of(&piv)));
                match bad {
                    Some(r) => {
                        self.m.row_add(t, r)?;
                        if let Some(p) = &mut self.p {
                            p.row_add(t, r)?;
                        }
                    }
                    None => break,
                }
            }
            if self.m.at(t, t).is_neg() {
                self.m.negate_row(t)?;
                if let Some(p) = &mut self.p {
                    p.negate_row(t)?;
                }
            }
            diag.push(self.m.at(t, t).clone());
            t += 1;
        }
        Some(diag)
    }
}

fn eliminate<T: Scalar>(m: Dense<T>, transforms: bool) -> Option<(Vec<T>, Elimination<T>)> {
    let (r, c) = (m.rows, m.cols);
    let mut e = Elimination { m, p: transforms.then(|| Dense::identity(r)), q: transforms.then(|| Dense::identity(c)) };
    let diag = e.run()?;
    Some((diag, e))
}

fn dense_i64(m: &IntMatrix) -> Option<Dense<i64>> {
    let mut data = vec![0i64; m.rows * m.cols];
    for (r, c, v) in m.entries() {
        data[r * m.cols + c] = v.to_i64()?;
    }
    Some(Dense { rows: m.rows, cols: m.cols, data })
}

fn dense_big(m: &IntMatrix) -> Dense<BigInt> {
    let mut data = vec![BigInt::zero(); m.rows * m.cols];
    for (r, c, v) in m.entries() {
        data[r * m.cols + c] = v.clone();
    }
    Dense { rows: m.rows, cols: m.cols, data }
}

fn dense_factors(m: &IntMatrix) -> Vec<BigInt> {
    dense_i64(m)
        .and_then(|d| eliminate(d, false))
        .map(|(diag, _)| diag.into_iter().map(BigInt::from).collect())
        .unwrap_or_else(|| eliminate(dense_big(m), false).expect("BigInt never overflows").0)
}

/// Sparse matrix with row and column access, for unit-pivot elimination.
struct UnitEliminator {
    rows: Vec<HashMap<usize, i64>>,
    cols: Vec<HashMap<usize, i64>>,
}

impl UnitEliminator {
    fn new(m: &IntMatrix) -> Option<Self> {
        let mut rows = vec![HashMap::new(); m.rows];
        let mut cols = vec![HashMap::new(); m.cols];
        for (r, c, v) in m.entries() {
            let v = v.to_i64()?;
            rows[r].insert(c, v);
            cols[c].insert(r, v);
        }
        Some(Self { rows, cols })
    }

    fn set(&mut self, r: usize, c: usize, v: i64) {
        if v == 0 {
            self.rows[r].remove(&c);
            self.cols[c].remove(&r);
        } else {
            self.rows[r].insert(c, v);
            self.cols[c].insert(r, v);
        }
    }

    /// Clears row `r` and column `c` through the unit entry `u` at `(r, c)`,
    /// applying the matching Schur complement update to the rest.
    fn pivot(&mut self, r: usize, c: usize, u: i64) -> Option<()> {
        let below: Vec<(usize, i64)> = self.cols[c].iter().filter(|e| *e.0 != r).map(|(&k, &v)| (k, v)).collect();
        let right: Vec<(usize, i64)> = self.rows[r].iter().filter(|e| *e.0 != c).map(|(&k, &v)| (k, v)).collect();
        for &(k, _) in &right {
            self.cols[k].remove(&r);
        }
        self.rows[r].clear();
        for &(k, _) in &below {
            self.rows[k].remove(&c);
        }
        self.cols[c].clear();
        for &(r2, g) in &below {
            let g = g.checked_mul(u)?;
            for &(c2, h) in &right {
                let cur = self.rows[r2].get(&c2).copied().unwrap_or(0);
                let v = cur.checked_sub(g.checked_mul(h)?)?;
                self.set(r2, c2, v);
            }
        }
        Some(())
    }

    /// Eliminates unit pivots, sparsest first. Returns how many were removed.
    fn run(&mut self) -> Option<usize> {
        let mut count = 0;
        loop {
            let mut order: Vec<usize> = (0..self.cols.len()).filter(|&c| !self.cols[c].is_empty()).collect();
            order.sort_by_key(|&c| (self.cols[c].len(), c));
            let mut progress = false;
            for c in order {
                let pick =
                    self.cols[c].iter().filter(|e| e.1.abs() == 1).map(|(&r, &u)| (self.rows[r].len(), r, u)).min();
                if let Some((_, r, u)) = pick {
                    self.pivot(r, c, u)?;
                    count += 1;
                    progress = true;
                }
            }
            if !progress {
                return Some(count);
            }
        }
    }

    /// What is left, with empty rows and columns dropped.
    fn residual(&self) -> IntMatrix {
        let live_rows: Vec<usize> = (0..self.rows.len()).filter(|&r| !self.rows[r].is_empty()).collect();
        let live_cols: Vec<usize> = (0..self.cols.len()).filter(|&c| !self.cols[c].is_empty()).collect();
        let col_pos: HashMap<usize, usize> = live_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut out = IntMatrix::zeros(live_rows.len(), live_cols.len());
        for (i, &r) in live_rows.iter().enumerate() {
            for (&c, &v) in &self.rows[r] {
                out.data[i].insert(col_pos[&c], BigInt::from(v));
            }
        }
        out
    }
}

/// Invariant factors of `m`.
///
/// Unit pivots are cleared first on a sparse copy; each such step is a
/// unimodular change of basis contributing a factor 1. The remainder goes
/// through dense elimination.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let reduced = UnitEliminator::new(m).and_then(|mut e| Some((e.run()?, e.residual())));
    let factors = match reduced {
        Some((units, rest)) => {
            let mut f = vec![BigInt::one(); units];
            f.extend(dense_factors(&rest));
            f
        }
        None => dense_factors(m),
    };
    SmithForm { rows: m.rows, cols: m.cols, factors }
}

/// Invariant factors by dense elimination only.
pub fn smith_normal_form_dense(m: &IntMatrix) -> SmithForm {
    SmithForm { rows: m.rows, cols: m.cols, factors: dense_factors(m) }
}

/// Smith form together with the unimodular transforms.
pub fn smith_decomposition(m: &IntMatrix) -> SmithDecomposition {
    fn finish<T: Scalar>(diag: Vec<T>, e: Elimination<T>, m: &IntMatrix) -> SmithDecomposition {
        let factors: Vec<BigInt> = diag.into_iter().map(Scalar::into_big).collect();
        SmithDecomposition {
            form: SmithForm { rows: m.rows, cols: m.cols, factors },
            p: e.p.expect("tracked").into_matrix(),
            q: e.q.expect("tracked").into_matrix(),
            d: e.m.into_matrix(),
        }
    }
    if let Some((diag, e)) = dense_i64(m).and_then(|d| eliminate(d, true)) {
        return finish(diag, e, m);
    }
    let (diag, e) = eliminate(dense_big(m), true).expect("BigInt never overflows");
    finish(diag, e, m)
}

pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank()
}

/// A basis of the integer kernel, as columns.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let dec = smith_decomposition(m);
    dec.q.columns_from(dec.form.rank())
}

/// Free rank plus torsion invariant factors of one homology group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HomologySummand {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologySummand {
    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Direct sum; torsion multisets are merged and re-sorted.
    pub fn direct_sum(&self, other: &HomologySummand) -> HomologySummand {
        let mut torsion: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        torsion.sort();
        HomologySummand { free_rank: self.free_rank + other.free_rank, torsion }
    }

    /// Dimension over `F_p`: free rank plus torsion factors divisible by `p`.
    pub fn rank_mod(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.free_rank + self.torsion.iter().filter(|t| (*t % &p).is_zero()).count()
    }
}

impl fmt::Display for HomologySummand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", self.free_rank) });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// A bounded cochain complex of free abelian groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeComplex {
    start: i64,
    ranks: Vec<usize>,
    /// `diffs[k]` maps degree `start + k` to `start + k + 1`.
    diffs: Vec<IntMatrix>,
}

impl FreeComplex {
    /// `ranks[k]` is the rank in degree `start + k`; `diffs[k]` is the outgoing
    /// differential of that degree (`ranks.len() - 1` of them). Checks shapes and `d∘d = 0`.
    pub fn new(start: i64, ranks: Vec<usize>, diffs: Vec<IntMatrix>) -> Result<Self> {
        if diffs.len() + 1 != ranks.len().max(1) {
            return Err(Error::Dimension(format!(
                "{} ranks need {} differentials, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.cols != ranks[k] || d.rows != ranks[k + 1] {
                return Err(Error::Dimension(format!(
                    "differential at degree {} is {}x{}, expected {}x{}",
                    start + k as i64,
                    d.rows,
                    d.cols,
                    ranks[k + 1],
                    ranks[k]
                )));
            }
        }
        let c = Self { start, ranks, diffs };
        for k in 0..c.diffs.len().saturating_sub(1) {
            if !c.diffs[k + 1].mul(&c.diffs[k])?.is_zero() {
                return Err(Error::NotAComplex(start + k as i64));
            }
        }
        Ok(c)
    }

    pub fn zero() -> Self {
        Self { start: 0, ranks: Vec::new(), diffs: Vec::new() }
    }

    /// Inclusive degree range with possibly nonzero groups, `None` if empty.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        if self.ranks.is_empty() {
            None
        } else {
            Some((self.start, self.start + self.ranks.len() as i64 - 1))
        }
    }

    pub fn rank(&self, k: i64) -> usize {
        let i = k - self.start;
        if i < 0 || i >= self.ranks.len() as i64 {
            0
        } else {
            self.ranks[i as usize]
        }
    }

    /// `d_k : C_k -> C_{k+1}`, zero outside the stored range.
    pub fn differential(&self, k: i64) -> IntMatrix {
        let i = k - self.start;
        if i >= 0 && (i as usize) < self.diffs.len() {
            self.diffs[i as usize].clone()
        } else {
            IntMatrix::zeros(self.rank(k + 1), self.rank(k))
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| if (self.start + i as i64).rem_euclid(2) == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }

    /// Reindexes so that old degree `k` becomes `k + by`.
    pub fn shifted(&self, by: i64) -> Self {
        Self { start: self.start + by, ..self.clone() }
    }

    /// Degreewise direct sum.
    pub fn direct_sum(&self, other: &FreeComplex) -> FreeComplex {
        let (lo, hi) = span(&[self, other]);
        let mut ranks = Vec::new();
        let mut diffs = Vec::new();
        for k in lo..=hi {
            ranks.push(self.rank(k) + other.rank(k));
            if k < hi {
                let a = self.differential(k);
                let b = other.differential(k);
                let mut m = IntMatrix::zeros(a.rows + b.rows, a.cols + b.cols);
                m.put_block(0, 0, &a);
                m.put_block(a.rows, a.cols, &b);
                diffs.push(m);
            }
        }
        if ranks.is_empty() {
            return FreeComplex::zero();
        }
        FreeComplex { start: lo, ranks, diffs }
    }
}

fn span(cs: &[&FreeComplex]) -> (i64, i64) {
    let ranges: Vec<(i64, i64)> = cs.iter().filter_map(|c| c.degree_range()).collect();
    if ranges.is_empty() {
        return (0, -1);
    }
    (ranges.iter().map(|r| r.0).min().unwrap(), ranges.iter().map(|r| r.1).max().unwrap())
}

/// Homology in every degree of the stored range (zero groups included).
pub fn homology(c: &FreeComplex) -> BTreeMap<i64, HomologySummand> {
    let Some((lo, hi)) = c.degree_range() else {
        return BTreeMap::new();
    };
    // Smith forms of d_{lo-1} .. d_hi; the boundary ones are empty
    let forms: Vec<SmithForm> =
        (lo - 1..=hi).collect::<Vec<_>>().par_iter().map(|&k| smith_normal_form(&c.differential(k))).collect();
    (lo..=hi)
        .map(|k| {
            let incoming = &forms[(k - lo) as usize];
            let outgoing = &forms[(k - lo + 1) as usize];
            let free = c.rank(k) - outgoing.rank() - incoming.rank();
            (k, HomologySummand { free_rank: free, torsion: incoming.torsion() })
        })
        .collect()
}

/// A degree-preserving map of complexes `C -> C'`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: FreeComplex,
    pub target: FreeComplex,
    maps: BTreeMap<i64, IntMatrix>,
}

impl ChainMap {
    /// `maps[k] : C_k -> C'_k`; missing degrees are zero. Checks `f d = d' f`.
    pub fn new(source: FreeComplex, target: FreeComplex, maps: BTreeMap<i64, IntMatrix>) -> Result<Self> {
        let f = Self { source, target, maps };
        let (lo, hi) = span(&[&f.source, &f.target]);
        for k in lo..=hi {
            let m = f.at(k);
            if m.rows != f.target.rank(k) || m.cols != f.source.rank(k) {
                return Err(Error::Dimension(format!("chain map at degree {k}")));
            }
        }
        for k in lo..hi {
            let lhs = f.at(k + 1).mul(&f.source.differential(k))?;
            let rhs = f.target.differential(k).mul(&f.at(k))?;
            if lhs != rhs {
                return Err(Error::NotAChainMap(k));
            }
        }
        Ok(f)
    }

    pub fn identity(c: &FreeComplex) -> Self {
        let maps = c
            .degree_range()
            .map(|(lo, hi)| (lo..=hi).map(|k| (k, IntMatrix::identity(c.rank(k)))).collect())
            .unwrap_or_default();
        Self { source: c.clone(), target: c.clone(), maps }
    }

    pub fn zero(source: &FreeComplex, target: &FreeComplex) -> Self {
        Self { source: source.clone(), target: target.clone(), maps: BTreeMap::new() }
    }

    pub fn at(&self, k: i64) -> IntMatrix {
        self.maps.get(&k).cloned().unwrap_or_else(|| IntMatrix::zeros(self.target.rank(k), self.source.rank(k)))
    }
}

/// `Cone(f)_k = C_{k+1} ⊕ C'_k` with `d(a, b) = (-d a, f a + d' b)`.
pub fn mapping_cone(f: &ChainMap) -> Result<FreeComplex> {
    let (src, tgt) = (&f.source, &f.target);
    let (lo, hi) = span(&[&src.shifted(-1), tgt]);
    if lo > hi {
        return Ok(FreeComplex::zero());
    }
    let rank = |k: i64| src.rank(k + 1) + tgt.rank(k);
    let mut ranks = Vec::new();
    let mut diffs = Vec::new();
    for k in lo..=hi {
        ranks.push(rank(k));
        if k < hi {
            let mut m = IntMatrix::zeros(rank(k + 1), rank(k));
            let da = src.differential(k + 1).neg();
            m.put_block(0, 0, &da);
            m.put_block(src.rank(k + 2), 0, &f.at(k + 1));
            m.put_block(src.rank(k + 2), src.rank(k + 1), &tgt.differential(k));
            diffs.push(m);
        }
    }
    FreeComplex::new(lo, ranks, diffs)
}

/// Ranks over `Q` in the long exact sequence of `0 -> C' -> Cone(f) -> C[1] -> 0`:
///
/// `... -> H^k(C') -ι-> H^k(Cone) -π-> H^{k+1}(C) -δ-> H^{k+1}(C') -> ...`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesDegree {
    pub degree: i64,
    pub dim_target: usize,
    pub dim_cone: usize,
    pub dim_source_next: usize,
    pub rank_iota: usize,
    pub rank_pi: usize,
    /// Rank of the connecting map `H^{k+1}(C) -> H^{k+1}(C')`.
    pub rank_delta_next: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesReport {
    pub degrees: Vec<LesDegree>,
    pub exact: bool,
}

/// Rank over `Q` of the map `H^k(X) -> H^k(Y)` induced by `f_k`.
///
/// Uses `rank [[d_X, 0], [f, d_Y]] - rank d_X - rank d_Y`, where `d_X` leaves
/// degree `k` and `d_Y` enters it.
fn induced_rank(f_k: &IntMatrix, dx_k: &IntMatrix, dy_prev: &IntMatrix) -> Result<usize> {
    if f_k.rows != dy_prev.rows || f_k.cols != dx_k.cols {
        return Err(Error::Dimension("induced map shape".into()));
    }
    let mut m = IntMatrix::zeros(dx_k.rows + f_k.rows, dx_k.cols + dy_prev.cols);
    m.put_block(0, 0, dx_k);
    m.put_block(dx_k.rows, 0, f_k);
    m.put_block(dx_k.rows, dx_k.cols, dy_prev);
    Ok(rank(&m) - rank(dx_k) - rank(dy_prev))
}

fn dims_q(c: &FreeComplex, k: i64) -> usize {
    c.rank(k) - rank(&c.differential(k)) - rank(&c.differential(k - 1))
}

/// Computes every map of the long exact sequence of a mapping cone over `Q`
/// and checks exactness at every group.
pub fn long_exact_sequence(f: &ChainMap) -> Result<LesReport> {
    let cone = mapping_cone(f)?;
    let (src, tgt) = (&f.source, &f.target);
    let (lo, hi) = span(&[&src.shifted(-1), tgt, &cone]);
    let mut degrees = Vec::new();
    for k in lo - 1..=hi + 1 {
        let (a_next, b) = (src.rank(k + 1), tgt.rank(k));
        let cone_d = cone.differential(k);
        let cone_prev = cone.differential(k - 1);

        // ι: C'_k -> Cone_k is the inclusion of the second summand
        let mut iota = IntMatrix::zeros(cone.rank(k), b);
        for i in 0..b {
            iota.set(a_next + i, i, BigInt::one());
        }
        let rank_iota = induced_rank(&iota, &tgt.differential(k), &cone_prev)?;

        // π: Cone_k -> C_{k+1}, projection onto the first summand (C shifted by one)
        let mut pi = IntMatrix::zeros(a_next, cone.rank(k));
        for i in 0..a_next {
            pi.set(i, i, BigInt::one());
        }
        let rank_pi = induced_rank(&pi, &cone_d, &src.differential(k).neg())?;

        // δ: lift a cycle of C_{k+1} to (a, 0) in Cone_k, apply the cone
        // differential and read off the C'_{k+1} component
        let a_next2 = src.rank(k + 2);
        let lift_d = cone_d.block(a_next2, 0, tgt.rank(k + 1), a_next);
        let rank_delta_next = induced_rank(&lift_d, &src.differential(k + 1), &tgt.differential(k))?;

        degrees.push(LesDegree {
            degree: k,
            dim_target: dims_q(tgt, k),
            dim_cone: dims_q(&cone, k),
            dim_source_next: dims_q(src, k + 1),
            rank_iota,
            rank_pi,
            rank_delta_next,
        });
    }
    // exactness: image rank = kernel rank at every group
    let mut exact = true;
    for (n, d) in degrees.iter().enumerate() {
        exact &= d.rank_iota + d.rank_pi == d.dim_cone;
        exact &= d.rank_pi + d.rank_delta_next == d.dim_source_next;
        if let Some(next) = degrees.get(n + 1) {
            exact &= d.rank_delta_next + next.rank_iota == next.dim_target;
        }
    }
    if let Some(first) = degrees.first() {
        // nothing maps into the first target group except δ from below, which is zero there
        exact &= first.rank_iota == first.dim_target;
    }
    Ok(LesReport { degrees, exact })
}

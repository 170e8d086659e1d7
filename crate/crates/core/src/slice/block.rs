use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub type RationalMatrix = Vec<Vec<BigRational>>;
pub type Block = [[BigRational; 2]; 2];

/// Blocks `A_1 .. A_m` of a member of the slice, with `tr A_1 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceMatrix {
    blocks: Vec<Block>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl SliceMatrix {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        let first = blocks.first().ok_or_else(|| Error::Dimension("at least one block is required".into()))?;
        let trace = &first[0][0] + &first[1][1];
        if !trace.is_zero() {
            return Err(Error::TraceNonZero(trace.to_string()));
        }
        Ok(Self { blocks })
    }

    /// All blocks zero.
    pub fn zero(m: usize) -> Self {
        let z = || [[BigRational::zero(), BigRational::zero()], [BigRational::zero(), BigRational::zero()]];
        Self { blocks: (0..m.max(1)).map(|_| z()).collect() }
    }

    /// Random small rationals, numerators in `-5..=5` and denominators in `1..=4`.
    pub fn random(m: usize, rng: &mut impl Rng) -> Self {
        let mut r = || BigRational::new(BigInt::from(rng.gen_range(-5..=5)), BigInt::from(rng.gen_range(1..=4)));
        let mut blocks: Vec<Block> = (0..m.max(1)).map(|_| [[r(), r()], [r(), r()]]).collect();
        blocks[0][1][1] = -blocks[0][0][0].clone();
        Self { blocks }
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }
}

/// The `2m x 2m` matrix with `A_1 .. A_m` down the first block column and
/// identity blocks on the block superdiagonal.
pub fn assemble(s: &SliceMatrix) -> RationalMatrix {
    let m = s.m();
    let mut out = vec![vec![BigRational::zero(); 2 * m]; 2 * m];
    for (k, a) in s.blocks.iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                out[2 * k + r][c] = a[r][c].clone();
            }
        }
        if k + 1 < m {
            out[2 * k][2 * k + 2] = rat(1);
            out[2 * k + 1][2 * k + 3] = rat(1);
        }
    }
    out
}

fn mat_mul(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let n = a.len();
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// Coefficients of `det(λI - a)`, constant term first.
pub fn charpoly(a: &RationalMatrix) -> Vec<BigRational> {
    let n = a.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = rat(1);
    let mut acc = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // acc <- a * acc + c_{n-k+1} I, then c_{n-k} = -tr(a * acc) / k
        let mut next = mat_mul(a, &acc);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        acc = next;
        let prod = mat_mul(a, &acc);
        let trace: BigRational = (0..n).map(|i| prod[i][i].clone()).sum();
        coeffs[n - k] = -trace / rat(k as i64);
    }
    coeffs
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Coefficients of `det(λ^m I_2 - A_1 λ^{m-1} - ... - A_m)`, constant term first.
pub fn block_polynomial_det(s: &SliceMatrix) -> Vec<BigRational> {
    let m = s.m();
    // entry (r, c) as a polynomial in λ
    let entry = |r: usize, c: usize| -> Vec<BigRational> {
        let mut p = vec![BigRational::zero(); m + 1];
        if r == c {
            p[m] = BigRational::one();
        }
        for (k, a) in s.blocks.iter().enumerate() {
            p[m - 1 - k] -= &a[r][c];
        }
        p
    };
    poly_sub(&poly_mul(&entry(0, 0), &entry(1, 1)), &poly_mul(&entry(0, 1), &entry(1, 0)))
}

/// Both sides of the identity, compared coefficientwise in exact arithmetic.
pub fn charpoly_identity_check(s: &SliceMatrix) -> bool {
    trim(charpoly(&assemble(s))) == block_polynomial_det(s)
}

//! Horizontal lifts and parallel transport for `p : C^n -> C`.
//!
//! The gradient of a holomorphic `p` is taken as the vector of conjugated
//! partial derivatives, so `V^hor = V conj(∂p) / |∂p|^2` satisfies
//! `dp_x(V^hor) = V` exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Gradients smaller than this (relative to `|x|^(deg - 1)`) count as critical.
pub const CRITICAL_THRESHOLD: f64 = 1e-9;
const FIBRE_TOLERANCE: f64 = 1e-8;
const MIN_STEP: f64 = 1e-12;

/// A polynomial in `n` complex variables with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    vars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
    floats: Vec<(Vec<u32>, f64)>,
}

impl Polynomial {
    pub fn new(vars: usize, terms: Vec<(Vec<u32>, BigRational)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != vars {
                return Err(Error::Dimension(format!("monomial has {} exponents, expected {vars}", e.len())));
            }
            *map.entry(e).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self::from_map(vars, map))
    }

    fn from_map(vars: usize, terms: BTreeMap<Vec<u32>, BigRational>) -> Self {
        let floats = terms.iter().map(|(e, c)| (e.clone(), c.to_f64().unwrap_or(f64::NAN))).collect();
        Self { vars, terms, floats }
    }

    /// `z_1^2 + ... + z_n^2`.
    pub fn sum_of_squares(n: usize) -> Self {
        let terms = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 2;
                (e, BigRational::from_integer(1.into()))
            })
            .collect();
        Self::new(n, terms).expect("shapes agree")
    }

    /// The determinant of a `3 x 3` matrix, variables in row-major order.
    pub fn det3() -> Self {
        let perms: [([usize; 3], i64); 6] =
            [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)];
        let terms = perms
            .iter()
            .map(|(p, s)| {
                let mut e = vec![0; 9];
                for (row, &col) in p.iter().enumerate() {
                    e[3 * row + col] = 1;
                }
                (e, BigRational::from_integer((*s).into()))
            })
            .collect();
        Self::new(9, terms).expect("shapes agree")
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Common total degree of all monomials; `None` if they differ.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degrees.next().unwrap_or(0);
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn add_constant(&self, c: BigRational) -> Self {
        let mut terms = self.terms.clone();
        *terms.entry(vec![0; self.vars]).or_insert_with(BigRational::zero) += c;
        terms.retain(|_, c| !c.is_zero());
        Self::from_map(self.vars, terms)
    }

    pub fn partial(&self, i: usize) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                terms.insert(e2, c * BigRational::from_integer(BigInt::from(e[i])));
            }
        }
        Self::from_map(self.vars, terms)
    }

    pub fn eval_rational(&self, x: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.floats.iter().map(|(e, c)| monomial(x, e) * c).sum()
    }

    /// Holomorphic partial derivatives `∂p/∂z_i` at `x`.
    pub fn gradient(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut g = vec![Complex64::zero(); self.vars];
        for (e, c) in &self.floats {
            for i in 0..self.vars {
                if e[i] == 0 {
                    continue;
                }
                let mut term = Complex64::new(*c * e[i] as f64, 0.0);
                for (j, (&xj, &k)) in x.iter().zip(e).enumerate() {
                    let k = if j == i { k - 1 } else { k };
                    term *= xj.powu(k);
                }
                g[i] += term;
            }
        }
        g
    }
}

fn monomial(x: &[Complex64], e: &[u32]) -> Complex64 {
    x.iter().zip(e).map(|(xi, &k)| xi.powu(k)).product()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `dp_x(x) = deg(p) p(x)` in exact arithmetic.
pub fn euler_identity_check(p: &Polynomial, x: &[BigRational]) -> Result<bool> {
    let deg = p.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    check_arity(p, x.len())?;
    let lhs: BigRational = (0..p.vars).map(|i| &x[i] * p.partial(i).eval_rational(x)).sum();
    Ok(lhs == p.eval_rational(x) * BigRational::from_integer(BigInt::from(deg)))
}

/// `dp_x(x) = deg(p) p(x)` in floating point, to `1e-12` relative.
pub fn euler_identity_check_complex(p: &Polynomial, x: &[Complex64]) -> Result<bool> {
    let deg = p.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    check_arity(p, x.len())?;
    let g = p.gradient(x);
    let lhs: Complex64 = g.iter().zip(x).map(|(gi, xi)| gi * xi).sum();
    let rhs = p.eval(x) * deg as f64;
    let scale: f64 =
        g.iter().zip(x).map(|(gi, xi)| (gi * xi).norm()).sum::<f64>().max(rhs.norm()).max(f64::MIN_POSITIVE);
    Ok((lhs - rhs).norm() <= 1e-12 * scale)
}

fn check_arity(p: &Polynomial, n: usize) -> Result<()> {
    if n != p.vars {
        return Err(Error::Dimension(format!("point has {n} coordinates, polynomial has {} variables", p.vars)));
    }
    Ok(())
}

/// `V conj(∂p) / |∂p|^2`.
pub fn horizontal_lift(p: &Polynomial, x: &[Complex64], v: Complex64) -> Result<Vec<Complex64>> {
    check_arity(p, x.len())?;
    let g = p.gradient(x);
    let size = norm(&g);
    let scale = norm(x).max(1.0).powi(p.max_degree().saturating_sub(1) as i32);
    if size <= CRITICAL_THRESHOLD * scale {
        return Err(Error::CriticalPoint(size));
    }
    let g2 = size * size;
    Ok(g.iter().map(|gi| v * gi.conj() / g2).collect())
}

/// `|V| |x| / (deg(p) |p(x)|)` for homogeneous `p` of positive degree with `p(x) != 0`.
pub fn lift_norm_bound(p: &Polynomial, x: &[Complex64], v: Complex64) -> Result<Option<f64>> {
    let deg = p.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    let px = p.eval(x).norm();
    if deg == 0 || px == 0.0 {
        return Ok(None);
    }
    Ok(Some(v.norm() * norm(x) / (deg as f64 * px)))
}

#[derive(Clone, Debug, PartialEq)]
enum PathKind {
    Polyline(Vec<Complex64>),
    Circle { center: Complex64, radius: f64, start_angle: f64, turns: f64 },
}

/// A piecewise smooth curve in `C`, parametrized by `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    kind: PathKind,
    reversed: bool,
}

impl Path {
    /// Straight segments through the waypoints, each taking equal parameter time.
    pub fn polyline(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Configuration("a path needs at least one waypoint".into()));
        }
        Ok(Self { kind: PathKind::Polyline(points), reversed: false })
    }

    pub fn circle(center: Complex64, radius: f64, start_angle: f64, turns: f64) -> Self {
        Self { kind: PathKind::Circle { center, radius, start_angle, turns }, reversed: false }
    }

    /// Waypoints as `[[re, im], ...]`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::Parse("path must be a list of [re, im] pairs".into());
        let items = v.as_array().ok_or_else(bad)?;
        let mut points = Vec::with_capacity(items.len());
        for item in items {
            let pair = item.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let re = pair[0].as_f64().ok_or_else(bad)?;
            let im = pair[1].as_f64().ok_or_else(bad)?;
            points.push(Complex64::new(re, im));
        }
        Self::polyline(points)
    }

    pub fn reversed(&self) -> Self {
        Self { kind: self.kind.clone(), reversed: !self.reversed }
    }

    fn pieces(&self) -> usize {
        match &self.kind {
            PathKind::Polyline(p) => p.len().saturating_sub(1).max(1),
            PathKind::Circle { .. } => 1,
        }
    }

    fn raw_point(&self, s: f64) -> Complex64 {
        match &self.kind {
            PathKind::Polyline(p) if p.len() == 1 => p[0],
            PathKind::Polyline(p) => {
                let n = p.len() - 1;
                let k = ((s * n as f64).floor() as usize).min(n - 1);
                let local = s * n as f64 - k as f64;
                p[k] + (p[k + 1] - p[k]) * local
            }
            PathKind::Circle { center, radius, start_angle, turns } => {
                center + Complex64::from_polar(*radius, start_angle + std::f64::consts::TAU * turns * s)
            }
        }
    }

    fn raw_velocity(&self, s: f64, piece: usize) -> Complex64 {
        match &self.kind {
            PathKind::Polyline(p) if p.len() == 1 => Complex64::zero(),
            PathKind::Polyline(p) => {
                let n = p.len() - 1;
                (p[piece + 1] - p[piece]) * n as f64
            }
            PathKind::Circle { radius, start_angle, turns, .. } => {
                let w = std::f64::consts::TAU * turns;
                Complex64::i() * w * Complex64::from_polar(*radius, start_angle + w * s)
            }
        }
    }

    pub fn point(&self, s: f64) -> Complex64 {
        self.raw_point(if self.reversed { 1.0 - s } else { s })
    }

    fn velocity(&self, s: f64, piece: usize) -> Complex64 {
        let n = self.pieces();
        if self.reversed {
            -self.raw_velocity(1.0 - s, n - 1 - piece)
        } else {
            self.raw_velocity(s, piece)
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }
}

/// How to integrate the horizontal-lift field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integrator {
    /// Classical fourth-order Runge–Kutta with a fixed number of steps per smooth piece.
    Rk4 { steps: usize },
    /// Adaptive Dormand–Prince 5(4) with the given relative and absolute tolerance.
    DormandPrince { tolerance: f64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::DormandPrince { tolerance: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportResult {
    pub endpoint: Vec<Complex64>,
    /// `|p(endpoint) - path end|`.
    pub fibre_error: f64,
    pub steps: usize,
}

type Field<'a> = dyn Fn(f64, &[Complex64]) -> Result<Vec<Complex64>> + 'a;

fn axpy(x: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) -> Vec<Complex64> {
    let mut out = x.to_vec();
    for (c, k) in terms {
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ki * (h * c);
        }
    }
    out
}

fn rk4(f: &Field, s0: f64, s1: f64, x: Vec<Complex64>, steps: usize) -> Result<(Vec<Complex64>, usize)> {
    let steps = steps.max(1);
    let h = (s1 - s0) / steps as f64;
    let mut x = x;
    for n in 0..steps {
        let s = s0 + n as f64 * h;
        let k1 = f(s, &x)?;
        let k2 = f(s + h / 2.0, &axpy(&x, h, &[(0.5, &k1)]))?;
        let k3 = f(s + h / 2.0, &axpy(&x, h, &[(0.5, &k2)]))?;
        let k4 = f(s + h, &axpy(&x, h, &[(1.0, &k3)]))?;
        x = axpy(&x, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]);
    }
    Ok((x, steps))
}

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [&[f64]; 7] = [
    &[],
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn dormand_prince(f: &Field, s0: f64, s1: f64, x: Vec<Complex64>, tol: f64) -> Result<(Vec<Complex64>, usize)> {
    let mut x = x;
    let mut s = s0;
    let mut h = (s1 - s0) / 16.0;
    let mut accepted = 0;
    let mut k1 = f(s, &x)?;
    while s < s1 {
        if h < MIN_STEP {
            return Err(Error::StepUnderflow(s));
        }
        h = h.min(s1 - s);
        let mut k: Vec<Vec<Complex64>> = vec![k1.clone()];
        for stage in 1..7 {
            let terms: Vec<(f64, &[Complex64])> =
                DP_A[stage].iter().zip(&k).map(|(&a, ki)| (a, ki.as_slice())).collect();
            let xs = axpy(&x, h, &terms);
            k.push(f(s + DP_C[stage] * h, &xs)?);
        }
        let fifth: Vec<(f64, &[Complex64])> = DP_A[6].iter().zip(&k).map(|(&a, ki)| (a, ki.as_slice())).collect();
        let x_new = axpy(&x, h, &fifth);
        let mut err = 0.0f64;
        for i in 0..x.len() {
            let mut e = Complex64::zero();
            for (stage, ks) in k.iter().enumerate() {
                let b5 = DP_A[6].get(stage).copied().unwrap_or(0.0);
                e += ks[i] * (h * (b5 - DP_B4[stage]));
            }
            let sc = tol + tol * x[i].norm().max(x_new[i].norm());
            err = err.max(e.norm() / sc);
        }
        if err <= 1.0 {
            s += h;
            x = x_new;
            k1 = k.pop().expect("seven stages");
            accepted += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok((x, accepted))
}

/// Transports `x0` from the fibre over `path(0)` to the fibre over `path(1)`.
pub fn parallel_transport(
    p: &Polynomial,
    x0: &[Complex64],
    path: &Path,
    integrator: Integrator,
) -> Result<TransportResult> {
    check_arity(p, x0.len())?;
    let scale = path.start().norm().max(1.0);
    let off = (p.eval(x0) - path.start()).norm();
    if off > FIBRE_TOLERANCE * scale {
        return Err(Error::OffFibre(off));
    }
    let pieces = path.pieces();
    let mut x = x0.to_vec();
    let mut steps = 0;
    for piece in 0..pieces {
        let (s0, s1) = (piece as f64 / pieces as f64, (piece + 1) as f64 / pieces as f64);
        let field = |s: f64, y: &[Complex64]| horizontal_lift(p, y, path.velocity(s, piece));
        let (y, n) = match integrator {
            Integrator::Rk4 { steps } => rk4(&field, s0, s1, x, steps)?,
            Integrator::DormandPrince { tolerance } => dormand_prince(&field, s0, s1, x, tolerance)?,
        };
        x = y;
        steps += n;
    }
    let fibre_error = (p.eval(&x) - path.end()).norm();
    Ok(TransportResult { endpoint: x, fibre_error, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn euler_identity_examples() {
        let p = Polynomial::sum_of_squares(3);
        assert!(euler_identity_check(&p, &[q(1, 2), q(-3, 1), q(2, 7)]).unwrap());
        let det = Polynomial::det3();
        let x: Vec<BigRational> = (1..=9).map(|k| q(k * k - 7, k)).collect();
        assert!(euler_identity_check(&det, &x).unwrap());
        let bent = p.add_constant(q(1, 1));
        assert_eq!(euler_identity_check(&bent, &[q(1, 1), q(0, 1), q(0, 1)]), Err(Error::NotHomogeneous));
        assert!(euler_identity_check_complex(&det, &[c(1.0, 2.0); 9]).unwrap());
    }

    /// Oracle: the determinant by cofactor expansion.
    #[test]
    fn det3_matches_cofactor_expansion() {
        let x: Vec<BigRational> = (0..9).map(|k| q(3 * k - 11, k + 2)).collect();
        let a = |r: usize, col: usize| x[3 * r + col].clone();
        let cof = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        assert_eq!(Polynomial::det3().eval_rational(&x), cof);
    }

    #[test]
    fn one_variable_lift() {
        let p = Polynomial::new(1, vec![(vec![2], q(1, 1))]).unwrap();
        let lift = horizontal_lift(&p, &[c(1.0, 0.0)], c(1.0, 0.0)).unwrap();
        assert!((lift[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(lift_norm_bound(&p, &[c(1.0, 0.0)], c(1.0, 0.0)).unwrap(), Some(0.5));
        assert!(matches!(horizontal_lift(&p, &[c(1e-12, 0.0)], c(1.0, 0.0)), Err(Error::CriticalPoint(_))));
    }

    #[test]
    fn lift_contract_on_samples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in [Polynomial::sum_of_squares(2), Polynomial::sum_of_squares(3), Polynomial::det3()] {
            for _ in 0..200 {
                let x: Vec<Complex64> =
                    (0..p.vars()).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
                let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let lift = horizontal_lift(&p, &x, v).unwrap();
                let image: Complex64 = p.gradient(&x).iter().zip(&lift).map(|(g, l)| g * l).sum();
                assert!((image - v).norm() <= 1e-10 * v.norm());
                let bound = lift_norm_bound(&p, &x, v).unwrap().unwrap();
                assert!(norm(&lift) <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn transport_basics() {
        let p = Polynomial::sum_of_squares(2);
        let x0 = [c(0.6, 0.0), c(0.8, 0.0)];
        let still = Path::polyline(vec![c(1.0, 0.0)]).unwrap();
        let r = parallel_transport(&p, &x0, &still, Integrator::default()).unwrap();
        assert_eq!(r.endpoint, x0.to_vec());

        let lap = Path::circle(c(0.0, 0.0), 1.0, 0.0, 1.0);
        let dp = parallel_transport(&p, &x0, &lap, Integrator::default()).unwrap();
        let rk = parallel_transport(&p, &x0, &lap, Integrator::Rk4 { steps: 4000 }).unwrap();
        assert!(dp.fibre_error < 1e-8);
        for i in 0..2 {
            assert!((dp.endpoint[i] - rk.endpoint[i]).norm() < 1e-9);
            assert!((dp.endpoint[i] + x0[i]).norm() < 1e-8);
        }
        let back = parallel_transport(&p, &dp.endpoint, &lap.reversed(), Integrator::default()).unwrap();
        assert!(back.endpoint.iter().zip(&x0).all(|(a, b)| (a - b).norm() < 1e-6));

        let off = [c(1.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(parallel_transport(&p, &off, &lap, Integrator::default()), Err(Error::OffFibre(_))));
    }

    #[test]
    fn polyline_from_json() {
        let path = Path::from_json(&serde_json::json!([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])).unwrap();
        assert_eq!(path.point(0.5), c(0.0, 1.0));
        assert_eq!(path.reversed().start(), c(-1.0, 0.0));
        assert!(Path::from_json(&serde_json::json!([[1.0]])).is_err());
    }
}

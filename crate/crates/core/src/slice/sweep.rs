//! Seeded randomized sweeps over the slice checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::block::{charpoly_identity_check, SliceMatrix};
use super::fibration::{horizontal_lift, lift_norm_bound, parallel_transport, Integrator, Path, Polynomial};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharpolySweep {
    pub m: usize,
    pub trials: usize,
    pub failures: usize,
}

impl CharpolySweep {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub fn charpoly_sweep(m: usize, trials: usize, seed: u64) -> CharpolySweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (m as u64) << 32);
    let failures = (0..trials).filter(|_| !charpoly_identity_check(&SliceMatrix::random(m, &mut rng))).count();
    CharpolySweep { m, trials, failures }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftSweep {
    pub samples: usize,
    /// Largest `|dp(V^hor) - V| / |V|`.
    pub max_relative_error: f64,
    pub bound_violations: usize,
}

impl LiftSweep {
    pub fn passed(&self) -> bool {
        self.max_relative_error <= 1e-10 && self.bound_violations == 0
    }
}

fn random_point(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect()
}

/// Samples points and tangent vectors uniformly from boxes.
pub fn lift_sweep(p: &Polynomial, samples: usize, seed: u64) -> Result<LiftSweep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = LiftSweep { samples, max_relative_error: 0.0, bound_violations: 0 };
    for _ in 0..samples {
        let x = random_point(&mut rng, p.vars());
        let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let lift = horizontal_lift(p, &x, v)?;
        let image: Complex64 = p.gradient(&x).iter().zip(&lift).map(|(g, l)| g * l).sum();
        out.max_relative_error = out.max_relative_error.max((image - v).norm() / v.norm());
        if let Some(bound) = lift_norm_bound(p, &x, v)? {
            let size = lift.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if size > bound * (1.0 + 1e-12) {
                out.bound_violations += 1;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportStudy {
    /// Distance back to the start after a loop and its reverse.
    pub return_error: f64,
    /// `(steps, fibre drift)` for fixed-step RK4 under step doubling, over half a turn.
    pub drift: Vec<(usize, f64)>,
    /// Least-squares slope of `-log drift` against `log steps`.
    pub order_slope: f64,
    pub nominal_order: f64,
    /// Endpoint difference between the adaptive integrator and a fine RK4 run.
    pub integrator_gap: f64,
    pub adaptive_fibre_error: f64,
}

impl TransportStudy {
    pub fn passed(&self) -> bool {
        self.return_error <= 1e-6
            && (self.order_slope - self.nominal_order).abs() <= 0.2 * self.nominal_order
            && self.integrator_gap <= 1e-8
            && self.adaptive_fibre_error <= 1e-8
    }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Transport of `z_1^2 + z_2^2` around the unit circle, from a random point of
/// the fibre over 1. Drift is measured over half a turn: over a closed loop the
/// leading error terms largely cancel and the endpoint drift no longer scales
/// cleanly with the step.
pub fn transport_study(seed: u64) -> Result<TransportStudy> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = Polynomial::sum_of_squares(2);
    let z1 = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
    let x0 = vec![z1, (Complex64::new(1.0, 0.0) - z1 * z1).sqrt()];
    let lap = Path::circle(Complex64::new(0.0, 0.0), 1.0, 0.0, 1.0);

    let there = parallel_transport(&p, &x0, &lap, Integrator::default())?;
    let back = parallel_transport(&p, &there.endpoint, &lap.reversed(), Integrator::default())?;
    let return_error = distance(&back.endpoint, &x0);

    let mut drift = Vec::new();
    let half = Path::circle(Complex64::new(0.0, 0.0), 1.0, 0.0, 0.5);
    for steps in [8, 16, 32, 64] {
        let r = parallel_transport(&p, &x0, &half, Integrator::Rk4 { steps })?;
        drift.push((steps, r.fibre_error));
    }
    let logs: Vec<(f64, f64)> = drift.iter().map(|&(n, e)| ((n as f64).ln(), -e.ln())).collect();
    let fine = parallel_transport(&p, &x0, &lap, Integrator::Rk4 { steps: 4000 })?;
    Ok(TransportStudy {
        return_error,
        drift,
        order_slope: slope(&logs),
        nominal_order: 4.0,
        integrator_gap: distance(&there.endpoint, &fine.endpoint),
        adaptive_fibre_error: there.fibre_error,
    })
}

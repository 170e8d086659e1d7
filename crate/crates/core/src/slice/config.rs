use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative separation below which two eigenvalues count as equal.
pub const SEPARATION_TOLERANCE: f64 = 1e-9;

/// Pairwise distinct complex numbers summing to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenConfiguration {
    points: Vec<Complex64>,
}

impl EigenConfiguration {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Configuration("no points".into()));
        }
        let diameter = diameter(&points);
        let scale = diameter.max(f64::MIN_POSITIVE);
        let sum: Complex64 = points.iter().sum();
        if sum.norm() > SEPARATION_TOLERANCE * scale.max(1.0) {
            return Err(Error::Configuration(format!("sum is {sum}, expected 0")));
        }
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                if (a - b).norm() <= SEPARATION_TOLERANCE * diameter {
                    return Err(Error::Configuration(format!("{a} and {b} are not separated")));
                }
            }
        }
        Ok(Self { points })
    }

    /// Subtracts the mean first.
    pub fn balanced(points: Vec<Complex64>) -> Result<Self> {
        let mean = points.iter().sum::<Complex64>() / points.len().max(1) as f64;
        Self::new(points.into_iter().map(|p| p - mean).collect())
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.points)
    }

    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }
}

fn diameter(points: &[Complex64]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation() {
        let ok = EigenConfiguration::new(vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(ok.diameter(), 2.0);
        assert!(EigenConfiguration::new(vec![c(1.0, 0.0), c(0.5, 0.0)]).is_err());
        assert!(EigenConfiguration::new(vec![c(1.0, 0.0), c(1.0, 1e-12), c(-2.0, 0.0)]).is_err());
        let b = EigenConfiguration::balanced(vec![c(3.0, 1.0), c(5.0, 1.0), c(4.0, 4.0)]).unwrap();
        assert!(b.points().iter().sum::<Complex64>().norm() < 1e-12);
        assert!(b.min_separation() > 1.0);
    }
}

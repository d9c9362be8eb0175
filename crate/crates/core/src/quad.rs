//! Gauss-Legendre quadrature, fixed-order and adaptive.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{CompensatedSum, ComplexSum, PI};
use crate::{Error, Result};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule with nodes found by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 0..n {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut acc = CompensatedSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, mut f: F, a: f64, b: f64) -> Complex64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut acc = ComplexSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(f(mid + half * x) * w);
        }
        acc.value() * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive bisection driven by comparing a panel with its two halves.
#[derive(Debug, Clone)]
pub struct Adaptive {
    rule: GaussLegendre,
    /// Absolute tolerance for the whole range, shared among panels in
    /// proportion to their length.
    pub tolerance: f64,
    pub max_depth: u32,
}

impl Adaptive {
    pub fn new(order: usize, tolerance: f64, max_depth: u32) -> Self {
        Self { rule: GaussLegendre::new(order), tolerance, max_depth }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.integrate_complex(|t| Complex64::new(f(t), 0.0), a, b).map(|z| z.re)
    }

    /// Integrates over `[a, b]`; fails if some panel does not settle within
    /// `max_depth` bisections.
    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, f: F, a: f64, b: f64) -> Result<Complex64> {
        let density = self.tolerance / (b - a).abs().max(f64::MIN_POSITIVE);
        let mut total = ComplexSum::new();
        let mut worst = 0.0f64;
        let whole = self.rule.integrate_complex(&f, a, b);
        let mut stack = Vec::from([(a, b, whole, 0u32)]);
        while let Some((lo, hi, coarse, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let left = self.rule.integrate_complex(&f, lo, mid);
            let right = self.rule.integrate_complex(&f, mid, hi);
            let fine = left + right;
            let err = (fine - coarse).norm();
            // Below the round-off floor further bisection cannot help.
            if err <= density * (hi - lo) || err <= 64.0 * f64::EPSILON * fine.norm() {
                total.add(fine);
            } else if depth >= self.max_depth {
                worst = worst.max(err);
                total.add(fine);
            } else {
                stack.push((mid, hi, right, depth + 1));
                stack.push((lo, mid, left, depth + 1));
            }
        }
        if worst > 0.0 {
            return Err(Error::QuadratureFailed { tolerance: self.tolerance, estimate: worst });
        }
        Ok(total.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let gl = GaussLegendre::new(16);
        let wsum: f64 = gl.weights().iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        // degree 31 is the exactness limit of a 16-point rule
        let v = gl.integrate(|x| x.powi(30), -1.0, 1.0);
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
        let v = gl.integrate(|x| 3.0 * x * x, 0.0, 2.0);
        assert!((v - 8.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_oscillatory() {
        let ad = Adaptive::new(16, 1e-12, 30);
        let v = ad.integrate(|t| libm::cos(50.0 * t), 0.0, 3.0).unwrap();
        assert!((v - libm::sin(150.0) / 50.0).abs() < 1e-11);
        let z = ad.integrate_complex(|t| crate::math::cis(7.0 * t), 0.0, 1.0).unwrap();
        let expect = (crate::math::cis(7.0) - 1.0) / Complex64::new(0.0, 7.0);
        assert!((z - expect).norm() < 1e-12);
    }

    #[test]
    fn adaptive_reports_failure() {
        let ad = Adaptive::new(4, 1e-14, 2);
        assert!(matches!(ad.integrate(|t| libm::sin(1000.0 * t), 0.0, 10.0), Err(Error::QuadratureFailed { .. })));
    }
}

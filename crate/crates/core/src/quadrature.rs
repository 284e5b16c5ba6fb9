//! Gauss–Legendre rules and the refinement loop used for box-domain norms.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Initial points per axis for adaptive box quadrature.
pub const START_POINTS: usize = 64;
/// Largest points per axis before giving up with `UnderResolved`.
pub const MAX_POINTS: usize = 1024;
/// Relative change below which a refinement step counts as converged.
pub const DRIFT_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on `[-1, 1]`, nodes by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (mid + half * x, half * w))
            .collect()
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on_interval(a, b)
            .into_iter()
            .map(|(x, w)| w * f(x))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Evaluates `f(points)` at 64, 128, … points per axis until two successive
/// values differ by less than 0.1 % (relative), returning the finer value.
pub fn refine_until_stable(mut f: impl FnMut(usize) -> f64) -> Result<(f64, usize)> {
    let mut n = START_POINTS;
    let mut prev = f(n);
    let mut drift = f64::INFINITY;
    while n < MAX_POINTS {
        n *= 2;
        let next = f(n);
        drift = relative_change(prev, next);
        if drift < DRIFT_TOL {
            return Ok((next, n));
        }
        prev = next;
    }
    Err(Error::UnderResolved { drift, points: n })
}

pub fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 64, 1024] {
            let g = GaussLegendre::new(n);
            assert_relative_eq!(g.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let g = GaussLegendre::new(5);
        for deg in 0..10u32 {
            let got = g.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
            let expect = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert_relative_eq!(got, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn mapped_interval() {
        let g = GaussLegendre::new(32);
        assert_relative_eq!(g.integrate(0.0, PI, f64::sin), 2.0, epsilon = 1e-13);
    }

    #[test]
    fn refinement_gives_up() {
        let mut calls = 0;
        let r = refine_until_stable(|n| {
            calls += 1;
            n as f64
        });
        assert!(matches!(r, Err(Error::UnderResolved { .. })));
        assert_eq!(calls, 5);
    }
}

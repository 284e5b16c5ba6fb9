//! Quadrature experiments on bounded, non-periodic domains: the polynomial
//! growth ratio `|k q_{k−1}|_p / |q_k|_p` with `q_k = (x₁ + i x₂)^k`, and the
//! half-space family `P_k = k⁻¹ P̂ e^{k⟨ξ,x⟩} η(x)` built from the complex
//! kernel witness.
//!
//! Both are evaluated pointwise from closed forms (never by FFT) with
//! Gauss–Legendre rules refined until the result drifts by less than 0.1 %.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::check_exponent;
use crate::algebra3::{anti, Mat3, Scalar, Vec3};
use crate::error::{Error, Result};
use crate::quadrature::{refine_until_stable, GaussLegendre};
use crate::symbol::complex_kernel_witness;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxDomain {
    pub lower: Vec3,
    pub upper: Vec3,
    /// Gauss–Legendre points per axis for [`BoxDomain::lp_norm`].
    pub points: usize,
}

impl BoxDomain {
    pub fn new(lower: Vec3, upper: Vec3, points: usize) -> Result<Self> {
        if (0..3).any(|i| lower[i].partial_cmp(&upper[i]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::InvalidArgument(format!(
                "box bounds must satisfy lower < upper componentwise, got {:?} / {:?}",
                lower.0, upper.0
            )));
        }
        if points == 0 {
            return Err(Error::InvalidArgument(
                "box quadrature needs points ≥ 1".into(),
            ));
        }
        Ok(BoxDomain {
            lower,
            upper,
            points,
        })
    }

    /// The cube `(−1, 1)³`.
    pub fn unit_cube() -> Self {
        BoxDomain {
            lower: Vec3::new(-1.0, -1.0, -1.0),
            upper: Vec3::new(1.0, 1.0, 1.0),
            points: crate::quadrature::START_POINTS,
        }
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|i| self.upper[i] - self.lower[i]).product()
    }

    /// Tensor Gauss–Legendre `L^p` norm of a pointwise magnitude.
    pub fn lp_norm(&self, magnitude: impl Fn(&Vec3) -> f64 + Sync, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let g = GaussLegendre::new(self.points);
        let axes: Vec<Vec<(f64, f64)>> = (0..3)
            .map(|i| g.on_interval(self.lower[i], self.upper[i]))
            .collect();
        let vals: Vec<(f64, f64)> = axes[0]
            .par_iter()
            .flat_map_iter(|&(x, wx)| {
                let axes = &axes;
                let magnitude = &magnitude;
                axes[1].iter().flat_map(move |&(y, wy)| {
                    axes[2]
                        .iter()
                        .map(move |&(z, wz)| (wx * wy * wz, magnitude(&Vec3::new(x, y, z))))
                })
            })
            .collect();
        Ok(weighted_lp(&vals, p))
    }
}

/// `(Σ wᵢ vᵢ^p)^{1/p}`, scaled by the largest value to avoid overflow.
fn weighted_lp(vals: &[(f64, f64)], p: f64) -> f64 {
    let vmax = vals.iter().map(|v| v.1).fold(0.0, f64::max);
    if vmax == 0.0 {
        return 0.0;
    }
    let s: f64 = vals.iter().map(|(w, v)| w * (v / vmax).powf(p)).sum();
    vmax * s.powf(1.0 / p)
}

/// `|k q_{k−1}|_{L^p(Ω)} / |q_k|_{L^p(Ω)}` for `q_k = (x₁ + i x₂)^k`.
///
/// The integrands depend on `(x₁, x₂)` only, so the `x₃` factor cancels and
/// the quadrature is two-dimensional. Magnitudes are scaled by the largest
/// `|z|` on the box so that `|z|^{kp}` stays finite for large `k p`.
pub fn growth_ratio(k: u32, p: f64, omega: &BoxDomain) -> Result<f64> {
    check_exponent(p)?;
    if k == 0 {
        return Err(Error::InvalidArgument("growth ratio needs k ≥ 1".into()));
    }
    let (l, u) = (omega.lower, omega.upper);
    let rmax = (l[0].abs().max(u[0].abs()).powi(2) + l[1].abs().max(u[1].abs()).powi(2)).sqrt();
    if rmax == 0.0 {
        return Err(Error::InvalidArgument(
            "box collapses onto the x₃ axis".into(),
        ));
    }
    let kf = k as f64;
    let ratio_at = |n: usize| -> f64 {
        let g = GaussLegendre::new(n);
        let xs = g.on_interval(l[0], u[0]);
        let ys = g.on_interval(l[1], u[1]);
        let mut num = 0.0;
        let mut den = 0.0;
        for &(x, wx) in &xs {
            for &(y, wy) in &ys {
                let r = (x * x + y * y).sqrt() / rmax;
                let w = wx * wy;
                // |z|^{(k−1)p} and |z|^{kp}, both relative to rmax
                let lr = r.ln();
                num += w * ((kf - 1.0) * p * lr).exp();
                den += w * (kf * p * lr).exp();
            }
        }
        (kf / rmax) * (num / den).powf(1.0 / p)
    };
    refine_until_stable(ratio_at).map(|(v, _)| v)
}

fn bump(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn bump_derivative(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        bump(t) / (t * t)
    }
}

/// Smooth radial cutoff: `1` on `B(0,1)`, `0` outside `B(0,2)`.
pub fn cutoff(x: &Vec3) -> f64 {
    let r = x.norm();
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let a = bump(2.0 - r);
    let b = bump(r - 1.0);
    a / (a + b)
}

pub fn cutoff_gradient(x: &Vec3) -> Vec3 {
    let r = x.norm();
    if r <= 1.0 || r >= 2.0 {
        return Vec3::zero();
    }
    let a = bump(2.0 - r);
    let b = bump(r - 1.0);
    let da = -bump_derivative(2.0 - r);
    let db = bump_derivative(r - 1.0);
    let dh = (da * b - a * db) / ((a + b) * (a + b));
    x.scale(dh / r)
}

/// Closed-form `Curl P_k(x) = −e^{k⟨ξ,x⟩} (η P̂ × ξ + k⁻¹ P̂ anti(∇η))`.
pub fn halfspace_curl(k: f64, x: &Vec3) -> Mat3<Complex64> {
    let w = complex_kernel_witness();
    let phase = (w.xi.dot(&x.to_complex()) * Complex64::from_real(k)).exp();
    let eta = cutoff(x);
    let grad = cutoff_gradient(x);
    let inner = w.product().scale(Complex64::from_real(eta))
        + w.p_hat
            .matmul(&anti(&grad).to_complex())
            .scale(Complex64::from_real(1.0 / k));
    inner.scale(-phase)
}

/// `P_k(x) = k⁻¹ P̂ e^{k⟨ξ,x⟩} η(x)`.
pub fn halfspace_field(k: f64, x: &Vec3) -> Mat3<Complex64> {
    let w = complex_kernel_witness();
    let phase = (w.xi.dot(&x.to_complex()) * Complex64::from_real(k)).exp();
    w.p_hat.scale(phase * Complex64::from_real(cutoff(x) / k))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfspaceSeminorms {
    pub sym_curl: f64,
    pub dev_sym_curl: f64,
    /// Points per axis at which the ratio was declared resolved.
    pub points: usize,
}

impl HalfspaceSeminorms {
    pub fn ratio(&self) -> f64 {
        self.sym_curl / self.dev_sym_curl
    }
}

/// `p`-th powers of `|sym Curl P_k|` and `|dev sym Curl P_k|` integrated over
/// `{x₁ < 0} ∩ B(0,2)` in spherical coordinates about the `−x₁` axis, with
/// the radial rule split at `r = 1` where the cutoff starts to vary.
fn halfspace_integrals(k: f64, p: f64, n: usize) -> (f64, f64) {
    let g = GaussLegendre::new(n);
    let phis = g.on_interval(0.0, PI / 2.0);
    let dtheta = 2.0 * PI / n as f64;
    let shells = [(0.0, 1.0), (1.0, 2.0)];
    shells
        .iter()
        .flat_map(|&(r0, r1)| g.on_interval(r0, r1))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(r, wr)| {
            let mut num = 0.0;
            let mut den = 0.0;
            for &(phi, wphi) in &phis {
                let (sp, cp) = phi.sin_cos();
                let jac = wr * wphi * dtheta * r * r * sp;
                for t in 0..n {
                    let theta = t as f64 * dtheta;
                    let x = Vec3::new(-r * cp, r * sp * theta.cos(), r * sp * theta.sin());
                    let c = halfspace_curl(k, &x);
                    num += jac * c.sym().norm().powf(p);
                    den += jac * c.dev_sym().norm().powf(p);
                }
            }
            (num, den)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Seminorms `|sym Curl P_k|_p` and `|dev sym Curl P_k|_p` on the half-ball,
/// refined until their ratio is stable to 0.1 %.
pub fn halfspace_seminorms(k: u32, p: f64) -> Result<HalfspaceSeminorms> {
    check_exponent(p)?;
    if k == 0 {
        return Err(Error::InvalidArgument(
            "half-space family needs k ≥ 1".into(),
        ));
    }
    let kf = k as f64;
    let mut last = (0.0, 0.0);
    let (_, points) = refine_until_stable(|n| {
        let (num, den) = halfspace_integrals(kf, p, n);
        last = (num, den);
        (num / den).powf(1.0 / p)
    })?;
    Ok(HalfspaceSeminorms {
        sym_curl: last.0.powf(1.0 / p),
        dev_sym_curl: last.1.powf(1.0 / p),
        points,
    })
}

/// `|sym Curl P_k|_p / |dev sym Curl P_k|_p` on `{x₁ < 0} ∩ B(0,2)`.
pub fn halfspace_ratio(k: u32, p: f64) -> Result<f64> {
    halfspace_seminorms(k, p).map(|s| s.ratio())
}

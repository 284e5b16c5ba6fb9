//! Skew-field kernels of `(sym, sym Curl)` and `(sym, dev sym Curl)`,
//! conformal Killing fields, least-squares projection onto the kernels and
//! the boundary rigidity rank test.

use nalgebra::{DMatrix, DVector};

use crate::algebra3::{anti, Mat3, Vec3};
use crate::error::{Error, Result};

/// Relative singular-value threshold for [`boundary_rank`].
pub const RANK_TOL: f64 = 1e-8;
/// Normal-matrix condition number above which the fit switches to QR.
pub const QR_SWITCH_COND: f64 = 1e6;
/// Normal-matrix condition number above which the geometry is rejected.
pub const DEGENERATE_COND: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelSpace {
    /// `{anti(Ãx + b)}`, 6 parameters.
    Ssc,
    /// `{anti(Ãx + βx + b + ⟨d,x⟩x − ½d‖x‖²)}`, 10 parameters.
    Sdsc,
}

impl KernelSpace {
    pub fn dimension(self) -> usize {
        match self {
            KernelSpace::Ssc => 6,
            KernelSpace::Sdsc => 10,
        }
    }

    pub fn min_samples(self) -> usize {
        self.dimension()
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelSpace::Ssc => "SSC",
            KernelSpace::Sdsc => "SdSC",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KernelElement {
    pub a_tilde: Vec3,
    pub beta: f64,
    pub b: Vec3,
    pub d: Vec3,
}

impl KernelElement {
    /// Parameter order: `a_tilde`, `b`, then `beta`, `d` (the last four are
    /// absent in the `Ssc` space).
    pub fn from_params(space: KernelSpace, theta: &[f64]) -> Self {
        let v = |i: usize| Vec3::new(theta[i], theta[i + 1], theta[i + 2]);
        let mut e = KernelElement {
            a_tilde: v(0),
            b: v(3),
            ..Default::default()
        };
        if space == KernelSpace::Sdsc {
            e.beta = theta[6];
            e.d = v(7);
        }
        e
    }

    pub fn params(&self, space: KernelSpace) -> Vec<f64> {
        let mut out: Vec<f64> = self.a_tilde.0.iter().chain(&self.b.0).copied().collect();
        if space == KernelSpace::Sdsc {
            out.push(self.beta);
            out.extend_from_slice(&self.d.0);
        }
        out
    }

    pub fn in_ssc(&self) -> bool {
        self.beta == 0.0 && self.d == Vec3::zero()
    }

    /// `Ãx + βx + b + ⟨d,x⟩x − ½d‖x‖²`.
    pub fn axial(&self, x: &Vec3) -> Vec3 {
        self.a_tilde.cross(x) + x.scale(self.beta) + self.b + x.scale(self.d.dot(x))
            - self.d.scale(0.5 * x.dot(x))
    }
}

pub fn eval_kernel(e: &KernelElement, x: &Vec3) -> Mat3 {
    anti(&e.axial(x))
}

/// `2(β + ⟨d,x⟩) id + anti(ã) + anti(d × x)`.
pub fn curl_kernel_closed_form(e: &KernelElement, x: &Vec3) -> Mat3 {
    Mat3::identity().scale(2.0 * (e.beta + e.d.dot(x))) + anti(&e.a_tilde) + anti(&e.d.cross(x))
}

/// `φ(x) = ⟨a,x⟩x − ½a‖x‖² + A x + βx + b` with `A = anti(a_axial)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConformalKilling {
    pub a: Vec3,
    pub a_axial: Vec3,
    pub beta: f64,
    pub b: Vec3,
}

impl ConformalKilling {
    pub fn eval(&self, x: &Vec3) -> Vec3 {
        x.scale(self.a.dot(x)) - self.a.scale(0.5 * x.dot(x))
            + anti(&self.a_axial).apply(x)
            + x.scale(self.beta)
            + self.b
    }

    /// `Dφ(x) = x⊗a + ⟨a,x⟩id − a⊗x + A + β id`.
    pub fn jacobian(&self, x: &Vec3) -> Mat3 {
        x.outer(&self.a) - self.a.outer(x)
            + Mat3::identity().scale(self.a.dot(x) + self.beta)
            + anti(&self.a_axial)
    }

    /// Central-difference Jacobian with step `h`.
    pub fn jacobian_fd(&self, x: &Vec3, h: f64) -> Mat3 {
        let mut j = Mat3::zero();
        for c in 0..3 {
            let mut xp = *x;
            let mut xm = *x;
            xp[c] += h;
            xm[c] -= h;
            let col = (self.eval(&xp) - self.eval(&xm)).scale(0.5 / h);
            for r in 0..3 {
                j.0[r][c] = col[r];
            }
        }
        j
    }
}

impl From<&KernelElement> for ConformalKilling {
    fn from(e: &KernelElement) -> Self {
        ConformalKilling {
            a: e.d,
            a_axial: e.a_tilde,
            beta: e.beta,
            b: e.b,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec3>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument(
                "point cloud must be non-empty".into(),
            ));
        }
        Ok(PointCloud { points })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    NormalEquations,
    Qr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelFit {
    pub element: KernelElement,
    /// RMS of `‖P(xᵢ) − T(xᵢ)‖` over the samples.
    pub residual: f64,
    pub condition: f64,
    pub solver: Solver,
}

/// `T(x)` for the unit vector in parameter slot `j`.
fn basis_field(space: KernelSpace, j: usize, x: &Vec3) -> Mat3 {
    let mut theta = vec![0.0; space.dimension()];
    theta[j] = 1.0;
    eval_kernel(&KernelElement::from_params(space, &theta), x)
}

/// Least-squares fit of a kernel element to point samples `(xᵢ, P(xᵢ))`.
pub fn project_kernel(samples: &[(Vec3, Mat3)], space: KernelSpace) -> Result<KernelFit> {
    let need = space.min_samples();
    if samples.len() < need {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            need,
        });
    }
    let m = space.dimension();
    let rows = 9 * samples.len();
    let mut design = DMatrix::<f64>::zeros(rows, m);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (s, (x, p)) in samples.iter().enumerate() {
        for j in 0..m {
            let t = basis_field(space, j, x).flatten();
            for (r, v) in t.iter().enumerate() {
                design[(9 * s + r, j)] = *v;
            }
        }
        for (r, v) in p.flatten().iter().enumerate() {
            rhs[9 * s + r] = *v;
        }
    }
    let normal = design.transpose() * &design;
    let eig = normal.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let condition = if lo <= 0.0 { f64::INFINITY } else { hi / lo };
    if condition.is_nan() || condition > DEGENERATE_COND {
        return Err(Error::DegenerateGeometry(condition));
    }
    let (theta, solver) = if condition <= QR_SWITCH_COND {
        let chol = normal
            .cholesky()
            .ok_or(Error::DegenerateGeometry(condition))?;
        (
            chol.solve(&(design.transpose() * &rhs)),
            Solver::NormalEquations,
        )
    } else {
        let qr = design.clone().qr();
        let qty = qr.q().transpose() * &rhs;
        let theta = qr
            .r()
            .solve_upper_triangular(&qty)
            .ok_or(Error::DegenerateGeometry(condition))?;
        (theta, Solver::Qr)
    };
    let misfit = &design * &theta - &rhs;
    let residual = (misfit.norm_squared() / samples.len() as f64).sqrt();
    Ok(KernelFit {
        element: KernelElement::from_params(space, theta.as_slice()),
        residual,
        condition,
        solver,
    })
}

/// Rank of `{f(x) = 0 : x ∈ Γ}` in the unknowns `(A, β, b, d)` with
/// `f(x) = Ax + βx + b + ⟨d,x⟩x − ½d‖x‖²`.
pub fn boundary_rank(gamma: &PointCloud) -> usize {
    let pts = gamma.points();
    let mut sys = DMatrix::<f64>::zeros(3 * pts.len(), 10);
    for (s, x) in pts.iter().enumerate() {
        let mut cols: Vec<Vec3> = Vec::with_capacity(10);
        for i in 0..3 {
            cols.push(Vec3::unit(i).cross(x));
        }
        cols.push(*x);
        for i in 0..3 {
            cols.push(Vec3::unit(i));
        }
        for i in 0..3 {
            cols.push(x.scale(x[i]) - Vec3::unit(i).scale(0.5 * x.dot(x)));
        }
        for (j, c) in cols.iter().enumerate() {
            for r in 0..3 {
                sys[(3 * s + r, j)] = c[r];
            }
        }
    }
    let sv = sys.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * smax).count()
}

/// `count` points on the circle `{x₃ = 0, x₁² + (x₂ − r)² = r²}`, which
/// passes through the origin.
pub fn circle_through_origin(radius: f64, count: usize) -> Vec<Vec3> {
    (0..count)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            Vec3::new(radius * t.cos(), radius + radius * t.sin(), 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn random_element(rng: &mut sampling::SeededRng) -> KernelElement {
        KernelElement {
            a_tilde: sampling::vec3(rng),
            beta: sampling::vec3(rng)[0],
            b: sampling::vec3(rng),
            d: sampling::vec3(rng),
        }
    }

    #[test]
    fn eval_examples() {
        let x = Vec3::new(0.3, -0.2, 0.9);
        let e = KernelElement {
            b: Vec3::new(1.0, 2.0, 3.0),
            ..Default::default()
        };
        assert_eq!(eval_kernel(&e, &x), anti(&e.b));
        let e = KernelElement {
            beta: 1.0,
            ..Default::default()
        };
        assert_eq!(eval_kernel(&e, &Vec3::unit(2)), anti(&Vec3::unit(2)));
        let e = KernelElement {
            d: Vec3::unit(2),
            ..Default::default()
        };
        assert_eq!(
            eval_kernel(&e, &Vec3::unit(2)),
            anti(&Vec3::new(0.0, 0.0, 0.5))
        );
    }

    #[test]
    fn curl_examples() {
        let x = Vec3::new(0.4, 0.1, -0.7);
        let e = KernelElement {
            beta: 1.0,
            ..Default::default()
        };
        assert_eq!(curl_kernel_closed_form(&e, &x), Mat3::identity().scale(2.0));
        let e = KernelElement {
            a_tilde: Vec3::new(1.0, -2.0, 0.5),
            ..Default::default()
        };
        assert_eq!(curl_kernel_closed_form(&e, &x), anti(&e.a_tilde));
    }

    #[test]
    fn random_elements_are_skew_with_spherical_plus_skew_curl() {
        let mut rng = sampling::rng(11);
        for _ in 0..100 {
            let e = random_element(&mut rng);
            let x = sampling::vec3(&mut rng);
            assert_eq!(eval_kernel(&e, &x).sym().norm(), 0.0);
            assert!(curl_kernel_closed_form(&e, &x).dev_sym().norm() < 1e-14);
        }
    }

    #[test]
    fn closed_form_curl_matches_finite_differences() {
        // (Curl P)_{ij} = ε_{jab} ∂_a P_{ib}
        let mut rng = sampling::rng(5);
        let h = 1e-4;
        for _ in 0..100 {
            let e = random_element(&mut rng);
            let x = sampling::vec3(&mut rng);
            let mut d = [Mat3::zero(); 3];
            for (a, da) in d.iter_mut().enumerate() {
                let mut xp = x;
                let mut xm = x;
                xp[a] += h;
                xm[a] -= h;
                *da = (eval_kernel(&e, &xp) - eval_kernel(&e, &xm)).scale(0.5 / h);
            }
            let mut fd = Mat3::zero();
            for i in 0..3 {
                for j in 0..3 {
                    let (a, b) = ((j + 1) % 3, (j + 2) % 3);
                    fd.0[i][j] = d[a].0[i][b] - d[b].0[i][a];
                }
            }
            assert!((fd - curl_kernel_closed_form(&e, &x)).norm() < 1e-7);
        }
    }

    #[test]
    fn axial_vector_is_conformal_killing() {
        let mut rng = sampling::rng(8);
        for _ in 0..100 {
            let e = random_element(&mut rng);
            let x = sampling::vec3(&mut rng);
            let phi = ConformalKilling::from(&e);
            assert!((phi.eval(&x) - e.axial(&x)).norm() < 1e-15);
            let j = phi.jacobian_fd(&x, 1e-4);
            assert!(j.dev_sym().norm() < 1e-7);
            assert!((j - phi.jacobian(&x)).norm() < 1e-7);
            assert!(phi.jacobian(&x).dev_sym().norm() < 1e-14);
        }
    }

    #[test]
    fn exact_recovery_and_idempotence() {
        let mut rng = sampling::rng(3);
        for space in [KernelSpace::Ssc, KernelSpace::Sdsc] {
            let mut e = random_element(&mut rng);
            if space == KernelSpace::Ssc {
                e.beta = 0.0;
                e.d = Vec3::zero();
            }
            let pts = sampling::general_position_points(&mut rng, 12, 1e-6);
            let samples: Vec<_> = pts.iter().map(|x| (*x, eval_kernel(&e, x))).collect();
            let fit = project_kernel(&samples, space).unwrap();
            let got = fit.element.params(space);
            for (g, w) in got.iter().zip(e.params(space)) {
                assert!((g - w).abs() < 1e-10);
            }
            assert!(fit.residual < 1e-10);
            let again: Vec<_> = pts
                .iter()
                .map(|x| (*x, eval_kernel(&fit.element, x)))
                .collect();
            let refit = project_kernel(&again, space).unwrap();
            for (g, w) in refit.element.params(space).iter().zip(got) {
                assert!((g - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_offset_is_orthogonal_to_kernel() {
        let b = Vec3::new(0.5, -1.0, 2.0);
        let s0 = Mat3::from_rows([[1.0, 0.2, 0.0], [0.2, -0.5, 0.3], [0.0, 0.3, 0.7]]);
        let mut pts = Vec::new();
        for s in [-1.0, 1.0] {
            for i in 0..3 {
                pts.push(Vec3::unit(i).scale(s));
                pts.push(Vec3::new(1.0, 1.0, 1.0).scale(s) - Vec3::unit(i).scale(2.0 * s));
            }
        }
        let samples: Vec<_> = pts.iter().map(|x| (*x, anti(&b) + s0)).collect();
        let fit = project_kernel(&samples, KernelSpace::Sdsc).unwrap();
        assert!((fit.element.b - b).norm() < 1e-12);
        let total: f64 = fit.residual * fit.residual * samples.len() as f64;
        assert!((total - s0.norm_sqr() * samples.len() as f64).abs() < 1e-10);
    }

    #[test]
    fn project_errors() {
        assert_eq!(
            project_kernel(&[], KernelSpace::Sdsc),
            Err(Error::TooFewSamples { got: 0, need: 10 })
        );
        let line: Vec<_> = (0..12)
            .map(|i| (Vec3::new(i as f64, 0.0, 0.0), Mat3::zero()))
            .collect();
        assert!(matches!(
            project_kernel(&line, KernelSpace::Sdsc),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn rigidity_ranks() {
        let mut rng = sampling::rng(17);
        let sphere: Vec<_> = (0..12).map(|_| sampling::unit_vec3(&mut rng)).collect();
        assert_eq!(boundary_rank(&PointCloud::new(sphere).unwrap()), 10);
        let circle = circle_through_origin(1.0, 12);
        assert!(boundary_rank(&PointCloud::new(circle).unwrap()) < 10);
        let line: Vec<_> = (0..5)
            .map(|i| Vec3::new(1.0, 2.0, -1.0).scale(i as f64))
            .collect();
        assert!(boundary_rank(&PointCloud::new(line).unwrap()) < 10);
        assert!(PointCloud::new(vec![]).is_err());
    }
}

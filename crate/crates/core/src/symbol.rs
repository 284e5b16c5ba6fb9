//! Fourier symbols of `Curl`, `sym Curl` and `dev sym Curl`.
//!
//! A symbol is a linear map on 3×3 complex matrices, stored as a 9×9 complex
//! matrix acting on the row-major flattening of [`Mat3::flatten`]. With the
//! convention `∂ⱼ ↦ i ξⱼ` the matrix `Curl` has symbol `P̂ ↦ −i P̂ × ξ`.

use nalgebra::{SMatrix, SVector, SymmetricEigen};
use num_complex::Complex64;

use crate::algebra3::{Mat3, Scalar, Vec3, TAU_ZERO};
use crate::error::{Error, Result};

pub type CMat9 = SMatrix<Complex64, 9, 9>;
pub type CVec9 = SVector<Complex64, 9>;

/// Relative singular-value threshold that separates kernel from range.
pub const TAU_KER: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Full,
    Sym,
    DevSym,
}

impl Part {
    pub fn project(self, m: &Mat3<Complex64>) -> Mat3<Complex64> {
        match self {
            Part::Full => *m,
            Part::Sym => m.sym(),
            Part::DevSym => m.dev_sym(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolOperator {
    pub matrix: CMat9,
}

impl SymbolOperator {
    /// Assembles the matrix column by column from the images of the
    /// matrix units `e_i ⊗ e_j`.
    pub fn from_map(f: impl Fn(&Mat3<Complex64>) -> Mat3<Complex64>) -> Self {
        let mut matrix = CMat9::zeros();
        for c in 0..9 {
            let image = f(&Mat3::unit(c / 3, c % 3)).flatten();
            for r in 0..9 {
                matrix[(r, c)] = image[r];
            }
        }
        SymbolOperator { matrix }
    }

    pub fn identity() -> Self {
        SymbolOperator {
            matrix: CMat9::identity(),
        }
    }

    pub fn apply(&self, p: &Mat3<Complex64>) -> Mat3<Complex64> {
        let v = CVec9::from_column_slice(&p.flatten());
        let w = self.matrix * v;
        Mat3::unflatten(w.as_slice())
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &SymbolOperator) -> SymbolOperator {
        SymbolOperator {
            matrix: self.matrix * other.matrix,
        }
    }

    pub fn adjoint(&self) -> SymbolOperator {
        SymbolOperator {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Frobenius norm of the 9×9 matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> [f64; 9] {
        let mut s: Vec<f64> = self.matrix.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        std::array::from_fn(|i| s[i])
    }
}

impl std::ops::Sub for &SymbolOperator {
    type Output = SymbolOperator;
    fn sub(self, o: &SymbolOperator) -> SymbolOperator {
        SymbolOperator {
            matrix: self.matrix - o.matrix,
        }
    }
}

/// Symbol `P̂ ↦ −i · part(P̂ × ξ)`.
pub fn curl_symbol(xi: &Vec3<Complex64>, part: Part) -> SymbolOperator {
    SymbolOperator::from_map(|p| part.project(&p.cross_right(xi)).scale(-I))
}

pub fn curl_symbol_real(xi: &Vec3<f64>, part: Part) -> SymbolOperator {
    curl_symbol(&xi.to_complex(), part)
}

/// Orthonormal basis of a numerical kernel.
#[derive(Clone, Debug)]
pub struct KernelBasis {
    pub vectors: Vec<Mat3<Complex64>>,
    pub dimension: usize,
    /// All singular values, descending.
    pub singular_values: [f64; 9],
}

impl KernelBasis {
    /// Ratio between the smallest retained (range) singular value and the
    /// largest discarded (kernel) one; infinite when the kernel is exact.
    pub fn gap_ratio(&self) -> f64 {
        let r = 9 - self.dimension;
        if r == 0 || r == 9 {
            return f64::INFINITY;
        }
        let below = self.singular_values[r];
        if below == 0.0 {
            f64::INFINITY
        } else {
            self.singular_values[r - 1] / below
        }
    }

    /// Orthogonal projection onto the span.
    pub fn projector(&self) -> CMat9 {
        let mut p = CMat9::zeros();
        for v in &self.vectors {
            let col = CVec9::from_column_slice(&v.flatten());
            p += col * col.adjoint();
        }
        p
    }

    /// Hermitian distance of `m` from the span, relative to `|m|`.
    pub fn distance(&self, m: &Mat3<Complex64>) -> f64 {
        let v = CVec9::from_column_slice(&m.flatten());
        let r = v - self.projector() * v;
        r.norm() / v.norm().max(f64::MIN_POSITIVE)
    }
}

struct SortedSvd {
    u: CMat9,
    sigma: [f64; 9],
    v: CMat9,
}

/// SVD with singular values sorted descending.
fn sorted_svd(m: &CMat9) -> SortedSvd {
    let svd = m.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..9).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut su = CMat9::zeros();
    let mut sv = CMat9::zeros();
    let mut sigma = [0.0; 9];
    for (dst, &src) in order.iter().enumerate() {
        sigma[dst] = svd.singular_values[src];
        su.set_column(dst, &u.column(src));
        sv.set_column(dst, &v_t.row(src).adjoint());
    }
    SortedSvd {
        u: su,
        sigma,
        v: sv,
    }
}

fn numerical_rank(sigma: &[f64; 9], tau: f64) -> usize {
    let cut = tau * sigma[0];
    if sigma[0] == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > cut).count()
}

/// Orthonormal basis of the numerical kernel: right singular vectors with
/// `σ ≤ τ_ker · σ_max`.
pub fn kernel_basis(op: &SymbolOperator, tau_ker: f64) -> KernelBasis {
    let svd = sorted_svd(&op.matrix);
    let rank = numerical_rank(&svd.sigma, tau_ker);
    let vectors = (rank..9)
        .map(|c| Mat3::unflatten(svd.v.column(c).as_slice()))
        .collect::<Vec<_>>();
    KernelBasis {
        dimension: vectors.len(),
        vectors,
        singular_values: svd.sigma,
    }
}

/// Largest principal angle (radians) between two subspaces of equal
/// dimension, computed from `sin θ_max = ‖(Id − P_a) B‖₂` to stay accurate
/// for nearly coincident spans.
pub fn max_principal_angle(a: &KernelBasis, b: &KernelBasis) -> f64 {
    if a.dimension != b.dimension {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.dimension == 0 {
        return 0.0;
    }
    let pa = a.projector();
    let mut r = nalgebra::DMatrix::<Complex64>::zeros(9, b.dimension);
    for (j, v) in b.vectors.iter().enumerate() {
        let col = CVec9::from_column_slice(&v.flatten());
        let resid = col - pa * col;
        r.set_column(j, &resid);
    }
    let smax = r
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .min(1.0);
    smax.asin()
}

fn check_frequency(xi: &Vec3<f64>) -> Result<()> {
    let n = xi.norm();
    if n < TAU_ZERO {
        Err(Error::ZeroFrequency(n))
    } else {
        Ok(())
    }
}

/// Kernel projection `P(ξ)` and generalized inverse `Q(ξ)` of the
/// `dev sym Curl` symbol, with the degree-zero multiplier `M(ξ) = Ã(ξ) Q(ξ)`.
#[derive(Clone, Debug)]
pub struct Multiplier {
    pub a: SymbolOperator,
    pub a_tilde: SymbolOperator,
    pub kernel_projection: SymbolOperator,
    pub q: SymbolOperator,
    pub m: SymbolOperator,
}

pub fn multiplier_parts(xi: &Vec3<f64>) -> Result<Multiplier> {
    check_frequency(xi)?;
    let a = curl_symbol_real(xi, Part::DevSym);
    let a_tilde = curl_symbol_real(xi, Part::Sym);
    let svd = sorted_svd(&a.matrix);
    let rank = numerical_rank(&svd.sigma, TAU_KER);
    let mut q = CMat9::zeros();
    let mut p = CMat9::zeros();
    for c in 0..9 {
        let v = svd.v.column(c);
        if c < rank {
            q += v * svd.u.column(c).adjoint() * Complex64::from_real(1.0 / svd.sigma[c]);
        } else {
            p += v * v.adjoint();
        }
    }
    let q = SymbolOperator { matrix: q };
    let m = a_tilde.compose(&q);
    Ok(Multiplier {
        a,
        a_tilde,
        kernel_projection: SymbolOperator { matrix: p },
        q,
        m,
    })
}

/// `M(ξ)` with `M(ξ) A(ξ) = Ã(ξ)`.
pub fn build_multiplier(xi: &Vec3<f64>) -> Result<SymbolOperator> {
    multiplier_parts(xi).map(|parts| parts.m)
}

/// `max |sym(P̂ × ξ)| / |dev sym(P̂ × ξ)|` over `P̂` outside the kernel,
/// as the largest generalized eigenvalue of the two quadratic forms on `ker⊥`.
pub fn sharp_ratio(xi: &Vec3<f64>) -> Result<f64> {
    check_frequency(xi)?;
    let a = curl_symbol_real(xi, Part::DevSym);
    let a_tilde = curl_symbol_real(xi, Part::Sym);
    let svd = sorted_svd(&a.matrix);
    let rank = numerical_rank(&svd.sigma, TAU_KER);
    // In the right-singular basis the denominator form is diag(σ²), so the
    // pencil reduces to the Hermitian matrix Σ⁻¹ Vᴴ ÃᴴÃ V Σ⁻¹.
    let gt = a_tilde.matrix.adjoint() * a_tilde.matrix;
    let mut b = nalgebra::DMatrix::<Complex64>::zeros(rank, rank);
    for i in 0..rank {
        for j in 0..rank {
            let vi = svd.v.column(i);
            let vj = svd.v.column(j);
            let g = (vi.adjoint() * gt * vj)[(0, 0)];
            b[(i, j)] = g / Complex64::from_real(svd.sigma[i] * svd.sigma[j]);
        }
    }
    let b = (&b + b.adjoint()) * Complex64::from_real(0.5);
    let eig = SymmetricEigen::new(b);
    let lmax = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(lmax.max(0.0).sqrt())
}

/// Complex pair with `dev sym(P̂ × ξ) = 0` but `sym(P̂ × ξ) = i · id`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelWitness {
    pub p_hat: Mat3<Complex64>,
    pub xi: Vec3<Complex64>,
}

impl KernelWitness {
    pub fn product(&self) -> Mat3<Complex64> {
        self.p_hat.cross_right(&self.xi)
    }
}

pub fn complex_kernel_witness() -> KernelWitness {
    let z = Complex64::from_real(0.0);
    let one = Complex64::from_real(1.0);
    let w = KernelWitness {
        p_hat: Mat3([[z, z, -one], [z, z, I], [z, -I, z]]),
        xi: Vec3::new(one, I, z),
    };
    let prod = w.product();
    debug_assert!(prod.dev_sym().norm() < 1e-15);
    debug_assert!((prod.sym() - Mat3::identity().scale(I)).norm() < 1e-15);
    debug_assert!(w.xi.dot(&w.xi).norm() == 0.0);
    w
}

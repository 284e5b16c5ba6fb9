//! Korn-type constants on the periodic torus.
//!
//! For a field `P` with Fourier coefficients `P̂(k)` the quadratic form
//! `‖sym P‖² + ‖dev sym Curl P‖²` splits into independent Hermitian forms
//! `Q_k(P̂) = ‖sym P̂‖² + ‖dev sym(P̂ × k)‖²` on `ℂ^{3×3}`. The best constant
//! `c` in `‖P − T‖ ≤ c (‖sym P‖² + ‖dev sym Curl P‖²)^{1/2}` is
//! `1/√(min_k λ_min(Q_k))`, with the `k = 0` form restricted to the
//! complement of the skew (kernel) matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra3::{anti, Mat3, Scalar, Vec3};
use crate::error::{Error, Result};
use crate::fields::{
    apply_operator, random_bandlimited_rank, GridField, GridSpec, OperatorKind, Reality,
};
use crate::sampling;
use crate::symbol::{curl_symbol_real, sharp_ratio, CMat9, Part, SymbolOperator};

pub const CONVENTION: &str = "torus [0, 2π)³ with integer frequencies (a unit-period torus \
rescales frequencies by 2π); constant measured for the squared-sum form \
‖sym P‖² + ‖dev sym Curl P‖², within a factor √2 of the sum-of-norms form";

/// Ritz residual below which the grid cross-check counts as converged.
pub const LANCZOS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyForm {
    pub k: [i64; 3],
    pub form: CMat9,
}

impl FrequencyForm {
    /// `Q_k(P̂) = P̂ᴴ Q P̂` for a matrix flattened row-major.
    pub fn value(&self, p: &Mat3<Complex64>) -> f64 {
        let v = nalgebra::SVector::<Complex64, 9>::from_row_slice(&p.flatten());
        (v.adjoint() * self.form * v)[(0, 0)].re
    }

    pub fn hermitian_defect(&self) -> f64 {
        (self.form - self.form.adjoint()).norm()
    }
}

fn kvec(k: [i64; 3]) -> Vec3 {
    Vec3::new(k[0] as f64, k[1] as f64, k[2] as f64)
}

pub fn frequency_form(k: [i64; 3]) -> FrequencyForm {
    let s = SymbolOperator::from_map(|p| p.sym());
    let c = curl_symbol_real(&kvec(k), Part::DevSym);
    let form = s.matrix.adjoint() * s.matrix + c.matrix.adjoint() * c.matrix;
    FrequencyForm { k, form }
}

/// Smallest eigenvalue of an `m × m` Hermitian matrix through the real
/// `2m × 2m` embedding `[[A, −B], [B, A]]`, with a unit minimiser.
fn hermitian_min(h: &DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let m = h.nrows();
    let mut e = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let z = h[(i, j)];
            e[(i, j)] = z.re;
            e[(i + m, j + m)] = z.re;
            e[(i, j + m)] = -z.im;
            e[(i + m, j)] = z.im;
        }
    }
    let eig = SymmetricEigen::new(e);
    let (imin, lmin) =
        eig.eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            );
    let col = eig.eigenvectors.column(imin);
    let mut v = DVector::<Complex64>::from_fn(m, |i, _| Complex64::new(col[i], col[i + m]));
    v /= Complex64::from_real(v.norm());
    (lmin, v)
}

/// `min Q_k(P̂)/‖P̂‖²` and a unit minimiser. At `k = 0` the quotient is taken
/// on the symmetric matrices, where it is identically 1.
pub fn lambda_min(k: [i64; 3]) -> (f64, Mat3<Complex64>) {
    if k == [0, 0, 0] {
        return (
            1.0,
            Mat3::identity().scale(Complex64::from_real(1.0 / 3f64.sqrt())),
        );
    }
    let f = frequency_form(k);
    let h = DMatrix::from_fn(9, 9, |i, j| f.form[(i, j)]);
    let (l, v) = hermitian_min(&h);
    (l, Mat3::unflatten(v.as_slice()))
}

/// `min Q_k` over the skew matrices `anti(a)`, relative to `‖anti(a)‖²`.
pub fn skew_block_min(k: [i64; 3]) -> f64 {
    let f = frequency_form(k);
    let basis: Vec<Vec<Complex64>> = (0..3)
        .map(|i| {
            anti(&Vec3::unit(i))
                .scale(1.0 / 2f64.sqrt())
                .to_complex()
                .flatten()
                .to_vec()
        })
        .collect();
    let h = DMatrix::from_fn(3, 3, |i, j| {
        let bi = DVector::from_column_slice(&basis[i]);
        let bj = DVector::from_column_slice(&basis[j]);
        let fm = DMatrix::from_fn(9, 9, |r, c| f.form[(r, c)]);
        (bi.adjoint() * fm * bj)[(0, 0)]
    });
    hermitian_min(&h).0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyEntry {
    pub k: [i64; 3],
    pub lambda_min: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KornReport {
    /// Lexicographic over `|k|∞ ≤ kmax`, including the restricted `k = 0`.
    pub per_frequency: Vec<FrequencyEntry>,
    pub kmax: usize,
    pub lambda_min: f64,
    /// First frequency (lexicographic) attaining `lambda_min`.
    pub argmin: [i64; 3],
    pub c_estimate: f64,
    /// Minimum over the boundary shell `|k|∞ = kmax`.
    pub shell_min: f64,
    /// Set when the shell minimum is the global minimum, so enlarging
    /// `kmax` could still lower the estimate.
    pub non_monotone_tail: bool,
    pub convention: &'static str,
    pub crosscheck_residual: Option<f64>,
}

pub fn frequencies(kmax: usize) -> Vec<[i64; 3]> {
    let km = kmax as i64;
    let mut out = Vec::with_capacity((2 * kmax + 1).pow(3));
    for a in -km..=km {
        for b in -km..=km {
            for c in -km..=km {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn linf(k: &[i64; 3]) -> i64 {
    k.iter().map(|v| v.abs()).max().unwrap_or(0)
}

pub fn korn_constant(kmax: usize) -> Result<KornReport> {
    if kmax == 0 {
        return Err(Error::InvalidArgument(
            "korn_constant needs kmax ≥ 1".into(),
        ));
    }
    let per_frequency: Vec<FrequencyEntry> = frequencies(kmax)
        .into_par_iter()
        .map(|k| FrequencyEntry {
            k,
            lambda_min: lambda_min(k).0,
        })
        .collect();
    let mut lmin = f64::INFINITY;
    let mut argmin = [0; 3];
    let mut shell_min = f64::INFINITY;
    for e in &per_frequency {
        if e.lambda_min < lmin {
            lmin = e.lambda_min;
            argmin = e.k;
        }
        if linf(&e.k) == kmax as i64 {
            shell_min = shell_min.min(e.lambda_min);
        }
    }
    Ok(KornReport {
        per_frequency,
        kmax,
        lambda_min: lmin,
        argmin,
        c_estimate: 1.0 / lmin.sqrt(),
        shell_min,
        non_monotone_tail: shell_min <= lmin,
        convention: CONVENTION,
        crosscheck_residual: None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossCheck {
    /// `|λ_grid − λ_freq|`.
    pub residual: f64,
    pub lambda_grid: f64,
    /// Minimum of `λ_min(k)` over the frequencies the grid represents.
    pub lambda_freq: f64,
    /// Frequency carrying most of the Ritz vector's energy (`k` and `−k`
    /// pooled, the lexicographically larger one reported).
    pub dominant_frequency: [i64; 3],
    pub iterations: usize,
}

/// Frequencies with a Nyquist index, and the skew part at `k = 0`, are
/// outside the subspace on which the grid form is compared.
fn project(f: &GridField) -> Result<GridField> {
    let spec = f.spec();
    let filtered = f.filter_frequencies(|idx| !spec.is_nyquist(idx));
    let zero = spec.index_of([0, 0, 0]);
    let mut coeffs = filtered.coefficients().to_vec();
    let m = Mat3::unflatten(&coeffs[9 * zero..9 * zero + 9]).sym();
    coeffs[9 * zero..9 * zero + 9].copy_from_slice(&m.flatten());
    GridField::from_coefficients(spec, 2, Reality::Real, coeffs)
}

/// `P ↦ sym P + Curl dev sym Curl P`, the operator of the form
/// `‖sym P‖² + ‖dev sym Curl P‖²` (Curl is self-adjoint on the torus).
fn form_operator(f: &GridField) -> Result<GridField> {
    let c = apply_operator(f, OperatorKind::CurlMat)?;
    let cc = apply_operator(&c.dev_sym()?, OperatorKind::CurlMat)?;
    f.sym()?.add(&cc)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Smallest eigenvalue of the field-level form on an `n³` grid by Lanczos
/// with full reorthogonalisation, compared with the per-frequency minimum.
///
/// Lanczos vectors are real point values; by Parseval their Euclidean inner
/// product is a multiple of the `L²` one, so the Ritz values are those of
/// the form itself.
pub fn grid_crosscheck(n: usize, seed: u64, iterations: usize) -> Result<CrossCheck> {
    let spec = GridSpec::new(n)?;
    let band = n / 2 - 1;
    let to_samples = |f: &GridField| -> Vec<f64> { f.samples().iter().map(|z| z.re).collect() };
    let from_samples = |v: &[f64]| -> Result<GridField> {
        let z: Vec<Complex64> = v.iter().map(|&x| Complex64::from_real(x)).collect();
        GridField::from_samples(spec, 2, Reality::Real, &z)
    };
    let apply = |v: &[f64]| -> Result<Vec<f64>> {
        Ok(to_samples(&project(&form_operator(&from_samples(v)?)?)?))
    };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q = to_samples(&project(&random_bandlimited_rank(spec, seed, band, 2)?)?);
    let nq = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|z| *z /= nq);
    let mut last_residual = f64::INFINITY;
    let check_every = 5;
    for j in 0..iterations {
        let mut w = apply(&q)?;
        let alpha = dot(&q, &w);
        axpy(&mut w, -alpha, &q);
        if let (Some(prev), Some(&b)) = (basis.last(), betas.last()) {
            axpy(&mut w, -b, prev);
        }
        basis.push(q);
        alphas.push(alpha);
        // a second Gram–Schmidt sweep only when the first one cancelled
        // most of w
        for pass in 0..2 {
            let before = dot(&w, &w).sqrt();
            for v in &basis {
                let c = dot(v, &w);
                axpy(&mut w, -c, v);
            }
            if pass == 0 && dot(&w, &w).sqrt() > 0.5 * before {
                break;
            }
        }
        // round-off from the transforms re-enters the projected-out modes,
        // which the form maps to zero
        let w = to_samples(&project(&from_samples(&w)?)?);
        let beta = dot(&w, &w).sqrt();
        let m = alphas.len();
        let check = (j + 1) % check_every == 0 || beta < 1e-14 || j + 1 == iterations;
        if check {
            let t = DMatrix::from_fn(m, m, |r, c| {
                if r == c {
                    alphas[r]
                } else if r + 1 == c || c + 1 == r {
                    betas[r.min(c)]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let (imin, theta) = eig.eigenvalues.iter().copied().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            );
            let s = eig.eigenvectors.column(imin);
            last_residual = beta * s[m - 1].abs();
            if last_residual < LANCZOS_TOL || beta < 1e-14 {
                let mut y = vec![0.0; basis[0].len()];
                for (i, v) in basis.iter().enumerate() {
                    axpy(&mut y, s[i], v);
                }
                let yf = from_samples(&y)?;
                let dominant = dominant_frequency(spec, yf.coefficients());
                let lambda_freq = frequencies(band)
                    .into_par_iter()
                    .map(|k| lambda_min(k).0)
                    .reduce(|| f64::INFINITY, f64::min);
                return Ok(CrossCheck {
                    residual: (theta - lambda_freq).abs(),
                    lambda_grid: theta,
                    lambda_freq,
                    dominant_frequency: dominant,
                    iterations: m,
                });
            }
        }
        betas.push(beta);
        q = w;
        q.iter_mut().for_each(|z| *z /= beta);
    }
    Err(Error::NoConvergence(iterations, last_residual))
}

fn dominant_frequency(spec: GridSpec, y: &[Complex64]) -> [i64; 3] {
    let mut best = ([0i64; 3], -1.0);
    let band = (spec.n() / 2 - 1) as i64;
    for k in frequencies(band as usize) {
        let neg = [-k[0], -k[1], -k[2]];
        if neg > k {
            continue;
        }
        let energy = |kk: [i64; 3]| -> f64 {
            let idx = spec.index_of(kk);
            y[9 * idx..9 * idx + 9].iter().map(|z| z.norm_sqr()).sum()
        };
        let e = energy(k) + if neg == k { 0.0 } else { energy(neg) };
        if e > best.1 {
            best = (k, e);
        }
    }
    best.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceConstant {
    pub value: f64,
    /// `max − min` of the sampled ratios.
    pub spread: f64,
    pub samples: usize,
}

/// `sup_ξ ‖sym(P̂×ξ)‖/‖dev sym(P̂×ξ)‖` over 1000 seeded unit directions.
pub fn equivalence_constant() -> Result<EquivalenceConstant> {
    equivalence_constant_with(1, 1000)
}

pub fn equivalence_constant_with(seed: u64, samples: usize) -> Result<EquivalenceConstant> {
    if samples == 0 {
        return Err(Error::TooFewSamples { got: 0, need: 1 });
    }
    let mut rng = sampling::rng(seed);
    let dirs: Vec<Vec3> = (0..samples)
        .map(|_| sampling::unit_vec3(&mut rng))
        .collect();
    let ratios = dirs
        .par_iter()
        .map(sharp_ratio)
        .collect::<Result<Vec<f64>>>()?;
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EquivalenceConstant {
        value: hi,
        spread: hi - lo,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::from_real(x)
    }

    #[test]
    fn form_examples() {
        let f0 = frequency_form([0, 0, 0]);
        let skew = anti(&Vec3::new(1.0, -2.0, 0.5)).to_complex();
        assert!(f0.value(&skew).abs() < 1e-14);
        assert!((f0.value(&Mat3::identity().to_complex()) - 3.0).abs() < 1e-14);

        let f = frequency_form([0, 0, 1]);
        assert!(f.hermitian_defect() < 1e-13);
        assert!((f.value(&Mat3::identity().to_complex()) - 3.0).abs() < 1e-13);
        let a = anti(&Vec3::unit(0)).to_complex();
        let v = f.value(&a);
        assert!((0.5 - 1e-12..=2.0 / 3.0 + 1e-12).contains(&v));
    }

    #[test]
    fn form_is_positive_definite_off_zero() {
        for k in frequencies(2) {
            if k == [0, 0, 0] {
                continue;
            }
            let h = DMatrix::from_fn(9, 9, |i, j| frequency_form(k).form[(i, j)]);
            let (l, v) = hermitian_min(&h);
            assert!(l > 0.0);
            // minimiser attains the quotient
            let p = Mat3::unflatten(v.as_slice());
            assert!((frequency_form(k).value(&p) - l).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_examples() {
        let (l0, p0) = lambda_min([0, 0, 0]);
        assert_eq!(l0, 1.0);
        assert!((p0.norm() - 1.0).abs() < 1e-15);
        let (l, _) = lambda_min([0, 0, 1]);
        assert!(l > 0.0 && l <= 1.0);
        // direct complex Hermitian solve as oracle
        let f = frequency_form([0, 0, 1]);
        let h = DMatrix::from_fn(9, 9, |i, j| f.form[(i, j)]);
        let oracle = SymmetricEigen::new(h).eigenvalues.min();
        assert!((l - oracle).abs() < 1e-12);
    }

    #[test]
    fn lambda_is_axis_permutation_invariant() {
        for k in [[1, 2, 0], [0, -1, 3], [2, 2, 1]] {
            let l = lambda_min(k).0;
            for perm in [[1, 2, 0], [2, 0, 1], [1, 0, 2]] {
                let kp = [k[perm[0]], k[perm[1]], k[perm[2]]];
                assert!((lambda_min(kp).0 - l).abs() < 1e-12);
                assert!((lambda_min([-kp[0], kp[1], -kp[2]]).0 - l).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn skew_block_grows_with_frequency() {
        for k in frequencies(3) {
            if k == [0, 0, 0] {
                continue;
            }
            let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            assert!(skew_block_min(k) >= 0.25 * k2 - 1e-12);
        }
    }

    #[test]
    fn korn_report_shape() {
        let r = korn_constant(2).unwrap();
        assert_eq!(r.per_frequency.len(), 125);
        assert_eq!(r.per_frequency[0].k, [-2, -2, -2]);
        assert!(r
            .per_frequency
            .iter()
            .all(|e| e.lambda_min > 0.0 && e.lambda_min <= 1.0 + 1e-12));
        assert!(r.c_estimate >= 1.0);
        assert!(!r.non_monotone_tail);
        assert_eq!(linf(&r.argmin), 1);
        assert!(korn_constant(0).is_err());
        // the spherical direction bounds every quotient by 1
        let f = frequency_form([1, -1, 2]);
        let id = Mat3::identity().scale(c(1.0 / 3f64.sqrt()));
        assert!((f.value(&id) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crosscheck_small_grid() {
        let cc = grid_crosscheck(8, 1, 400).unwrap();
        assert!(cc.residual < 1e-6, "{cc:?}");
        let l = lambda_min(cc.dominant_frequency).0;
        assert!((l - cc.lambda_freq).abs() < 1e-8);
        assert!(grid_crosscheck(7, 1, 10).is_err());
        assert!(matches!(
            grid_crosscheck(8, 1, 3),
            Err(Error::NoConvergence(3, _))
        ));
    }

    #[test]
    fn equivalence_constant_is_sqrt3() {
        let e = equivalence_constant_with(4, 50).unwrap();
        assert!((e.value - 3f64.sqrt()).abs() < 1e-9);
        assert!(e.spread < 1e-9);
    }
}

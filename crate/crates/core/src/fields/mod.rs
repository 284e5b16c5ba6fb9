//! Tensor fields on the periodic cube `[0, 2π)³` stored as Fourier
//! coefficients, with exact spectral differential operators.
//!
//! A field of rank `r` holds `3^r` slots per frequency. Coefficients `c_k`
//! are normalised so that `f(x) = Σ_k c_k e^{i⟨k, x⟩}`; storage is
//! frequency-major in FFT index order (`(i0 · n + i1) · n + i2`, index `i`
//! meaning wavenumber `i` for `i ≤ n/2` and `i − n` above), with the tensor
//! slot innermost (row-major for matrices).
//!
//! Differentiation uses `∂ⱼ ↦ i kⱼ`, except that a first derivative along an
//! axis whose index sits at the Nyquist frequency `n/2` is zero. Band-limited
//! fields with `|k|∞ < n/2` are differentiated exactly.

mod boxdomain;
mod dump;
mod fft;

pub use boxdomain::{
    cutoff, cutoff_gradient, growth_ratio, halfspace_curl, halfspace_field, halfspace_ratio,
    halfspace_seminorms, BoxDomain, HalfspaceSeminorms,
};
pub use dump::{read_dump, write_dump, DUMP_MAGIC};

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftDirection;

use crate::algebra3::{anti, Mat3, Scalar, Vec3};
use crate::error::{Error, Result};
use crate::sampling;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub const MIN_N: usize = 4;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_N || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(n, Self::MIN_N));
        }
        Ok(GridSpec { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points (= number of frequencies).
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    pub fn axis_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    pub fn frequency(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        [
            self.wavenumber(idx / (n * n)),
            self.wavenumber((idx / n) % n),
            self.wavenumber(idx % n),
        ]
    }

    pub fn index_of(&self, k: [i64; 3]) -> usize {
        let n = self.n;
        (self.axis_index(k[0]) * n + self.axis_index(k[1])) * n + self.axis_index(k[2])
    }

    /// Whether any axis index of `idx` sits at the Nyquist frequency.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n].contains(&(n / 2))
    }

    /// Wavenumber used by first derivatives (Nyquist components zeroed).
    pub fn derivative_wavenumber(&self, idx: usize) -> Vec3 {
        let n = self.n;
        let ax = [idx / (n * n), (idx / n) % n, idx % n];
        Vec3(ax.map(|i| {
            if i == n / 2 {
                0.0
            } else {
                self.wavenumber(i) as f64
            }
        }))
    }

    /// Grid point `2π (i0, i1, i2) / n` for storage index `idx`.
    pub fn point(&self, idx: usize) -> Vec3 {
        let n = self.n;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        Vec3::new(
            (idx / (n * n)) as f64 * h,
            ((idx / n) % n) as f64 * h,
            (idx % n) as f64 * h,
        )
    }

    /// Volume element of the uniform rule on `[0, 2π)³`.
    pub fn cell_volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI / self.n as f64).powi(3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reality {
    Real,
    Complex,
}

impl Reality {
    pub fn as_str(self) -> &'static str {
        match self {
            Reality::Real => "real",
            Reality::Complex => "complex",
        }
    }

    fn join(self, other: Reality) -> Reality {
        if self == Reality::Real && other == Reality::Real {
            Reality::Real
        } else {
            Reality::Complex
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    rank: usize,
    reality: Reality,
    coeffs: Vec<Complex64>,
}

pub fn slots_for_rank(rank: usize) -> usize {
    3usize.pow(rank as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Grad,
    Div,
    CurlVec,
    CurlMat,
    Inc,
    SymCurl,
    DevSymCurl,
    DevCurl,
    Laplacian,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Grad => "Grad",
            OperatorKind::Div => "Div",
            OperatorKind::CurlVec => "CurlVec",
            OperatorKind::CurlMat => "CurlMat",
            OperatorKind::Inc => "Inc",
            OperatorKind::SymCurl => "SymCurl",
            OperatorKind::DevSymCurl => "DevSymCurl",
            OperatorKind::DevCurl => "DevCurl",
            OperatorKind::Laplacian => "Laplacian",
        }
    }
}

/// Pointwise structure imposed on [`random_bandlimited`] fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    General,
    Skew,
    Sym,
    SkewPlusSpherical,
}

impl GridField {
    pub fn zeros(spec: GridSpec, rank: usize, reality: Reality) -> Self {
        assert!(rank <= 2, "fields have rank 0, 1 or 2");
        GridField {
            spec,
            rank,
            reality,
            coeffs: vec![Complex64::new(0.0, 0.0); spec.len() * slots_for_rank(rank)],
        }
    }

    /// Builds a field from raw coefficients in storage order.
    pub fn from_coefficients(
        spec: GridSpec,
        rank: usize,
        reality: Reality,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        if rank > 2 || coeffs.len() != spec.len() * slots_for_rank(rank) {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for rank {rank} on n = {}",
                coeffs.len(),
                spec.n()
            )));
        }
        Ok(GridField {
            spec,
            rank,
            reality,
            coeffs,
        })
    }

    /// Forward transform of point values (point-major, slot innermost).
    pub fn from_samples(
        spec: GridSpec,
        rank: usize,
        reality: Reality,
        samples: &[Complex64],
    ) -> Result<Self> {
        let slots = slots_for_rank(rank);
        if samples.len() != spec.len() * slots {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for rank {rank} on n = {}",
                samples.len(),
                spec.n()
            )));
        }
        let mut field = GridField::zeros(spec, rank, reality);
        let scale = 1.0 / spec.len() as f64;
        let mut buf = vec![Complex64::new(0.0, 0.0); spec.len()];
        for s in 0..slots {
            for (p, b) in buf.iter_mut().enumerate() {
                *b = samples[p * slots + s];
            }
            fft::fft3(&mut buf, spec.n(), FftDirection::Forward);
            for (p, b) in buf.iter().enumerate() {
                field.coeffs[p * slots + s] = b * scale;
            }
        }
        Ok(field)
    }

    pub fn from_scalar_fn(spec: GridSpec, f: impl Fn(&Vec3) -> f64) -> Self {
        let samples: Vec<Complex64> = (0..spec.len())
            .map(|i| Complex64::from_real(f(&spec.point(i))))
            .collect();
        Self::from_samples(spec, 0, Reality::Real, &samples).expect("shape is consistent")
    }

    pub fn from_vector_fn(spec: GridSpec, f: impl Fn(&Vec3) -> Vec3) -> Self {
        let samples: Vec<Complex64> = (0..spec.len())
            .flat_map(|i| f(&spec.point(i)).0.map(Complex64::from_real))
            .collect();
        Self::from_samples(spec, 1, Reality::Real, &samples).expect("shape is consistent")
    }

    pub fn from_matrix_fn(spec: GridSpec, f: impl Fn(&Vec3) -> Mat3) -> Self {
        let samples: Vec<Complex64> = (0..spec.len())
            .flat_map(|i| f(&spec.point(i)).flatten().map(Complex64::from_real))
            .collect();
        Self::from_samples(spec, 2, Reality::Real, &samples).expect("shape is consistent")
    }

    /// Point values (point-major, slot innermost).
    pub fn samples(&self) -> Vec<Complex64> {
        let slots = self.slots();
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); self.spec.len()];
        for s in 0..slots {
            for (p, b) in buf.iter_mut().enumerate() {
                *b = self.coeffs[p * slots + s];
            }
            fft::fft3(&mut buf, self.spec.n(), FftDirection::Inverse);
            for (p, b) in buf.iter().enumerate() {
                out[p * slots + s] = *b;
            }
        }
        out
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn reality(&self) -> Reality {
        self.reality
    }

    pub fn slots(&self) -> usize {
        slots_for_rank(self.rank)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: [i64; 3], slot: usize) -> Complex64 {
        self.coeffs[self.spec.index_of(k) * self.slots() + slot]
    }

    /// Slot values at frequency index `idx`.
    pub fn at(&self, idx: usize) -> &[Complex64] {
        let s = self.slots();
        &self.coeffs[idx * s..(idx + 1) * s]
    }

    pub fn matrix_at(&self, idx: usize) -> Mat3<Complex64> {
        assert_eq!(self.rank, 2);
        Mat3::unflatten(self.at(idx))
    }

    pub fn vector_at(&self, idx: usize) -> Vec3<Complex64> {
        assert_eq!(self.rank, 1);
        let s = self.at(idx);
        Vec3([s[0], s[1], s[2]])
    }

    /// Largest defect `|c(−k) − conj c(k)|`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let slots = self.slots();
        let mut worst: f64 = 0.0;
        for idx in 0..self.spec.len() {
            let k = self.spec.frequency(idx);
            let mirror = self.spec.index_of([-k[0], -k[1], -k[2]]);
            for s in 0..slots {
                let d =
                    (self.coeffs[mirror * slots + s] - self.coeffs[idx * slots + s].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Hermitian L² norm of the coefficient vector (`= |f|_{L²} / (2π)^{3/2}`).
    pub fn coefficient_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Coefficient-norm of `self − other`, relative to the larger operand
    /// (absolute when both vanish).
    pub fn relative_distance(&self, other: &GridField) -> Result<f64> {
        self.check_same_shape(other)?;
        let diff: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = self.coefficient_norm().max(other.coefficient_norm());
        Ok(if scale == 0.0 { diff } else { diff / scale })
    }

    fn check_same_shape(&self, other: &GridField) -> Result<()> {
        if self.spec != other.spec || self.rank != other.rank {
            return Err(Error::ShapeMismatch(format!(
                "rank {} / n {} vs rank {} / n {}",
                self.rank,
                self.spec.n(),
                other.rank,
                other.spec.n()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &GridField) -> Result<GridField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridField) -> Result<GridField> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &GridField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<GridField> {
        self.check_same_shape(other)?;
        Ok(GridField {
            spec: self.spec,
            rank: self.rank,
            reality: self.reality.join(other.reality),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> GridField {
        GridField {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            ..self.clone()
        }
    }

    /// Applies a per-frequency linear map between slot vectors. The map must
    /// be real (commute with conjugation) for the result to keep a real tag.
    fn map_frequencies(
        &self,
        out_rank: usize,
        reality: Reality,
        f: impl Fn(usize, &[Complex64], &mut [Complex64]),
    ) -> GridField {
        let mut out = GridField::zeros(self.spec, out_rank, reality);
        let si = self.slots();
        let so = out.slots();
        for idx in 0..self.spec.len() {
            f(
                idx,
                &self.coeffs[idx * si..(idx + 1) * si],
                &mut out.coeffs[idx * so..(idx + 1) * so],
            );
        }
        out
    }

    fn map_matrices(&self, f: impl Fn(&Mat3<Complex64>) -> Mat3<Complex64>) -> Result<GridField> {
        self.expect_rank(2, "matrix map")?;
        Ok(self.map_frequencies(2, self.reality, |_, i, o| {
            o.copy_from_slice(&f(&Mat3::unflatten(i)).flatten())
        }))
    }

    fn expect_rank(&self, rank: usize, op: &'static str) -> Result<()> {
        if self.rank != rank {
            Err(Error::RankMismatch {
                op,
                rank: self.rank,
            })
        } else {
            Ok(())
        }
    }

    pub fn sym(&self) -> Result<GridField> {
        self.map_matrices(|m| m.sym())
    }

    pub fn skew(&self) -> Result<GridField> {
        self.map_matrices(|m| m.skew())
    }

    pub fn dev(&self) -> Result<GridField> {
        self.map_matrices(|m| m.dev())
    }

    pub fn dev_sym(&self) -> Result<GridField> {
        self.map_matrices(|m| m.dev_sym())
    }

    pub fn transpose(&self) -> Result<GridField> {
        self.map_matrices(|m| m.transpose())
    }

    pub fn trace(&self) -> Result<GridField> {
        self.expect_rank(2, "trace")?;
        Ok(self.map_frequencies(0, self.reality, |_, i, o| {
            o[0] = i[0] + i[4] + i[8];
        }))
    }

    /// `anti(a)` of a vector field.
    pub fn anti(&self) -> Result<GridField> {
        self.expect_rank(1, "anti")?;
        Ok(self.map_frequencies(2, self.reality, |_, i, o| {
            o.copy_from_slice(&anti(&Vec3([i[0], i[1], i[2]])).flatten())
        }))
    }

    /// `axl` of the skew part of a matrix field.
    pub fn axl(&self) -> Result<GridField> {
        self.expect_rank(2, "axl")?;
        Ok(self.map_frequencies(1, self.reality, |_, i, o| {
            let v = crate::algebra3::axl_unchecked(&Mat3::unflatten(i));
            o.copy_from_slice(&v.0);
        }))
    }

    /// `ζ · id` of a scalar field.
    pub fn times_identity(&self) -> Result<GridField> {
        self.expect_rank(0, "times_identity")?;
        Ok(self.map_frequencies(2, self.reality, |_, i, o| {
            o[0] = i[0];
            o[4] = i[0];
            o[8] = i[0];
        }))
    }

    /// Zeroes every coefficient for which `keep(idx)` is false.
    pub fn filter_frequencies(&self, keep: impl Fn(usize) -> bool) -> GridField {
        let mut out = self.clone();
        let s = self.slots();
        for idx in 0..self.spec.len() {
            if !keep(idx) {
                out.coeffs[idx * s..(idx + 1) * s].fill(Complex64::new(0.0, 0.0));
            }
        }
        out
    }

    /// Hermitian inner product `Σ conj(a) b` of coefficient vectors.
    pub fn inner(&self, other: &GridField) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest pointwise Frobenius / Hermitian magnitude over the grid.
    pub fn max_pointwise_norm(&self) -> f64 {
        let s = self.slots();
        self.samples()
            .chunks(s)
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Exact spectral differentiation.
pub fn apply_operator(f: &GridField, kind: OperatorKind) -> Result<GridField> {
    let spec = f.spec;
    let mismatch = || Error::RankMismatch {
        op: kind.name(),
        rank: f.rank,
    };
    let reality = f.reality;
    let k_of = |idx: usize| spec.derivative_wavenumber(idx).to_complex();
    let curl = |idx: usize, p: &Mat3<Complex64>| p.cross_right(&k_of(idx)).scale(-I);
    let out = match (kind, f.rank) {
        (OperatorKind::Grad, 0) => f.map_frequencies(1, reality, |idx, i, o| {
            let k = k_of(idx);
            for j in 0..3 {
                o[j] = I * k[j] * i[0];
            }
        }),
        (OperatorKind::Grad, 1) => f.map_frequencies(2, reality, |idx, i, o| {
            let k = k_of(idx);
            for a in 0..3 {
                for j in 0..3 {
                    o[3 * a + j] = I * k[j] * i[a];
                }
            }
        }),
        (OperatorKind::Div, 1) => f.map_frequencies(0, reality, |idx, i, o| {
            let k = k_of(idx);
            o[0] = I * (k[0] * i[0] + k[1] * i[1] + k[2] * i[2]);
        }),
        (OperatorKind::Div, 2) => f.map_frequencies(1, reality, |idx, i, o| {
            let k = k_of(idx);
            for a in 0..3 {
                o[a] = I * (k[0] * i[3 * a] + k[1] * i[3 * a + 1] + k[2] * i[3 * a + 2]);
            }
        }),
        (OperatorKind::CurlVec, 1) => f.map_frequencies(1, reality, |idx, i, o| {
            let v = k_of(idx).cross(&Vec3([i[0], i[1], i[2]])).scale(I);
            o.copy_from_slice(&v.0);
        }),
        (OperatorKind::CurlMat, 2) => f.map_frequencies(2, reality, |idx, i, o| {
            o.copy_from_slice(&curl(idx, &Mat3::unflatten(i)).flatten())
        }),
        (OperatorKind::Inc, 2) => f.map_frequencies(2, reality, |idx, i, o| {
            let c = curl(idx, &Mat3::unflatten(i)).transpose();
            o.copy_from_slice(&curl(idx, &c).flatten())
        }),
        (OperatorKind::SymCurl, 2) => f.map_frequencies(2, reality, |idx, i, o| {
            o.copy_from_slice(&curl(idx, &Mat3::unflatten(i)).sym().flatten())
        }),
        (OperatorKind::DevSymCurl, 2) => f.map_frequencies(2, reality, |idx, i, o| {
            o.copy_from_slice(&curl(idx, &Mat3::unflatten(i)).dev_sym().flatten())
        }),
        (OperatorKind::DevCurl, 2) => f.map_frequencies(2, reality, |idx, i, o| {
            o.copy_from_slice(&curl(idx, &Mat3::unflatten(i)).dev().flatten())
        }),
        (OperatorKind::Laplacian, r) => f.map_frequencies(r, reality, |idx, i, o| {
            let k = spec.derivative_wavenumber(idx);
            let ksq = -k.dot(&k);
            for (dst, src) in o.iter_mut().zip(i) {
                *dst = src * ksq;
            }
        }),
        _ => return Err(mismatch()),
    };
    Ok(out)
}

/// Uniform-rule `L^p` norm on `[0, 2π)³` of the pointwise Frobenius /
/// Hermitian magnitude, `p ∈ [1, 64]`.
pub fn lp_norm(f: &GridField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let s = f.slots();
    let samples = f.samples();
    let vals: Vec<f64> = samples
        .chunks(s)
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    Ok(scaled_lp(&vals, p, f.spec.cell_volume()))
}

/// `(Σ w |v|^p)^{1/p}` with uniform weight `w`, computed relative to the
/// maximum to avoid overflow for large `p`.
fn scaled_lp(values: &[f64], p: f64, weight: f64) -> f64 {
    let vmax = values.iter().copied().fold(0.0, f64::max);
    if vmax == 0.0 {
        return 0.0;
    }
    let sum: f64 = values.iter().map(|v| (v / vmax).powf(p)).sum();
    vmax * (sum * weight).powf(1.0 / p)
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(1.0..=64.0).contains(&p) {
        Err(Error::BadExponent(p))
    } else {
        Ok(())
    }
}

fn project_structure(m: &Mat3<Complex64>, structure: Structure) -> Mat3<Complex64> {
    match structure {
        Structure::General => *m,
        Structure::Skew => m.skew(),
        Structure::Sym => m.sym(),
        Structure::SkewPlusSpherical => {
            m.skew() + Mat3::identity().scale(m.trace() * Complex64::from_real(1.0 / 3.0))
        }
    }
}

/// Random real field of the given rank supported on `|k|∞ ≤ kmax`.
pub fn random_bandlimited_rank(
    spec: GridSpec,
    seed: u64,
    kmax: usize,
    rank: usize,
) -> Result<GridField> {
    let n = spec.n();
    if kmax + 1 > n / 2 {
        return Err(Error::BandTooWide { kmax, n });
    }
    let mut rng = sampling::rng(seed);
    let mut field = GridField::zeros(spec, rank, Reality::Real);
    let slots = field.slots();
    let km = kmax as i64;
    // Fill in lexicographic frequency order so the stream is independent of
    // the storage layout.
    for k0 in -km..=km {
        for k1 in -km..=km {
            for k2 in -km..=km {
                let idx = spec.index_of([k0, k1, k2]);
                for s in 0..slots {
                    let re: f64 = rng.random_range(-1.0..1.0);
                    let im: f64 = rng.random_range(-1.0..1.0);
                    field.coeffs[idx * slots + s] = Complex64::new(re, im);
                }
            }
        }
    }
    // Hermitian symmetrisation c(k) ← ½ (c(k) + conj c(−k)).
    let orig = field.coeffs.clone();
    for idx in 0..spec.len() {
        let k = spec.frequency(idx);
        let mirror = spec.index_of([-k[0], -k[1], -k[2]]);
        for s in 0..slots {
            field.coeffs[idx * slots + s] =
                (orig[idx * slots + s] + orig[mirror * slots + s].conj()) * 0.5;
        }
    }
    Ok(field)
}

/// Random real rank-2 field on `|k|∞ ≤ kmax` with the requested pointwise
/// structure.
pub fn random_bandlimited(
    spec: GridSpec,
    seed: u64,
    kmax: usize,
    structure: Structure,
) -> Result<GridField> {
    let f = random_bandlimited_rank(spec, seed, kmax, 2)?;
    f.map_matrices(|m| project_structure(m, structure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn grid_spec_validation() {
        assert!(matches!(GridSpec::new(7), Err(Error::InvalidGrid(7, 4))));
        assert!(GridSpec::new(2).is_err());
        let s = spec(8);
        assert_eq!(s.frequency(s.index_of([-3, 4, 1])), [-3, 4, 1]);
        assert!(s.is_nyquist(s.index_of([4, 0, 0])));
        assert!(!s.is_nyquist(s.index_of([3, -3, 0])));
    }

    #[test]
    fn samples_roundtrip() {
        let s = spec(8);
        let f = GridField::from_scalar_fn(s, |x| (x[0]).sin() + (2.0 * x[2]).cos());
        assert!((f.coefficient([1, 0, 0], 0) - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        assert!((f.coefficient([0, 0, 2], 0) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        let back = GridField::from_samples(s, 0, Reality::Real, &f.samples()).unwrap();
        assert!(back.relative_distance(&f).unwrap() < 1e-14);
        assert!(f.conjugate_symmetry_defect() < 1e-14);
    }

    #[test]
    fn curl_of_constant_is_zero() {
        let s = spec(8);
        let m = Mat3([[1.0, 2.0, 3.0], [0.5, -1.0, 4.0], [2.0, 0.0, 1.0]]);
        let f = GridField::from_matrix_fn(s, |_| m);
        let c = apply_operator(&f, OperatorKind::CurlMat).unwrap();
        assert!(c.coefficient_norm() < 1e-14);
    }

    #[test]
    fn curl_of_skew_sine_field() {
        // A = anti((0, 0, sin x1)) ⇒ Curl A = div a · id − (D a)ᵀ = −cos x1 · e1 ⊗ e3
        let s = spec(16);
        let a = GridField::from_matrix_fn(s, |x| anti(&Vec3::new(0.0, 0.0, x[0].sin())));
        let got = apply_operator(&a, OperatorKind::CurlMat).unwrap();
        let expect = GridField::from_matrix_fn(s, |x| Mat3::unit(0, 2).scale(-x[0].cos()));
        assert!(got.relative_distance(&expect).unwrap() < 1e-13);
    }

    #[test]
    fn inc_of_spherical_cosine() {
        // inc(ζ id) = Δζ id − D²ζ with ζ = cos x2 ⇒ −cos x2 · diag(1, 0, 1)
        let s = spec(16);
        let z = GridField::from_scalar_fn(s, |x| x[1].cos());
        let got = apply_operator(&z.times_identity().unwrap(), OperatorKind::Inc).unwrap();
        let expect = GridField::from_matrix_fn(s, |x| Mat3::diag(1.0, 0.0, 1.0).scale(-x[1].cos()));
        assert!(got.relative_distance(&expect).unwrap() < 1e-13);
    }

    #[test]
    fn rank_mismatch() {
        let s = spec(8);
        let z = GridField::zeros(s, 0, Reality::Real);
        assert!(matches!(
            apply_operator(&z, OperatorKind::CurlMat),
            Err(Error::RankMismatch {
                op: "CurlMat",
                rank: 0
            })
        ));
        let m = GridField::zeros(s, 2, Reality::Real);
        assert!(apply_operator(&m, OperatorKind::Grad).is_err());
        assert!(apply_operator(&m, OperatorKind::CurlVec).is_err());
    }

    #[test]
    fn lp_norm_examples() {
        let s = spec(16);
        let c = GridField::from_scalar_fn(s, |_| -2.5);
        for p in [1.0, 2.0, 3.5] {
            let expect = 2.5 * (2.0 * PI).powf(3.0 / p);
            assert!((lp_norm(&c, p).unwrap() - expect).abs() < 1e-12 * expect);
        }
        let f = GridField::from_scalar_fn(s, |x| x[0].sin());
        let expect = (4.0 * PI.powi(3)).sqrt();
        assert!((lp_norm(&f, 2.0).unwrap() - expect).abs() < 1e-12 * expect);
        assert!(matches!(lp_norm(&f, 0.5), Err(Error::BadExponent(_))));
        assert!(matches!(lp_norm(&f, 65.0), Err(Error::BadExponent(_))));
    }

    #[test]
    fn random_bandlimited_properties() {
        let s = spec(16);
        let a = random_bandlimited(s, 3, 4, Structure::General).unwrap();
        let b = random_bandlimited(s, 3, 4, Structure::General).unwrap();
        assert_eq!(a, b);
        assert!(a.conjugate_symmetry_defect() < 1e-12);
        for idx in 0..s.len() {
            let k = s.frequency(idx);
            if k.iter().any(|c| c.abs() > 4) {
                assert!(a.at(idx).iter().all(|z| z.norm() == 0.0));
            }
        }

        let skew = random_bandlimited(s, 5, 4, Structure::Skew).unwrap();
        assert!(skew.sym().unwrap().max_pointwise_norm() < 1e-12);

        let c = random_bandlimited(s, 5, 0, Structure::General).unwrap();
        let vals = c.samples();
        for p in 1..s.len() {
            for j in 0..9 {
                assert!((vals[p * 9 + j] - vals[j]).norm() < 1e-14);
            }
        }
        assert!(matches!(
            random_bandlimited(s, 1, 8, Structure::Sym),
            Err(Error::BandTooWide { kmax: 8, n: 16 })
        ));
    }
}

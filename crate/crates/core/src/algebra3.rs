//! Exact 3×3 matrix and vector algebra over real or complex scalars.
//!
//! All pairings are bilinear: `⟨a, b⟩ = Σ aᵢ bᵢ` and `⟨P, Q⟩ = Σ Pᵢⱼ Qᵢⱼ`,
//! without complex conjugation. Magnitudes of complex objects are measured
//! with the separate Hermitian norms [`Vec3::norm`] and [`Mat3::norm`].
//!
//! Matrices are stored row-major; [`Mat3::flatten`] and [`Mat3::unflatten`]
//! fix the 9-vector ordering `(P11, P12, P13, P21, …, P33)` used by every
//! symbol matrix in [`crate::symbol`].

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Skew tolerance for [`axl`] on unit-scale input.
pub const TAU_SKEW: f64 = 1e-9;
/// Threshold below which a direction vector counts as zero.
pub const TAU_ZERO: f64 = 1e-9;
/// Allowed deviation from unit length in [`tangential_projector`].
pub const TAU_UNIT: f64 = 1e-9;

/// Field of scalars the algebra is generic over (`f64` or [`Complex64`]).
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    /// `|z|²`
    fn abs_sqr(self) -> f64;
    fn re(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn abs_sqr(self) -> f64 {
        self * self
    }
    fn re(self) -> f64 {
        self
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn re(self) -> f64 {
        self.re
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T = f64>(pub [T; 3]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<T = f64>(pub [[T; 3]; 3]);

impl<T: Scalar> Default for Vec3<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> Default for Mat3<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([T::zero(); 3])
    }

    /// Unit vector `e_{i+1}`.
    pub fn unit(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = T::one();
        v
    }

    /// Bilinear pairing `Σ aᵢ bᵢ`.
    pub fn dot(&self, other: &Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Self) -> Self {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    /// Dyadic product `a ⊗ b` with entries `aᵢ bⱼ`.
    pub fn outer(&self, other: &Self) -> Mat3<T> {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i] * other.0[j];
            }
        }
        m
    }

    /// Hermitian length `(Σ |aᵢ|²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x.abs_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Vec3(self.0.map(|x| x * s))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Vec3<U> {
        Vec3(self.0.map(f))
    }
}

impl Vec3<f64> {
    pub fn to_complex(&self) -> Vec3<Complex64> {
        self.map(Complex64::from_real)
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec3(self.0.map(|x| -x))
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Scalar> Mat3<T> {
    pub fn zero() -> Self {
        Mat3([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one(), T::one())
    }

    pub fn diag(a: T, b: T, c: T) -> Self {
        let mut m = Self::zero();
        m.0[0][0] = a;
        m.0[1][1] = b;
        m.0[2][2] = c;
        m
    }

    pub fn from_rows(rows: [[T; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3(self.0[i])
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Mat3(self.0.map(|r| r.map(Scalar::conj)))
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn sym(&self) -> Self {
        (*self + self.transpose()).scale(T::from_real(0.5))
    }

    pub fn skew(&self) -> Self {
        (*self - self.transpose()).scale(T::from_real(0.5))
    }

    /// Trace-free part `X − ⅓ tr X · id`.
    pub fn dev(&self) -> Self {
        *self - Self::identity().scale(self.trace() * T::from_real(1.0 / 3.0))
    }

    pub fn dev_sym(&self) -> Self {
        self.sym().dev()
    }

    /// Bilinear Frobenius pairing `Σ Pᵢⱼ Qᵢⱼ`.
    pub fn pairing(&self, other: &Self) -> T {
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[i][j];
            }
        }
        s
    }

    /// Hermitian Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.abs_sqr()).sum()
    }

    pub fn scale(&self, s: T) -> Self {
        Mat3(self.0.map(|r| r.map(|x| x * s)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for k in 0..3 {
                    s += self.0[i][k] * other.0[k][j];
                }
                m.0[i][j] = s;
            }
        }
        m
    }

    pub fn apply(&self, v: &Vec3<T>) -> Vec3<T> {
        Vec3([self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v)])
    }

    /// Row-wise cross product `P × b = P · anti(b)`.
    pub fn cross_right(&self, b: &Vec3<T>) -> Self {
        self.matmul(&anti(b))
    }

    /// Column-wise cross product `b × P = anti(b) · P`.
    pub fn cross_left(&self, b: &Vec3<T>) -> Self {
        anti(b).matmul(self)
    }

    /// Row-major 9-vector.
    pub fn flatten(&self) -> [T; 9] {
        let mut out = [T::zero(); 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.0[i][j];
            }
        }
        out
    }

    pub fn unflatten(v: &[T]) -> Self {
        assert_eq!(v.len(), 9, "Mat3::unflatten needs 9 entries");
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = v[3 * i + j];
            }
        }
        m
    }

    /// Matrix unit `e_i ⊗ e_j`.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = Self::zero();
        m.0[i][j] = T::one();
        m
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Mat3<U> {
        Mat3(self.0.map(|r| r.map(&f)))
    }
}

impl Mat3<f64> {
    pub fn to_complex(&self) -> Mat3<Complex64> {
        self.map(Complex64::from_real)
    }
}

impl Mat3<Complex64> {
    pub fn re(&self) -> Mat3<f64> {
        self.map(|z| z.re)
    }
    pub fn im(&self) -> Mat3<f64> {
        self.map(|z| z.im)
    }
}

impl<T: Scalar> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl<T: Scalar> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}

impl<T: Scalar> Neg for Mat3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Mat3(self.0.map(|r| r.map(|x| -x)))
    }
}

impl<T: Scalar> Mul<T> for Mat3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Scalar> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.matmul(&o)
    }
}

/// Skew matrix with `anti(a) · b = a × b`.
pub fn anti<T: Scalar>(a: &Vec3<T>) -> Mat3<T> {
    let [a1, a2, a3] = a.0;
    let z = T::zero();
    Mat3([[z, -a3, a2], [a3, z, -a1], [-a2, a1, z]])
}

/// Axial vector `(−A23, A13, −A12)` of a skew matrix.
pub fn axl<T: Scalar>(a: &Mat3<T>) -> Result<Vec3<T>> {
    let defect = (*a + a.transpose()).norm();
    if defect > TAU_SKEW * a.norm().max(1.0) {
        return Err(Error::NotSkew(defect));
    }
    Ok(axl_unchecked(a))
}

/// `axl` applied to the skew part without validation.
pub fn axl_unchecked<T: Scalar>(a: &Mat3<T>) -> Vec3<T> {
    let s = a.skew();
    Vec3([-s.0[1][2], s.0[0][2], -s.0[0][1]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `b × P = anti(b) P` (acts on columns)
    Left,
    /// `P × b = P anti(b)` (acts on rows)
    Right,
}

pub fn cross<T: Scalar>(p: &Mat3<T>, b: &Vec3<T>, side: Side) -> Mat3<T> {
    match side {
        Side::Left => p.cross_left(b),
        Side::Right => p.cross_right(b),
    }
}

/// `X = dev sym X + skew X + sphere · id`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthSplit<T = f64> {
    pub devsym_part: Mat3<T>,
    pub skew_part: Mat3<T>,
    pub sphere_part: T,
}

impl<T: Scalar> OrthSplit<T> {
    pub fn reassemble(&self) -> Mat3<T> {
        self.devsym_part + self.skew_part + Mat3::identity().scale(self.sphere_part)
    }
}

pub fn orth_decompose<T: Scalar>(x: &Mat3<T>) -> OrthSplit<T> {
    OrthSplit {
        devsym_part: x.dev_sym(),
        skew_part: x.skew(),
        sphere_part: x.trace() * T::from_real(1.0 / 3.0),
    }
}

/// Inverse of `a ↦ dev sym(anti(a) × b)` for fixed real `b ≠ 0`:
/// `L_b M = (2/|b|²)(M b − ¼ ⟨M b, b⟩/|b|² · b)`.
pub fn recover_axial(m: &Mat3<f64>, b: &Vec3<f64>) -> Result<Vec3<f64>> {
    let bn = b.norm();
    if bn < TAU_ZERO {
        return Err(Error::ZeroDirection(bn));
    }
    let defect = (*m - m.dev_sym()).norm();
    if defect > TAU_SKEW * m.norm().max(1.0) {
        return Err(Error::NotTracelessSym(defect));
    }
    let bb = bn * bn;
    let mb = m.apply(b);
    let corr = 0.25 * mb.dot(b) / bb;
    Ok((mb - b.scale(corr)).scale(2.0 / bb))
}

/// Projector `id − ν ⊗ ν` onto the plane orthogonal to a unit normal.
pub fn tangential_projector(nu: &Vec3<f64>) -> Result<Mat3<f64>> {
    let n = nu.norm();
    if (n - 1.0).abs() > TAU_UNIT {
        return Err(Error::NotUnit(n));
    }
    Ok(Mat3::identity() - nu.outer(nu))
}

/// Rotation matrix of a (not necessarily normalised) quaternion `w + xi + yj + zk`.
pub fn rotation_from_quaternion(q: [f64; 4]) -> Mat3<f64> {
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|c| c / n);
    Mat3([
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ])
}

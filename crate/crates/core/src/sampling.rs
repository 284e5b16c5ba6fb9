//! Seeded random inputs for tests, the identity suite and the CLI.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra3::{anti, rotation_from_quaternion, Mat3, Vec3};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1)`.
pub fn vec3(rng: &mut impl Rng) -> Vec3 {
    Vec3(std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
}

pub fn mat3(rng: &mut impl Rng) -> Mat3 {
    Mat3(std::array::from_fn(|_| {
        std::array::from_fn(|_| rng.random_range(-1.0..1.0))
    }))
}

pub fn sym3(rng: &mut impl Rng) -> Mat3 {
    mat3(rng).sym()
}

pub fn skew3(rng: &mut impl Rng) -> Mat3 {
    anti(&vec3(rng))
}

pub fn complex_mat3(rng: &mut impl Rng) -> Mat3<Complex64> {
    let re = mat3(rng);
    let im = mat3(rng);
    Mat3(std::array::from_fn(|i| {
        std::array::from_fn(|j| Complex64::new(re.0[i][j], im.0[i][j]))
    }))
}

/// Uniform point on the unit sphere (Archimedes' projection).
pub fn unit_vec3(rng: &mut impl Rng) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Haar-uniform rotation from a uniformly distributed unit quaternion
/// (Shoemake's subgroup algorithm).
pub fn rotation(rng: &mut impl Rng) -> Mat3 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random_range(0.0..2.0 * PI);
    let u3: f64 = rng.random_range(0.0..2.0 * PI);
    let a = (1.0 - u1).sqrt();
    let b = u1.sqrt();
    rotation_from_quaternion([a * u2.sin(), a * u2.cos(), b * u3.sin(), b * u3.cos()])
}

/// `count` points uniform in `[-1, 1]³`, resampling any candidate that makes
/// four chosen points coplanar within `tol` (volume of the tetrahedron).
pub fn general_position_points(rng: &mut impl Rng, count: usize, tol: f64) -> Vec<Vec3> {
    let mut pts: Vec<Vec3> = Vec::with_capacity(count);
    while pts.len() < count {
        let cand = vec3(rng);
        if creates_coplanar_quadruple(&pts, &cand, tol) {
            continue;
        }
        pts.push(cand);
    }
    pts
}

fn creates_coplanar_quadruple(pts: &[Vec3], cand: &Vec3, tol: f64) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let u = pts[i] - *cand;
                let v = pts[j] - *cand;
                let w = pts[k] - *cand;
                if u.cross(&v).dot(&w).abs() < tol {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a = mat3(&mut rng(7));
        let b = mat3(&mut rng(7));
        assert_eq!(a, b);
        assert_ne!(a, mat3(&mut rng(8)));
    }

    #[test]
    fn sampled_rotations_are_proper() {
        let mut r = rng(3);
        for _ in 0..100 {
            let q = rotation(&mut r);
            assert!((q.matmul(&q.transpose()) - Mat3::identity()).norm() < 1e-14);
            let det = q.row(0).cross(&q.row(1)).dot(&q.row(2));
            assert!((det - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn general_position_has_no_coplanar_quadruples() {
        let pts = general_position_points(&mut rng(1), 12, 1e-6);
        assert_eq!(pts.len(), 12);
        for (i, p) in pts.iter().enumerate() {
            assert!(!creates_coplanar_quadruple(&pts[..i], p, 1e-6));
        }
    }
}

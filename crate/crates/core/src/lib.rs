//! Numerical laboratory for incompatible tensor fields in three dimensions.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra3`]: exact 3×3 matrix / vector algebra (`anti`, `axl`, matrix
//!   cross products, orthogonal splits), generic over real and complex scalars.
//! * [`symbol`]: Fourier symbols of `Curl`, `sym Curl` and `dev sym Curl` as
//!   linear maps on 3×3 complex matrices, their kernels, the degree-zero
//!   multiplier and the sharp `sym`/`dev sym` ratio.
//! * [`fields`]: band-limited tensor fields on the periodic cube `[0, 2π)³`
//!   with spectral differential operators, plus box-domain quadrature
//!   experiments for non-periodic test objects.
//! * [`kernels`]: the finite-dimensional kernel spaces of `(sym, sym Curl)` and
//!   `(sym, dev sym Curl)` on skew fields and the conformal Killing fields.
//! * [`korn`]: per-frequency Rayleigh-quotient estimation of the periodic
//!   Korn constant with a full-grid Lanczos cross-check.
//! * [`identities`]: the randomized identity suite used by the CLI and the
//!   acceptance tests.

pub mod algebra3;
pub mod error;
pub mod fields;
pub mod identities;
pub mod kernels;
pub mod korn;
pub mod quadrature;
pub mod sampling;
pub mod symbol;

pub use algebra3::{Mat3, Scalar, Side, Vec3};
pub use error::{Error, Result};
pub use num_complex::Complex64;

//! Randomised verification of the pointwise tensor-algebra identities and
//! their differential counterparts on the torus.
//!
//! Every identity reports its worst relative residual over the sampled
//! inputs; the tolerance table is [`catalog`].

use rayon::prelude::*;

use crate::algebra3::{anti, axl_unchecked, recover_axial, Mat3, Vec3};
use crate::error::Result;
use crate::fields::{
    apply_operator, random_bandlimited, random_bandlimited_rank, GridField, GridSpec, OperatorKind,
    Structure,
};
use crate::sampling;

pub const ALGEBRA_TOL: f64 = 1e-12;
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Grid size and band of the random fields in the spectral checks.
pub const SPECTRAL_N: usize = 16;
pub const SPECTRAL_KMAX: usize = SPECTRAL_N / 4;
/// Random fields drawn per spectral identity.
pub const SPECTRAL_FIELDS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Algebra,
    Spectral,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Algebra => "algebra",
            Family::Spectral => "spectral",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentitySpec {
    pub name: &'static str,
    /// The identity as a formula.
    pub reference: &'static str,
    pub family: Family,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityResult {
    pub name: &'static str,
    pub reference: &'static str,
    pub family: Family,
    pub samples: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    /// Set when a sample could not be evaluated.
    pub error: Option<String>,
}

impl IdentityResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.max_residual < self.tolerance
    }
}

struct AlgebraSample {
    a: Vec3,
    b: Vec3,
    c: Vec3,
    p: Mat3,
    s: Mat3,
    w: Mat3,
    r: Mat3,
}

/// `(absolute residual, scale)`; the relative residual is their ratio.
type AlgebraCheck = fn(&AlgebraSample) -> (f64, f64);

fn d(x: Mat3, y: Mat3) -> f64 {
    (x - y).norm()
}

fn dv(x: Vec3, y: Vec3) -> f64 {
    (x - y).norm()
}

fn id() -> Mat3 {
    Mat3::identity()
}

fn algebra_checks() -> Vec<(&'static str, &'static str, AlgebraCheck)> {
    vec![
        ("cross_as_axl", "a×b = axl(b⊗a − a⊗b)", |x| {
            let lhs = x.a.cross(&x.b);
            let rhs = axl_unchecked(&(x.b.outer(&x.a) - x.a.outer(&x.b)));
            (dv(lhs, rhs), x.a.norm() * x.b.norm())
        }),
        ("skew_dyad", "2 skew(a⊗b) = −anti(a×b)", |x| {
            let lhs = x.a.outer(&x.b).skew().scale(2.0);
            let rhs = -anti(&x.a.cross(&x.b));
            (d(lhs, rhs), x.a.norm() * x.b.norm())
        }),
        ("cross_orthogonal", "⟨a×b, b⟩ = 0, b×b = 0", |x| {
            let r = x.a.cross(&x.b).dot(&x.b).abs() + x.b.cross(&x.b).norm();
            (r, x.a.norm() * x.b.norm() * x.b.norm())
        }),
        ("anti_action", "anti(a)b = a×b = −anti(b)a", |x| {
            let ab = x.a.cross(&x.b);
            let r = dv(anti(&x.a).apply(&x.b), ab) + dv(-anti(&x.b).apply(&x.a), ab);
            (r, x.a.norm() * x.b.norm())
        }),
        ("skew_action", "A b = (axl A)×b", |x| {
            let r = dv(x.w.apply(&x.b), axl_unchecked(&x.w).cross(&x.b));
            (r, x.w.norm() * x.b.norm())
        }),
        (
            "dyad_action",
            "(b⊗a)b = ⟨a,b⟩b = ‖b‖²a + (a×b)×b",
            |x| {
                let lhs = x.b.outer(&x.a).apply(&x.b);
                let mid = x.b.scale(x.a.dot(&x.b));
                let rhs = x.a.scale(x.b.dot(&x.b)) + x.a.cross(&x.b).cross(&x.b);
                (dv(lhs, mid) + dv(mid, rhs), x.a.norm() * x.b.norm().powi(2))
            },
        ),
        (
            "matrix_cross",
            "P×b = P anti(b) = −(anti(b) Pᵀ)ᵀ",
            |x| {
                let lhs = x.p.cross_right(&x.b);
                let r = d(lhs, x.p.matmul(&anti(&x.b)))
                    + d(lhs, -anti(&x.b).matmul(&x.p.transpose()).transpose());
                (r, x.p.norm() * x.b.norm())
            },
        ),
        ("identity_cross", "id×b = anti(b)", |x| {
            (d(id().cross_right(&x.b), anti(&x.b)), x.b.norm())
        }),
        (
            "dyad_cross",
            "(a⊗b)×b = 0, ½(b⊗a)×b = sym(a⊗b)×b = −skew(a⊗b)×b = −b⊗axl skew(a⊗b)",
            |x| {
                let ab = x.a.outer(&x.b);
                let half = x.b.outer(&x.a).cross_right(&x.b).scale(0.5);
                let r = ab.cross_right(&x.b).norm()
                    + d(half, ab.sym().cross_right(&x.b))
                    + d(half, -ab.skew().cross_right(&x.b))
                    + d(half, -x.b.outer(&axl_unchecked(&ab.skew())));
                (r, x.a.norm() * x.b.norm().powi(2))
            },
        ),
        ("room_anti", "anti(a)×b = b⊗a − ⟨b,a⟩ id", |x| {
            let lhs = anti(&x.a).cross_right(&x.b);
            let rhs = x.b.outer(&x.a) - id().scale(x.b.dot(&x.a));
            (d(lhs, rhs), x.a.norm() * x.b.norm())
        }),
        (
            "room_skew",
            "(axl A)⊗b = (A×b)ᵀ − ½tr(A×b) id",
            |x| {
                let axb = x.w.cross_right(&x.b);
                let rhs = axb.transpose() - id().scale(0.5 * axb.trace());
                (
                    d(axl_unchecked(&x.w).outer(&x.b), rhs),
                    x.w.norm() * x.b.norm(),
                )
            },
        ),
        ("trace_skew_cross", "tr(A×b) = −2⟨axl A, b⟩", |x| {
            let r = (x.w.cross_right(&x.b).trace() + 2.0 * axl_unchecked(&x.w).dot(&x.b)).abs();
            (r, x.w.norm() * x.b.norm())
        }),
        (
            "anti_products",
            "anti(a)anti(b) = b⊗a − ⟨b,a⟩ id, anti(b)³ = −‖b‖² anti(b)",
            |x| {
                let ab = anti(&x.a).matmul(&anti(&x.b));
                let bb = anti(&x.b);
                let r = d(ab, x.b.outer(&x.a) - id().scale(x.a.dot(&x.b)))
                    / (x.a.norm() * x.b.norm())
                    + d(bb.matmul(&bb).matmul(&bb), bb.scale(-x.b.dot(&x.b))) / x.b.norm().powi(3);
                (r, 1.0)
            },
        ),
        (
            "trace_sym_cross",
            "tr(S×b) = 0, tr(anti(a)×b) = −2⟨a,b⟩",
            |x| {
                let r = x.s.cross_right(&x.b).trace().abs() / x.s.norm()
                    + (anti(&x.a).cross_right(&x.b).trace() + 2.0 * x.a.dot(&x.b)).abs()
                        / x.a.norm();
                (r, x.b.norm())
            },
        ),
        (
            "double_cross",
            "(P×b)ᵀ×b = −anti(b) Pᵀ anti(b)",
            |x| {
                let lhs = x.p.cross_right(&x.b).transpose().cross_right(&x.b);
                let rhs = -anti(&x.b).matmul(&x.p.transpose()).matmul(&anti(&x.b));
                (d(lhs, rhs), x.p.norm() * x.b.norm().powi(2))
            },
        ),
        (
            "double_cross_identity",
            "(id×b)ᵀ×b = ‖b‖² id − b⊗b",
            |x| {
                let lhs = id().cross_right(&x.b).transpose().cross_right(&x.b);
                let rhs = id().scale(x.b.dot(&x.b)) - x.b.outer(&x.b);
                (d(lhs, rhs), x.b.norm().powi(2))
            },
        ),
        (
            "double_cross_dyad",
            "((b⊗a)×b)ᵀ×b = 0 and likewise for sym(a⊗b), skew(a⊗b)",
            |x| {
                let f = |m: Mat3| m.cross_right(&x.b).transpose().cross_right(&x.b).norm();
                let ab = x.a.outer(&x.b);
                let r = f(x.b.outer(&x.a)) + f(ab.sym()) + f(ab.skew());
                (r, x.a.norm() * x.b.norm().powi(3))
            },
        ),
        (
            "double_cross_anti",
            "(anti(a)×b)ᵀ×b = −⟨b,a⟩ anti(b)",
            |x| {
                let lhs = anti(&x.a).cross_right(&x.b).transpose().cross_right(&x.b);
                let rhs = anti(&x.b).scale(-x.b.dot(&x.a));
                (d(lhs, rhs), x.a.norm() * x.b.norm().powi(2))
            },
        ),
        (
            "double_cross_sym",
            "(S×b)ᵀ×b = S(b⊗b) + (b⊗b)S − ‖b‖²S − tr(S) b⊗b + (‖b‖² tr S − ⟨S, b⊗b⟩) id",
            |x| {
                let bb = x.b.outer(&x.b);
                let nb = x.b.dot(&x.b);
                let lhs = x.s.cross_right(&x.b).transpose().cross_right(&x.b);
                let rhs = x.s.matmul(&bb) + bb.matmul(&x.s) - x.s.scale(nb) - bb.scale(x.s.trace())
                    + id().scale(nb * x.s.trace() - x.s.pairing(&bb));
                let asym = (lhs - lhs.transpose()).norm();
                (d(lhs, rhs) + asym, x.s.norm() * nb)
            },
        ),
        (
            "dev_cross",
            "dev(P×b) = P×b + ⅔⟨axl skew P, b⟩ id",
            |x| {
                let pb = x.p.cross_right(&x.b);
                let rhs = pb + id().scale(2.0 / 3.0 * axl_unchecked(&x.p.skew()).dot(&x.b));
                (d(pb.dev(), rhs), x.p.norm() * x.b.norm())
            },
        ),
        (
            "double_cross_transpose",
            "[(P×b)ᵀ×b]ᵀ = (Pᵀ×b)ᵀ×b, sym and skew commute with it",
            |x| {
                let f = |m: Mat3| m.cross_right(&x.b).transpose().cross_right(&x.b);
                let r = d(f(x.p).transpose(), f(x.p.transpose()))
                    + d(f(x.p).sym(), f(x.p.sym()))
                    + d(f(x.p).skew(), f(x.p.skew()));
                (r, x.p.norm() * x.b.norm().powi(2))
            },
        ),
        ("triple_cross_trace", "tr[((S×b)×b)ᵀ×b] = 0", |x| {
            let m =
                x.s.cross_right(&x.b)
                    .cross_right(&x.b)
                    .transpose()
                    .cross_right(&x.b);
            (m.trace().abs(), x.s.norm() * x.b.norm().powi(3))
        }),
        ("cross_adjoint", "⟨a×b, c⟩ = −⟨a, c×b⟩", |x| {
            let r = (x.a.cross(&x.b).dot(&x.c) + x.a.dot(&x.c.cross(&x.b))).abs();
            (r, x.a.norm() * x.b.norm() * x.c.norm())
        }),
        (
            "devsym_anti_bounds",
            "½‖a‖²‖b‖² ≤ ‖dev sym(anti(a)×b)‖² ≤ ⅔‖a‖²‖b‖²",
            |x| {
                let q = anti(&x.a).cross_right(&x.b).dev_sym().norm_sqr();
                let s = x.a.dot(&x.a) * x.b.dot(&x.b);
                ((0.5 * s - q).max(0.0) + (q - 2.0 / 3.0 * s).max(0.0), s)
            },
        ),
        (
            "devsym_sym_equivalence",
            "‖b‖² sym(P×b) = ‖b‖² dev sym(P×b) − ⟨b, dev sym(P×b) b⟩ id",
            |x| {
                let pb = x.p.cross_right(&x.b);
                let ds = pb.dev_sym();
                let nb = x.b.dot(&x.b);
                let rhs = ds.scale(nb) - id().scale(x.b.dot(&ds.apply(&x.b)));
                (d(pb.sym().scale(nb), rhs), x.p.norm() * nb * x.b.norm())
            },
        ),
        (
            "devsym_sym_bounds",
            "‖dev sym(P×b)‖ ≤ ‖sym(P×b)‖ ≤ (1+√3)‖dev sym(P×b)‖",
            |x| {
                let pb = x.p.cross_right(&x.b);
                let (s, ds) = (pb.sym().norm(), pb.dev_sym().norm());
                (
                    (ds - s).max(0.0) + (s - (1.0 + 3f64.sqrt()) * ds).max(0.0),
                    x.p.norm() * x.b.norm(),
                )
            },
        ),
        (
            "dev_cross_bound",
            "‖dev(P×b)‖ ≤ ‖P×b‖ ≤ √3 ‖dev(P×b)‖",
            |x| {
                let pb = x.p.cross_right(&x.b);
                let (f, dn) = (pb.norm(), pb.dev().norm());
                (
                    (dn - f).max(0.0) + (f - 3f64.sqrt() * dn).max(0.0),
                    x.p.norm() * x.b.norm(),
                )
            },
        ),
        (
            "recover_axial_roundtrip",
            "a = L_b dev sym(anti(a)×b)",
            |x| {
                let m = anti(&x.a).cross_right(&x.b).dev_sym();
                let got = recover_axial(&m, &x.b).expect("b is non-zero");
                (dv(got, x.a), x.a.norm())
            },
        ),
        (
            "rotation_equivariance",
            "anti(Ra) = R anti(a) Rᵀ, ‖dev sym(anti(Ra)×Rb)‖ = ‖dev sym(anti(a)×b)‖",
            |x| {
                let ra = x.r.apply(&x.a);
                let rb = x.r.apply(&x.b);
                let r1 = d(anti(&ra), x.r.matmul(&anti(&x.a)).matmul(&x.r.transpose()));
                let r2 = (anti(&ra).cross_right(&rb).dev_sym().norm()
                    - anti(&x.a).cross_right(&x.b).dev_sym().norm())
                .abs()
                    / x.b.norm();
                (r1 + r2, x.a.norm())
            },
        ),
        (
            "tangential_projector",
            "id − ν⊗ν = −anti(ν)anti(ν), ν×(id − ν⊗ν) = (id − ν⊗ν)×ν = anti(ν)",
            |x| {
                let nu = x.b.scale(1.0 / x.b.norm());
                let pn = id() - nu.outer(&nu);
                let an = anti(&nu);
                let r =
                    d(pn, -an.matmul(&an)) + d(pn.cross_left(&nu), an) + d(pn.cross_right(&nu), an);
                (r, 1.0)
            },
        ),
    ]
}

struct SpectralSample {
    zeta: GridField,
    a: GridField,
    p: GridField,
    s: GridField,
    w: GridField,
}

type SpectralCheck = fn(&SpectralSample) -> Result<(f64, f64)>;

fn op(f: &GridField, kind: OperatorKind) -> Result<GridField> {
    apply_operator(f, kind)
}

fn gd(x: &GridField, y: &GridField) -> Result<f64> {
    Ok(x.sub(y)?.coefficient_norm())
}

fn scale_of(fields: &[&GridField]) -> f64 {
    fields
        .iter()
        .map(|f| f.coefficient_norm())
        .fold(0.0, f64::max)
}

use OperatorKind::*;

fn spectral_checks() -> Vec<(&'static str, &'static str, SpectralCheck)> {
    vec![
        ("div_curl_vector", "div curl a = 0, curl ∇ζ = 0", |x| {
            let c = op(&x.a, CurlVec)?;
            let g = op(&x.zeta, Grad)?;
            let r = op(&c, Div)?.coefficient_norm() + op(&g, CurlVec)?.coefficient_norm();
            Ok((r, scale_of(&[&c, &g]) * SPECTRAL_KMAX as f64))
        }),
        ("skew_gradient", "2 skew(D a) = anti(curl a)", |x| {
            let lhs = op(&x.a, Grad)?.skew()?.scale(2.0);
            let rhs = op(&x.a, CurlVec)?.anti()?;
            Ok((gd(&lhs, &rhs)?, scale_of(&[&lhs, &rhs])))
        }),
        ("div_anti", "Div anti(a) = −curl a", |x| {
            let lhs = op(&x.a.anti()?, Div)?;
            let rhs = op(&x.a, CurlVec)?.scale(-1.0);
            Ok((gd(&lhs, &rhs)?, scale_of(&[&lhs, &rhs])))
        }),
        ("div_spherical", "Div(ζ id) = ∇ζ, Div(D a) = Δa", |x| {
            let g = op(&x.zeta, Grad)?;
            let l = op(&x.a, Laplacian)?;
            let r = gd(&op(&x.zeta.times_identity()?, Div)?, &g)? / g.coefficient_norm()
                + gd(&op(&op(&x.a, Grad)?, Div)?, &l)? / l.coefficient_norm();
            Ok((r, 1.0))
        }),
        (
            "div_gradient_transpose",
            "Div((D a)ᵀ) = ∇ div a = Δa + curl curl a",
            |x| {
                let lhs = op(&op(&x.a, Grad)?.transpose()?, Div)?;
                let mid = op(&op(&x.a, Div)?, Grad)?;
                let rhs = op(&x.a, Laplacian)?.add(&op(&op(&x.a, CurlVec)?, CurlVec)?)?;
                Ok((gd(&lhs, &mid)? + gd(&mid, &rhs)?, scale_of(&[&lhs, &rhs])))
            },
        ),
        ("curl_spherical", "Curl(ζ id) = −anti(∇ζ)", |x| {
            let lhs = op(&x.zeta.times_identity()?, CurlMat)?;
            let rhs = op(&x.zeta, Grad)?.anti()?.scale(-1.0);
            Ok((gd(&lhs, &rhs)?, scale_of(&[&lhs, &rhs])))
        }),
        ("curl_gradient", "Curl(D a) = 0", |x| {
            let g = op(&x.a, Grad)?;
            Ok((
                op(&g, CurlMat)?.coefficient_norm(),
                g.coefficient_norm() * SPECTRAL_KMAX as f64,
            ))
        }),
        (
            "curl_sym_gradient",
            "½Curl((D a)ᵀ) = Curl(sym D a) = −Curl(skew D a) = ½(D curl a)ᵀ",
            |x| {
                let g = op(&x.a, Grad)?;
                let half = op(&g.transpose()?, CurlMat)?.scale(0.5);
                let r = gd(&half, &op(&g.sym()?, CurlMat)?)?
                    + gd(&half, &op(&g.skew()?, CurlMat)?.scale(-1.0))?
                    + gd(
                        &half,
                        &op(&op(&x.a, CurlVec)?, Grad)?.transpose()?.scale(0.5),
                    )?;
                Ok((r, half.coefficient_norm()))
            },
        ),
        ("nye_anti", "Curl anti(a) = div a id − (D a)ᵀ", |x| {
            let lhs = op(&x.a.anti()?, CurlMat)?;
            let rhs = op(&x.a, Div)?
                .times_identity()?
                .sub(&op(&x.a, Grad)?.transpose()?)?;
            Ok((gd(&lhs, &rhs)?, scale_of(&[&lhs, &rhs])))
        }),
        (
            "nye_inverse",
            "D axl A = ½tr(Curl A) id − (Curl A)ᵀ, tr(Curl A) = 2 div axl A",
            |x| {
                let c = op(&x.w, CurlMat)?;
                let lhs = op(&x.w.axl()?, Grad)?;
                let rhs = c
                    .trace()?
                    .times_identity()?
                    .scale(0.5)
                    .sub(&c.transpose()?)?;
                let t = gd(&c.trace()?, &op(&x.w.axl()?, Div)?.scale(2.0))?;
                Ok((gd(&lhs, &rhs)? + t, scale_of(&[&lhs, &rhs])))
            },
        ),
        ("trace_curl_sym", "tr(Curl S) = 0", |x| {
            let c = op(&x.s, CurlMat)?;
            Ok((c.trace()?.coefficient_norm(), c.coefficient_norm()))
        }),
        ("inc_spherical", "inc(ζ id) = Δζ id − D²ζ", |x| {
            let lhs = op(&x.zeta.times_identity()?, Inc)?;
            let rhs = op(&x.zeta, Laplacian)?
                .times_identity()?
                .sub(&op(&op(&x.zeta, Grad)?, Grad)?)?;
            Ok((gd(&lhs, &rhs)?, scale_of(&[&lhs, &rhs])))
        }),
        (
            "inc_gradient",
            "inc((D a)ᵀ) = inc(sym D a) = inc(skew D a) = 0",
            |x| {
                let g = op(&x.a, Grad)?;
                let r = op(&g.transpose()?, Inc)?.coefficient_norm()
                    + op(&g.sym()?, Inc)?.coefficient_norm()
                    + op(&g.skew()?, Inc)?.coefficient_norm();
                Ok((
                    r,
                    g.coefficient_norm() * (SPECTRAL_KMAX * SPECTRAL_KMAX) as f64,
                ))
            },
        ),
        ("inc_anti", "inc(anti(a)) = −anti(∇ div a)", |x| {
            let lhs = op(&x.a.anti()?, Inc)?;
            let rhs = op(&op(&x.a, Div)?, Grad)?.anti()?.scale(-1.0);
            Ok((gd(&lhs, &rhs)?, scale_of(&[&lhs, &rhs])))
        }),
        (
            "inc_sym_trace",
            "inc S ∈ Sym(3), tr(inc S) = Δ tr S − div Div S",
            |x| {
                let i = op(&x.s, Inc)?;
                let asym = i.skew()?.coefficient_norm();
                let rhs = op(&x.s.trace()?, Laplacian)?.sub(&op(&op(&x.s, Div)?, Div)?)?;
                Ok((asym + gd(&i.trace()?, &rhs)?, i.coefficient_norm()))
            },
        ),
        (
            "inc_sym_expanded",
            "inc S = D Div S + (D Div S)ᵀ − ΔS − D² tr S + (Δ tr S − div Div S) id",
            |x| {
                let lhs = op(&x.s, Inc)?;
                let dd = op(&op(&x.s, Div)?, Grad)?;
                let tr = x.s.trace()?;
                let rhs = dd
                    .add(&dd.transpose()?)?
                    .sub(&op(&x.s, Laplacian)?)?
                    .sub(&op(&op(&tr, Grad)?, Grad)?)?
                    .add(
                        &op(&tr, Laplacian)?
                            .sub(&op(&op(&x.s, Div)?, Div)?)?
                            .times_identity()?,
                    )?;
                Ok((gd(&lhs, &rhs)?, scale_of(&[&lhs, &rhs])))
            },
        ),
        (
            "dev_curl",
            "dev Curl P = Curl P − ⅔ div axl skew P id",
            |x| {
                let c = op(&x.p, CurlMat)?;
                let rhs = c.sub(
                    &op(&x.p.skew()?.axl()?, Div)?
                        .times_identity()?
                        .scale(2.0 / 3.0),
                )?;
                Ok((gd(&op(&x.p, DevCurl)?, &rhs)?, c.coefficient_norm()))
            },
        ),
        (
            "inc_transpose_parts",
            "(inc P)ᵀ = inc(Pᵀ), sym inc P = inc sym P, skew inc P = inc skew P",
            |x| {
                let i = op(&x.p, Inc)?;
                let r = gd(&i.transpose()?, &op(&x.p.transpose()?, Inc)?)?
                    + gd(&i.sym()?, &op(&x.p.sym()?, Inc)?)?
                    + gd(&i.skew()?, &op(&x.p.skew()?, Inc)?)?;
                Ok((r, i.coefficient_norm()))
            },
        ),
        ("trace_inc_curl_sym", "tr(inc Curl S) = 0", |x| {
            let i = op(&op(&x.s, CurlMat)?, Inc)?;
            Ok((i.trace()?.coefficient_norm(), i.coefficient_norm()))
        }),
        (
            "sym_gradient_axial",
            "sym(D axl A) = ½tr(sym Curl A) id − sym Curl A",
            |x| {
                let sc = op(&x.w, SymCurl)?;
                let lhs = op(&x.w.axl()?, Grad)?.sym()?;
                let rhs = sc.trace()?.times_identity()?.scale(0.5).sub(&sc)?;
                Ok((gd(&lhs, &rhs)?, scale_of(&[&lhs, &rhs])))
            },
        ),
        (
            "hessian_trace_axial",
            "D² tr(D axl A) = 3/2 tr(inc dev sym Curl A) id − 3 inc dev sym Curl A",
            |x| {
                let tr = op(&x.w.axl()?, Grad)?.trace()?;
                let lhs = op(&op(&tr, Grad)?, Grad)?;
                let idsc = op(&op(&x.w, DevSymCurl)?, Inc)?;
                let rhs = idsc
                    .trace()?
                    .times_identity()?
                    .scale(1.5)
                    .sub(&idsc.scale(3.0))?;
                Ok((gd(&lhs, &rhs)?, scale_of(&[&lhs, &rhs])))
            },
        ),
        ("sym_curl_kernel", "sym Curl(ζ id + D a) = 0", |x| {
            let f = x.zeta.times_identity()?.add(&op(&x.a, Grad)?)?;
            Ok((
                op(&f, SymCurl)?.coefficient_norm(),
                op(&f, CurlMat)?.coefficient_norm(),
            ))
        }),
    ]
}

/// Every identity with its tolerance, in report order.
pub fn catalog() -> Vec<IdentitySpec> {
    let alg = algebra_checks()
        .into_iter()
        .map(|(name, reference, _)| IdentitySpec {
            name,
            reference,
            family: Family::Algebra,
            tolerance: ALGEBRA_TOL,
        });
    let spec = spectral_checks()
        .into_iter()
        .map(|(name, reference, _)| IdentitySpec {
            name,
            reference,
            family: Family::Spectral,
            tolerance: SPECTRAL_TOL,
        });
    alg.chain(spec).collect()
}

fn algebra_sample(rng: &mut sampling::SeededRng) -> AlgebraSample {
    AlgebraSample {
        a: sampling::vec3(rng),
        b: sampling::vec3(rng),
        c: sampling::vec3(rng),
        p: sampling::mat3(rng),
        s: sampling::sym3(rng),
        w: sampling::skew3(rng),
        r: sampling::rotation(rng),
    }
}

fn spectral_sample(seed: u64) -> Result<SpectralSample> {
    let spec = GridSpec::new(SPECTRAL_N)?;
    let k = SPECTRAL_KMAX;
    Ok(SpectralSample {
        zeta: random_bandlimited_rank(spec, seed, k, 0)?,
        a: random_bandlimited_rank(spec, seed.wrapping_add(1), k, 1)?,
        p: random_bandlimited(spec, seed.wrapping_add(2), k, Structure::General)?,
        s: random_bandlimited(spec, seed.wrapping_add(3), k, Structure::Sym)?,
        w: random_bandlimited(spec, seed.wrapping_add(4), k, Structure::Skew)?,
    })
}

/// Runs the whole suite: `samples` random inputs per algebra identity and
/// [`SPECTRAL_FIELDS`] random field sets per spectral identity. Results are
/// in [`catalog`] order and depend only on `seed` and `samples`.
pub fn run_suite(seed: u64, samples: usize) -> Vec<IdentityResult> {
    let mut rng = sampling::rng(seed);
    let inputs: Vec<AlgebraSample> = (0..samples).map(|_| algebra_sample(&mut rng)).collect();
    let mut out: Vec<IdentityResult> = algebra_checks()
        .into_par_iter()
        .map(|(name, reference, check)| {
            let max_residual = inputs
                .iter()
                .map(|x| {
                    let (r, s) = check(x);
                    r / s
                })
                .fold(0.0, f64::max);
            IdentityResult {
                name,
                reference,
                family: Family::Algebra,
                samples,
                tolerance: ALGEBRA_TOL,
                max_residual,
                error: None,
            }
        })
        .collect();

    let fields: Vec<Result<SpectralSample>> = (0..SPECTRAL_FIELDS as u64)
        .into_par_iter()
        .map(|i| spectral_sample(seed.wrapping_mul(1_000_003).wrapping_add(10 * i)))
        .collect();
    let spectral: Vec<IdentityResult> = spectral_checks()
        .into_par_iter()
        .map(|(name, reference, check)| {
            let mut max_residual: f64 = 0.0;
            let mut error = None;
            for f in &fields {
                match f.as_ref().map_err(Clone::clone).and_then(check) {
                    Ok((r, s)) => max_residual = max_residual.max(r / s),
                    Err(e) => {
                        error = Some(e.to_string());
                        break;
                    }
                }
            }
            IdentityResult {
                name,
                reference,
                family: Family::Spectral,
                samples: fields.len(),
                tolerance: SPECTRAL_TOL,
                max_residual,
                error,
            }
        })
        .collect();
    out.extend(spectral);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_size_and_unique_names() {
        let c = catalog();
        assert!(c.len() >= 25);
        let mut names: Vec<_> = c.iter().map(|s| s.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), c.len());
    }

    #[test]
    fn suite_passes_and_is_deterministic() {
        let a = run_suite(7, 200);
        for r in &a {
            assert!(
                r.passed(),
                "{} failed: {:e} ({:?})",
                r.name,
                r.max_residual,
                r.error
            );
        }
        let b = run_suite(7, 200);
        assert_eq!(a, b);
    }

    #[test]
    fn residuals_are_not_trivially_zero() {
        // a wrong identity must be detected
        let mut rng = sampling::rng(1);
        let x = algebra_sample(&mut rng);
        let wrong = d(
            anti(&x.a).cross_right(&x.b),
            x.a.outer(&x.b) - id().scale(x.a.dot(&x.b)),
        );
        assert!(wrong / (x.a.norm() * x.b.norm()) > 1e-3);
    }
}

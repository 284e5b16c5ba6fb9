//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one PASS/FAIL line.

use std::process::Command;
use std::time::Instant;

use kornlab_core::algebra3::anti;
use kornlab_core::fields::{growth_ratio, halfspace_ratio, BoxDomain};
use kornlab_core::identities::{run_suite, Family, ALGEBRA_TOL, SPECTRAL_TOL};
use kornlab_core::kernels::{boundary_rank, circle_through_origin, PointCloud};
use kornlab_core::korn::{equivalence_constant, grid_crosscheck, korn_constant};
use kornlab_core::sampling;
use kornlab_core::symbol::{
    complex_kernel_witness, curl_symbol_real, kernel_basis, multiplier_parts, Part, TAU_KER,
};
use kornlab_core::{Complex64, Mat3, Vec3};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn identity_suite() -> Outcome {
    let start = Instant::now();
    let results = run_suite(1, 1000);
    let secs = start.elapsed().as_secs_f64();
    let tol_ok = results.iter().all(|r| match r.family {
        Family::Algebra => r.tolerance <= ALGEBRA_TOL,
        Family::Spectral => r.tolerance <= SPECTRAL_TOL,
    });
    let failed: Vec<_> = results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name)
        .collect();
    let worst = results.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    ensure(
        results.len() >= 25 && failed.is_empty() && tol_ok && secs < 30.0,
        format!(
            "{} identities, failed {:?}, worst residual {worst:.2e}, {secs:.1}s",
            results.len(),
            failed
        ),
    )
}

fn observation_bounds() -> Outcome {
    let mut rng = sampling::rng(2);
    let q =
        |a: &Vec3, b: &Vec3| anti(a).cross_right(b).dev_sym().norm_sqr() / (a.dot(a) * b.dot(b));
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..100_000 {
        let (a, b) = (sampling::vec3(&mut rng), sampling::vec3(&mut rng));
        let v = q(&a, &b);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let a = Vec3::new(0.3, -1.1, 0.4);
    let perp = a.cross(&Vec3::new(1.0, 0.0, 0.0));
    let par = q(&a, &a.scale(-2.5));
    let orth = q(&a, &perp);
    ensure(
        lo >= 0.5 - 1e-12
            && hi <= 2.0 / 3.0 + 1e-12
            && (par - 2.0 / 3.0).abs() < 1e-12
            && (orth - 0.5).abs() < 1e-12,
        format!("range [{lo:.15}, {hi:.15}], parallel {par:.15}, perpendicular {orth:.15}"),
    )
}

fn random_directions(seed: u64, count: usize) -> Vec<Vec3> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| {
            let mut v = sampling::vec3(&mut rng);
            while v.norm() < 1e-2 {
                v = sampling::vec3(&mut rng);
            }
            v
        })
        .collect()
}

fn kernel_dimension() -> Outcome {
    let mut dims_ok = true;
    let mut min_gap = f64::INFINITY;
    for xi in random_directions(3, 100) {
        let basis = kernel_basis(&curl_symbol_real(&xi, Part::DevSym), TAU_KER);
        dims_ok &= basis.dimension == 4;
        min_gap = min_gap.min(basis.gap_ratio());
    }
    ensure(
        dims_ok && min_gap > 1e6,
        format!("all dimensions 4: {dims_ok}, min gap ratio {min_gap:.2e}"),
    )
}

fn multiplier_identity() -> Outcome {
    let mut rng = sampling::rng(4);
    let (mut res, mut hom) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let xi = sampling::unit_vec3(&mut rng);
        let parts = multiplier_parts(&xi).map_err(|e| e.to_string())?;
        let doubled = multiplier_parts(&xi.scale(2.0)).map_err(|e| e.to_string())?;
        res = res.max((&parts.m.compose(&parts.a) - &parts.a_tilde).norm());
        hom = hom.max((&doubled.m - &parts.m).norm());
    }
    ensure(
        res < 1e-10 && hom < 1e-10,
        format!("max |MA - Ã| {res:.2e}, max |M(2ξ) - M(ξ)| {hom:.2e}"),
    )
}

// Plain-array oracle for sup |sym(P×ξ)| / |dev sym(P×ξ)|, independent of the
// library's linear algebra.
type M = [[f64; 3]; 3];

fn mm(a: &M, b: &M) -> M {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn sym(a: &M) -> M {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = 0.5 * (a[i][j] + a[j][i]);
        }
    }
    c
}

fn dev(a: &M) -> M {
    let t = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let mut c = *a;
    for (i, row) in c.iter_mut().enumerate() {
        row[i] -= t;
    }
    c
}

fn nsq(a: &M) -> f64 {
    a.iter().flatten().map(|v| v * v).sum()
}

fn ratio_and_gradient(p: &M, x: &M, xt: &M) -> (f64, M) {
    let px = mm(p, x);
    let (s, d) = (sym(&px), dev(&sym(&px)));
    let (n, dn) = (nsq(&s), nsq(&d));
    let r = n / dn;
    let (gs, gd) = (mm(&s, xt), mm(&d, xt));
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = 2.0 * (gs[i][j] - r * gd[i][j]) / dn;
        }
    }
    (r, g)
}

fn oracle_sharp_ratio(seed: u64) -> f64 {
    let mut rng = sampling::rng(seed);
    let mut best = 0.0f64;
    for _ in 0..8 {
        let v = sampling::unit_vec3(&mut rng);
        let x: M = [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]];
        let xt: M = [[0.0, v[2], -v[1]], [-v[2], 0.0, v[0]], [v[1], -v[0], 0.0]];
        // dense random start, then gradient ascent with backtracking
        let mut p = [[0.0; 3]; 3];
        let mut r = 0.0;
        for _ in 0..2000 {
            let m = sampling::mat3(&mut rng).0;
            let rm = ratio_and_gradient(&m, &x, &xt).0;
            if rm > r {
                r = rm;
                p = m;
            }
        }
        let mut step = 1.0;
        for _ in 0..5000 {
            let (r0, g) = ratio_and_gradient(&p, &x, &xt);
            let mut next = p;
            loop {
                for i in 0..3 {
                    for j in 0..3 {
                        next[i][j] = p[i][j] + step * g[i][j];
                    }
                }
                let r1 = ratio_and_gradient(&next, &x, &xt).0;
                if r1 >= r0 || step < 1e-14 {
                    break;
                }
                step *= 0.5;
            }
            let scale = nsq(&next).sqrt();
            p = next.map(|row| row.map(|v| v / scale));
            step *= 2.0;
            r = ratio_and_gradient(&p, &x, &xt).0;
            if nsq(&g).sqrt() < 1e-13 {
                break;
            }
        }
        best = best.max(r);
    }
    best.sqrt()
}

fn sharp_ratio_oracle() -> Outcome {
    let got = equivalence_constant().map_err(|e| e.to_string())?;
    let oracle = oracle_sharp_ratio(5);
    ensure(
        got.value <= 1.0 + 3f64.sqrt() && (got.value - oracle).abs() < 1e-6,
        format!(
            "equivalence constant {:.15}, oracle {oracle:.15}, bound {:.15}",
            got.value,
            1.0 + 3f64.sqrt()
        ),
    )
}

fn complex_witness() -> Outcome {
    let w = complex_kernel_witness();
    let prod = w.product();
    let dev = prod.dev_sym().norm();
    let off = (prod.sym() - Mat3::identity().scale(Complex64::i())).norm();
    ensure(
        dev < 1e-15 && off < 1e-15,
        format!("|dev sym| {dev:.2e}, |sym - i id| {off:.2e}"),
    )
}

fn counterexample_growth() -> Outcome {
    let start = Instant::now();
    let omega = BoxDomain::unit_cube();
    let table = (1..=100)
        .map(|k| growth_ratio(k, 2.0, &omega))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let increasing = table[4..].windows(2).all(|w| w[1] > w[0]);
    let factor = table[99] / table[9];
    ensure(
        increasing && factor > 3.0 && secs < 60.0,
        format!("increasing from k=5: {increasing}, ratio(100)/ratio(10) = {factor:.4}, resolved, {secs:.1}s"),
    )
}

fn halfspace_failure() -> Outcome {
    let ks = [2u32, 4, 8, 16, 32];
    let ratios = ks
        .iter()
        .map(|&k| halfspace_ratio(k, 2.0))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let factors: Vec<f64> = ratios.windows(2).map(|w| w[1] / w[0]).collect();
    ensure(
        factors.iter().all(|&f| f > 1.5),
        format!("doubling factors for k = 2, 4, 8, 16: {factors:.3?}"),
    )
}

fn kernel_rigidity() -> Outcome {
    let mut rng = sampling::rng(9);
    let mut ranks = Vec::new();
    for _ in 0..20 {
        let pts: Vec<Vec3> = (0..12).map(|_| sampling::unit_vec3(&mut rng)).collect();
        ranks.push(boundary_rank(
            &PointCloud::new(pts).map_err(|e| e.to_string())?,
        ));
    }
    let circle = boundary_rank(&PointCloud::new(circle_through_origin(1.0, 12)).unwrap());
    let line: Vec<Vec3> = (0..5)
        .map(|i| Vec3::new(0.2, -0.4, 1.0).scale(i as f64 - 2.0))
        .collect();
    let line = boundary_rank(&PointCloud::new(line).unwrap());
    ensure(
        ranks.iter().all(|&r| r == 10) && circle < 10 && line < 10,
        format!("sphere ranks {ranks:?}, circle {circle}, line {line}"),
    )
}

fn korn_constant_estimate() -> Outcome {
    let start = Instant::now();
    let r4 = korn_constant(4).map_err(|e| e.to_string())?;
    let r8 = korn_constant(8).map_err(|e| e.to_string())?;
    let in_range = r4
        .per_frequency
        .iter()
        .chain(&r8.per_frequency)
        .all(|f| f.lambda_min > 0.0 && f.lambda_min <= 1.0 + 1e-12);
    let drift = (r4.c_estimate - r8.c_estimate).abs();
    let stable = drift < 1e-10 || r8.non_monotone_tail;
    let cc = grid_crosscheck(16, 1, 1000).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(
        in_range && stable && cc.residual < 1e-6 && secs < 120.0,
        format!(
            "c_estimate {:.15} (kmax 4) vs {:.15} (kmax 8), crosscheck residual {:.2e}, {secs:.1}s",
            r4.c_estimate, r8.c_estimate, cc.residual
        ),
    )
}

fn run_binary(threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kornlab"))
        .args(["korn", "--kmax", "4", "--seed", "1"])
        .env("KORNLAB_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let one = run_binary("1")?;
    let eight = run_binary("8")?;
    ensure(
        one == eight && !one.is_empty(),
        format!(
            "{} bytes with 1 thread, {} with 8, identical: {}",
            one.len(),
            eight.len(),
            one == eight
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("identity suite", identity_suite),
        ("dev sym bounds", observation_bounds),
        ("symbol kernel dimension", kernel_dimension),
        ("multiplier identity", multiplier_identity),
        ("sharp ratio", sharp_ratio_oracle),
        ("complex witness", complex_witness),
        ("counterexample growth", counterexample_growth),
        ("half-space seminorm failure", halfspace_failure),
        ("kernel rigidity", kernel_rigidity),
        ("Korn constant", korn_constant_estimate),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}

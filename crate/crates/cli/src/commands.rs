use std::time::Instant;

use kornlab_core::fields::{growth_ratio, halfspace_seminorms, BoxDomain};
use kornlab_core::identities::run_suite;
use kornlab_core::kernels::{
    boundary_rank, circle_through_origin, curl_kernel_closed_form, eval_kernel, project_kernel,
    ConformalKilling, KernelElement, KernelSpace, PointCloud,
};
use kornlab_core::korn::{equivalence_constant_with, grid_crosscheck, korn_constant, CONVENTION};
use kornlab_core::sampling;
use kornlab_core::symbol::{
    complex_kernel_witness, curl_symbol_real, kernel_basis, multiplier_parts, Part, TAU_KER,
};
use kornlab_core::{Complex64, Mat3, Vec3};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{Command, RunConfig};
use crate::report::{float, format_float, Report, ReportError, Table};

/// Lanczos budget for the grid cross-check.
pub const CROSSCHECK_ITERATIONS: usize = 1000;
pub const CROSSCHECK_TOL: f64 = 1e-6;
pub const KERNEL_DIM: usize = 4;
pub const GAP_RATIO_MIN: f64 = 1e6;
pub const MULTIPLIER_TOL: f64 = 1e-10;
pub const WITNESS_TOL: f64 = 1e-15;
pub const SPREAD_TOL: f64 = 1e-9;
/// First `k` from which the growth table must increase strictly.
pub const GROWTH_FROM: usize = 5;
pub const HALFSPACE_KS: [u32; 6] = [1, 2, 4, 8, 16, 32];
pub const HALFSPACE_FACTOR: f64 = 1.5;
pub const QUADRATURE_POINTS: usize = 64;
pub const FD_STEP: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-6;
pub const RECOVERY_TOL: f64 = 1e-9;
pub const RIGIDITY_POINTS: usize = 12;

/// Outcome of a scalar check, reported as `value relation bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub relation: &'static str,
    pub bound: f64,
}

impl Check {
    pub fn below(name: &'static str, value: f64, bound: f64) -> Self {
        Check {
            name,
            value,
            relation: "<",
            bound,
        }
    }

    pub fn at_most(name: &'static str, value: f64, bound: f64) -> Self {
        Check {
            name,
            value,
            relation: "<=",
            bound,
        }
    }

    pub fn above(name: &'static str, value: f64, bound: f64) -> Self {
        Check {
            name,
            value,
            relation: ">",
            bound,
        }
    }

    pub fn equal(name: &'static str, value: f64, bound: f64) -> Self {
        Check {
            name,
            value,
            relation: "=",
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        match self.relation {
            "<" => self.value < self.bound,
            "<=" => self.value <= self.bound,
            ">" => self.value > self.bound,
            _ => self.value == self.bound,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "check": self.name,
            "value": float(self.value),
            "relation": self.relation,
            "tolerance": float(self.bound),
            "passed": self.passed(),
        })
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.name.to_string(),
            format_float(self.value),
            format!("{}{}", self.relation, format_float(self.bound)),
            self.passed().to_string(),
        ]
    }
}

struct Run<'a> {
    cfg: &'a RunConfig,
    report: Report,
}

impl Run<'_> {
    fn phase<T>(&mut self, name: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.cfg.timings {
            let ms = start.elapsed().as_secs_f64() * 1e3;
            self.report.timings_ms.push((name, ms));
        }
        out
    }

    fn module_error(&mut self, name: impl Into<String>, e: impl std::fmt::Display) {
        self.report
            .errors
            .push(ReportError::module(name, e.to_string()));
    }

    fn record(&mut self, checks: &[Check]) {
        for c in checks.iter().filter(|c| !c.passed()) {
            self.report.errors.push(ReportError::invariant(
                c.name,
                format!(
                    "{} = {} violates {} {}",
                    c.name,
                    format_float(c.value),
                    c.relation,
                    format_float(c.bound)
                ),
            ));
        }
    }
}

/// Runs the workflow selected by `cfg.command`. Module failures and violated
/// invariants land in `Report::errors`; the remaining checks still run.
pub fn dispatch(cfg: &RunConfig) -> Report {
    let mut run = Run {
        cfg,
        report: Report::new(cfg),
    };
    match cfg.command {
        Command::Identities => identities(&mut run),
        Command::Symbol => symbol(&mut run),
        Command::Korn => korn(&mut run),
        Command::Counterexample => counterexample(&mut run),
        Command::Kernel => kernel(&mut run),
    }
    run.report
}

fn identities(run: &mut Run) {
    let (seed, samples) = (run.cfg.seed, run.cfg.samples);
    let results = run.phase("suite", || run_suite(seed, samples));
    let mut tolerances = Map::new();
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for r in &results {
        tolerances.insert(r.name.into(), float(r.tolerance));
        entries.push(json!({
            "name": r.name,
            "reference": r.reference,
            "family": r.family.as_str(),
            "samples": r.samples,
            "tolerance": float(r.tolerance),
            "max_residual": float(r.max_residual),
            "passed": r.passed(),
        }));
        rows.push(vec![
            r.name.to_string(),
            r.family.as_str().to_string(),
            r.samples.to_string(),
            format_float(r.tolerance),
            format_float(r.max_residual),
            r.passed().to_string(),
        ]);
        if let Some(e) = &r.error {
            run.module_error(r.name, format!("{} [{}]", e, r.reference));
        } else if !r.passed() {
            run.report.errors.push(ReportError::invariant(
                r.name,
                format!(
                    "{}: max residual {} exceeds tolerance {}",
                    r.reference,
                    format_float(r.max_residual),
                    format_float(r.tolerance)
                ),
            ));
        }
    }
    let passed = results.iter().filter(|r| r.passed()).count();
    run.report.results = json!({
        "count": results.len(),
        "passed": passed,
        "failed": results.len() - passed,
        "tolerances": tolerances,
        "identities": entries,
    });
    run.report.table = Table {
        header: vec![
            "name",
            "family",
            "samples",
            "tolerance",
            "max_residual",
            "passed",
        ],
        rows,
    };
}

struct SymbolSample {
    xi: Vec3,
    kernel_dim: usize,
    gap_ratio: f64,
    multiplier_residual: f64,
    homogeneity: f64,
}

fn symbol_sample(xi: Vec3) -> kornlab_core::Result<SymbolSample> {
    let basis = kernel_basis(&curl_symbol_real(&xi, Part::DevSym), TAU_KER);
    let parts = multiplier_parts(&xi)?;
    let residual = &parts.m.compose(&parts.a) - &parts.a_tilde;
    let doubled = multiplier_parts(&xi.scale(2.0))?;
    Ok(SymbolSample {
        xi,
        kernel_dim: basis.dimension,
        gap_ratio: basis.gap_ratio(),
        multiplier_residual: residual.norm(),
        homogeneity: (&doubled.m - &parts.m).norm(),
    })
}

fn symbol(run: &mut Run) {
    let (seed, samples) = (run.cfg.seed, run.cfg.samples);
    let mut rng = sampling::rng(seed);
    let dirs: Vec<Vec3> = (0..samples)
        .map(|_| sampling::unit_vec3(&mut rng))
        .collect();
    let sampled = run.phase("symbols", || {
        dirs.par_iter()
            .map(|xi| symbol_sample(*xi))
            .collect::<kornlab_core::Result<Vec<_>>>()
    });
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    match sampled {
        Ok(sampled) => {
            let bad_dim = sampled
                .iter()
                .filter(|s| s.kernel_dim != KERNEL_DIM)
                .count();
            let fold = |f: fn(&SymbolSample) -> f64, init: f64, pick: fn(f64, f64) -> f64| {
                sampled.iter().map(f).fold(init, pick)
            };
            checks.push(Check::equal(
                "kernel_dimension_mismatches",
                bad_dim as f64,
                0.0,
            ));
            checks.push(Check::above(
                "min_gap_ratio",
                fold(|s| s.gap_ratio, f64::INFINITY, f64::min),
                GAP_RATIO_MIN,
            ));
            checks.push(Check::below(
                "max_multiplier_residual",
                fold(|s| s.multiplier_residual, 0.0, f64::max),
                MULTIPLIER_TOL,
            ));
            checks.push(Check::below(
                "max_homogeneity_defect",
                fold(|s| s.homogeneity, 0.0, f64::max),
                MULTIPLIER_TOL,
            ));
            for s in &sampled {
                rows.push(vec![
                    format_float(s.xi[0]),
                    format_float(s.xi[1]),
                    format_float(s.xi[2]),
                    s.kernel_dim.to_string(),
                    format_float(s.gap_ratio),
                    format_float(s.multiplier_residual),
                    format_float(s.homogeneity),
                ]);
            }
        }
        Err(e) => run.module_error("symbol_samples", e),
    }

    match run.phase("equivalence", || equivalence_constant_with(seed, samples)) {
        Ok(eq) => {
            checks.push(Check::at_most(
                "equivalence_constant",
                eq.value,
                1.0 + 3f64.sqrt(),
            ));
            checks.push(Check::below("equivalence_spread", eq.spread, SPREAD_TOL));
        }
        Err(e) => run.module_error("equivalence_constant", e),
    }

    let w = complex_kernel_witness();
    let prod = w.product();
    let i_id = Mat3::identity().scale(Complex64::i());
    checks.push(Check::below(
        "witness_dev_sym",
        prod.dev_sym().norm(),
        WITNESS_TOL,
    ));
    checks.push(Check::below(
        "witness_sym_minus_i_id",
        (prod.sym() - i_id).norm(),
        WITNESS_TOL,
    ));

    run.record(&checks);
    run.report.results = json!({
        "directions": samples,
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
    });
    run.report.table = Table {
        header: vec![
            "xi1",
            "xi2",
            "xi3",
            "kernel_dim",
            "gap_ratio",
            "multiplier_residual",
            "homogeneity_defect",
        ],
        rows,
    };
}

fn korn(run: &mut Run) {
    let cfg = run.cfg;
    let mut checks = Vec::new();
    let mut results = Map::new();
    let mut rows = Vec::new();
    results.insert("convention".into(), CONVENTION.into());
    results.insert(
        "form".into(),
        "|sym P|^2 + |dev sym Curl P|^2 >= lambda |P|^2 with c = 1/sqrt(lambda); \
         for |sym P| + |dev sym Curl P| the constant is at most sqrt(2) c"
            .into(),
    );
    let mut report = match run.phase("frequencies", || korn_constant(cfg.kmax)) {
        Ok(r) => Some(r),
        Err(e) => {
            run.module_error("korn_constant", e);
            None
        }
    };
    match run.phase("crosscheck", || {
        grid_crosscheck(cfg.grid_n, cfg.seed, CROSSCHECK_ITERATIONS)
    }) {
        Ok(cc) => {
            checks.push(Check::below(
                "crosscheck_residual",
                cc.residual,
                CROSSCHECK_TOL,
            ));
            if let Some(r) = report.as_mut() {
                r.crosscheck_residual = Some(cc.residual);
            }
            results.insert(
                "crosscheck".into(),
                json!({
                    "grid_n": cfg.grid_n,
                    "residual": float(cc.residual),
                    "lambda_grid": float(cc.lambda_grid),
                    "lambda_freq": float(cc.lambda_freq),
                    "dominant_frequency": cc.dominant_frequency.to_vec(),
                    "iterations": cc.iterations,
                }),
            );
        }
        Err(e) => run.module_error("grid_crosscheck", e),
    }
    if let Some(r) = report {
        let lo = r
            .per_frequency
            .iter()
            .map(|f| f.lambda_min)
            .fold(f64::INFINITY, f64::min);
        let hi = r
            .per_frequency
            .iter()
            .map(|f| f.lambda_min)
            .fold(0.0, f64::max);
        checks.push(Check::above("min_lambda", lo, 0.0));
        checks.push(Check::at_most("max_lambda", hi, 1.0 + 1e-12));
        checks.push(Check::above(
            "c_estimate_at_least_one",
            r.c_estimate,
            1.0 - 1e-12,
        ));
        results.insert("kmax".into(), r.kmax.into());
        results.insert("c_estimate".into(), float(r.c_estimate));
        results.insert("lambda_min".into(), float(r.lambda_min));
        results.insert("argmin".into(), r.argmin.to_vec().into());
        results.insert("shell_min".into(), float(r.shell_min));
        results.insert("non_monotone_tail".into(), r.non_monotone_tail.into());
        results.insert(
            "crosscheck_residual".into(),
            r.crosscheck_residual.map_or(Value::Null, float),
        );
        let table: Vec<Value> = r
            .per_frequency
            .iter()
            .map(|f| json!({"k": f.k.to_vec(), "lambda_min": float(f.lambda_min)}))
            .collect();
        results.insert("per_frequency".into(), table.into());
        for f in &r.per_frequency {
            rows.push(vec![
                f.k[0].to_string(),
                f.k[1].to_string(),
                f.k[2].to_string(),
                format_float(f.lambda_min),
            ]);
        }
    }
    run.record(&checks);
    results.insert(
        "checks".into(),
        checks.iter().map(Check::to_json).collect::<Vec<_>>().into(),
    );
    run.report.results = Value::Object(results);
    run.report.table = Table {
        header: vec!["k1", "k2", "k3", "lambda_min"],
        rows,
    };
}

fn counterexample(run: &mut Run) {
    let cfg = run.cfg;
    let b = cfg.bounds;
    let range = cfg.k_range();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut growth = Vec::new();
    let mut halfspace = Vec::new();

    match BoxDomain::new(
        Vec3::new(b[0], b[1], b[2]),
        Vec3::new(b[3], b[4], b[5]),
        QUADRATURE_POINTS,
    ) {
        Ok(omega) => {
            let ratios: Vec<_> = run.phase("growth", || {
                (1..=range)
                    .into_par_iter()
                    .map(|k| growth_ratio(k as u32, cfg.p, &omega))
                    .collect()
            });
            let mut table = Vec::new();
            for (k, r) in (1..=range).zip(ratios) {
                match r {
                    Ok(v) => {
                        table.push((k, v));
                        growth.push(json!({"k": k, "ratio": float(v)}));
                        rows.push(vec!["growth".into(), k.to_string(), format_float(v)]);
                    }
                    Err(e) => run.module_error(format!("growth_ratio(k={k})"), e),
                }
            }
            // smallest step ratio(k+1)/ratio(k) over k ≥ GROWTH_FROM
            let steps: Vec<f64> = table
                .windows(2)
                .filter(|w| w[0].0 >= GROWTH_FROM && w[1].0 == w[0].0 + 1)
                .map(|w| w[1].1 / w[0].1)
                .collect();
            if !steps.is_empty() {
                let worst = steps.iter().copied().fold(f64::INFINITY, f64::min);
                checks.push(Check::above("growth_min_step_ratio", worst, 1.0));
            }
        }
        Err(e) => run.module_error("box", e),
    }

    let ks: Vec<u32> = HALFSPACE_KS
        .iter()
        .copied()
        .filter(|&k| k as usize <= range)
        .collect();
    let semis = run.phase("halfspace", || {
        ks.iter()
            .map(|&k| halfspace_seminorms(k, cfg.p))
            .collect::<Vec<_>>()
    });
    let mut by_k = Vec::new();
    for (&k, s) in ks.iter().zip(semis) {
        match s {
            Ok(s) => {
                let ratio = s.ratio();
                by_k.push((k, ratio));
                halfspace.push(json!({
                    "k": k,
                    "sym_curl": float(s.sym_curl),
                    "dev_sym_curl": float(s.dev_sym_curl),
                    "ratio": float(ratio),
                    "points": s.points,
                }));
                rows.push(vec!["halfspace".into(), k.to_string(), format_float(ratio)]);
            }
            Err(e) => run.module_error(format!("halfspace_seminorms(k={k})"), e),
        }
    }
    let doubling: Vec<f64> = by_k
        .windows(2)
        .filter(|w| w[0].0 >= 2 && w[1].0 == 2 * w[0].0)
        .map(|w| w[1].1 / w[0].1)
        .collect();
    if !doubling.is_empty() {
        let worst = doubling.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(Check::above(
            "halfspace_min_doubling_factor",
            worst,
            HALFSPACE_FACTOR,
        ));
    }

    run.record(&checks);
    run.report.results = json!({
        "p": float(cfg.p),
        "k_range": [1, range],
        "growth": growth,
        "halfspace": halfspace,
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
    });
    run.report.table = Table {
        header: vec!["table", "k", "ratio"],
        rows,
    };
}

fn fd_curl(e: &KernelElement, x: &Vec3, h: f64) -> Mat3 {
    // (Curl P)_{ij} = ε_{jab} ∂_a P_{ib}
    let d = |a: usize| {
        let mut xp = *x;
        let mut xm = *x;
        xp.0[a] += h;
        xm.0[a] -= h;
        (eval_kernel(e, &xp) - eval_kernel(e, &xm)).scale(0.5 / h)
    };
    let grads = [d(0), d(1), d(2)];
    let mut m = Mat3::zero();
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            m.0[i][j] = grads[a].0[i][b] - grads[b].0[i][a];
        }
    }
    m
}

struct KernelSample {
    skew: f64,
    curl_fd: f64,
    curl_dev_sym: f64,
    jacobian_fd: f64,
    conformal: f64,
    recovery: f64,
}

fn kernel_sample(seed: u64, index: usize) -> kornlab_core::Result<KernelSample> {
    let mut rng = sampling::rng(seed.wrapping_add(index as u64));
    let (u, v, w, s) = (
        sampling::vec3(&mut rng),
        sampling::vec3(&mut rng),
        sampling::vec3(&mut rng),
        sampling::vec3(&mut rng),
    );
    let theta = [u[0], u[1], u[2], v[0], v[1], v[2], s[0], w[0], w[1], w[2]];
    let e = KernelElement::from_params(KernelSpace::Sdsc, &theta);
    let x = sampling::vec3(&mut rng);
    let p = eval_kernel(&e, &x);
    let closed = curl_kernel_closed_form(&e, &x);
    let scale = 1.0 + closed.norm();
    let phi = ConformalKilling::from(&e);
    let jac = phi.jacobian(&x);

    let pts = sampling::general_position_points(&mut rng, RIGIDITY_POINTS, 1e-3);
    let samples: Vec<(Vec3, Mat3)> = pts.iter().map(|y| (*y, eval_kernel(&e, y))).collect();
    let fit = project_kernel(&samples, KernelSpace::Sdsc)?;
    let got = fit.element.params(KernelSpace::Sdsc);
    let recovery = got
        .iter()
        .zip(theta.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / (1.0 + theta.iter().map(|t| t.abs()).fold(0.0, f64::max));

    Ok(KernelSample {
        skew: p.sym().norm(),
        curl_fd: (fd_curl(&e, &x, FD_STEP) - closed).norm() / scale,
        curl_dev_sym: closed.dev_sym().norm() / scale,
        jacobian_fd: (phi.jacobian_fd(&x, FD_STEP) - jac).norm() / (1.0 + jac.norm()),
        conformal: jac.dev_sym().norm() / (1.0 + jac.norm()),
        recovery,
    })
}

fn kernel(run: &mut Run) {
    let (seed, samples) = (run.cfg.seed, run.cfg.samples);
    let sampled = run.phase("elements", || {
        (0..samples)
            .into_par_iter()
            .map(|i| kernel_sample(seed, i))
            .collect::<kornlab_core::Result<Vec<_>>>()
    });
    let mut checks = Vec::new();
    match sampled {
        Ok(s) => {
            let max = |f: fn(&KernelSample) -> f64| s.iter().map(f).fold(0.0, f64::max);
            checks.push(Check::below("max_sym_part", max(|k| k.skew), 1e-15));
            checks.push(Check::below(
                "max_curl_fd_defect",
                max(|k| k.curl_fd),
                FD_TOL,
            ));
            checks.push(Check::below(
                "max_curl_dev_sym",
                max(|k| k.curl_dev_sym),
                1e-12,
            ));
            checks.push(Check::below(
                "max_jacobian_fd_defect",
                max(|k| k.jacobian_fd),
                FD_TOL,
            ));
            checks.push(Check::below(
                "max_conformal_defect",
                max(|k| k.conformal),
                1e-12,
            ));
            checks.push(Check::below(
                "max_recovery_error",
                max(|k| k.recovery),
                RECOVERY_TOL,
            ));
        }
        Err(e) => run.module_error("kernel_samples", e),
    }

    let mut rng = sampling::rng(seed);
    let sphere: Vec<Vec3> = (0..RIGIDITY_POINTS)
        .map(|_| sampling::unit_vec3(&mut rng))
        .collect();
    let line: Vec<Vec3> = (0..5)
        .map(|i| Vec3::new(1.0, 2.0, -1.0).scale(i as f64 * 0.25))
        .collect();
    let clouds = [
        ("rank_sphere", sphere, true),
        (
            "rank_circle",
            circle_through_origin(1.0, RIGIDITY_POINTS),
            false,
        ),
        ("rank_line", line, false),
    ];
    let full = KernelSpace::Sdsc.dimension() as f64;
    let ranks = run.phase("rigidity", || {
        clouds
            .into_iter()
            .map(|(name, pts, rigid)| {
                (name, rigid, PointCloud::new(pts).map(|c| boundary_rank(&c)))
            })
            .collect::<Vec<_>>()
    });
    for (name, rigid, rank) in ranks {
        match rank {
            Ok(rank) => checks.push(if rigid {
                Check::equal(name, rank as f64, full)
            } else {
                Check::below(name, rank as f64, full)
            }),
            Err(e) => run.module_error(name, e),
        }
    }

    run.record(&checks);
    run.report.results = json!({
        "elements": samples,
        "space": KernelSpace::Sdsc.name(),
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
    });
    run.report.table = Table {
        header: vec!["check", "value", "tolerance", "passed"],
        rows: checks.iter().map(Check::row).collect(),
    };
}

use std::process::Command as Process;

use kornlab_cli::config::{parse_config, Command, Format, UsageError, DEFAULT_BOX};
use kornlab_cli::dispatch;
use serde_json::Value;

fn kornlab(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_kornlab"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn parse_examples() {
    let c = parse_config(["korn", "--kmax", "6"]).unwrap();
    assert_eq!(c.command, Command::Korn);
    assert_eq!(c.kmax, 6);
    assert_eq!((c.seed, c.samples, c.grid_n, c.p), (1, 1000, 16, 2.0));
    assert_eq!(c.bounds, DEFAULT_BOX);

    let c = parse_config(["identities", "--samples", "5000", "--seed", "42"]).unwrap();
    assert_eq!(c.command, Command::Identities);
    assert_eq!((c.samples, c.seed), (5000, 42));

    match parse_config(["korn", "--kmax", "0"]) {
        Err(UsageError::Invalid(msg)) => assert!(msg.contains("--kmax")),
        other => panic!("expected usage error, got {other:?}"),
    }
}

#[test]
fn config_file_precedence_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "seed = 7\nkmax = 3\nformat = \"csv\"\nbox = [0, 0, 0, 1, 1, 1]\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let c = parse_config(["korn", "--config", p, "--kmax", "5"]).unwrap();
    assert_eq!((c.seed, c.kmax, c.format), (7, 5, Format::Csv));
    assert_eq!(c.bounds, [0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);

    std::fs::write(&path, "seed = 7\nthreads = 4\n").unwrap();
    match parse_config(["korn", "--config", p]) {
        Err(UsageError::Invalid(msg)) => assert!(msg.contains("threads")),
        other => panic!("expected usage error, got {other:?}"),
    }
}

#[test]
fn counterexample_range_follows_kmax() {
    let c = parse_config(["counterexample"]).unwrap();
    assert_eq!(c.k_range(), 50);
    let c = parse_config(["counterexample", "--kmax", "12"]).unwrap();
    assert_eq!(c.k_range(), 12);
}

#[test]
fn identities_report_shape() {
    let cfg = parse_config(["identities", "--samples", "50"]).unwrap();
    let report = dispatch(&cfg);
    assert!(!report.failed(), "{:?}", report.errors);
    let v: Value = serde_json::from_str(&report.render(Format::Json)).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        [
            "schema_version",
            "command",
            "config",
            "results",
            "errors",
            "timings_ms"
        ]
    );
    assert_eq!(v["schema_version"], "kornlab/1");
    let entries = v["results"]["identities"].as_array().unwrap();
    assert!(entries.len() >= 25);
    for e in entries {
        assert!(e["name"].is_string() && e["samples"].is_u64() && e["max_residual"].is_f64());
        let name = e["name"].as_str().unwrap();
        assert_eq!(v["results"]["tolerances"][name], e["tolerance"]);
    }
}

#[test]
fn korn_csv_columns() {
    let cfg = parse_config(["korn", "--kmax", "2", "--grid-n", "8", "--format", "csv"]).unwrap();
    let text = dispatch(&cfg).render(Format::Csv);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k1,k2,k3,lambda_min"));
    // every k in [-2, 2]³, the zero frequency included
    assert_eq!(lines.count(), 5usize.pow(3));
}

#[test]
fn json_floats_have_seventeen_digits() {
    let cfg = parse_config(["korn", "--kmax", "1", "--grid-n", "8"]).unwrap();
    let text = dispatch(&cfg).render(Format::Json);
    let line = text.lines().find(|l| l.contains("\"c_estimate\"")).unwrap();
    let mantissa = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let digits = mantissa.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(digits.len(), 17, "{line}");
}

#[test]
fn same_config_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = kornlab(&[
            "kernel",
            "--samples",
            "20",
            "--seed",
            "3",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn unwritable_path_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("r.json");
    let out = kornlab(&["symbol", "--samples", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write report"));
}

#[test]
fn exit_codes() {
    assert_eq!(kornlab(&["korn", "--kmax", "0"]).status.code(), Some(2));
    assert_eq!(kornlab(&["bogus"]).status.code(), Some(2));
    assert_eq!(kornlab(&["--help"]).status.code(), Some(0));
    let out = Process::new(env!("CARGO_BIN_EXE_kornlab"))
        .args(["symbol", "--samples", "5"])
        .env("KORNLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let ok = kornlab(&["symbol", "--samples", "5", "--format", "csv"]);
    assert_eq!(ok.status.code(), Some(0));
    let csv = String::from_utf8(ok.stdout).unwrap();
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn counterexample_table_is_monotone() {
    let cfg = parse_config(["counterexample", "--kmax", "12", "--format", "csv"]).unwrap();
    let report = dispatch(&cfg);
    assert!(!report.failed(), "{:?}", report.errors);
    let growth: Vec<f64> = report
        .table
        .rows
        .iter()
        .filter(|r| r[0] == "growth")
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert_eq!(growth.len(), 12);
    assert!(growth[4..].windows(2).all(|w| w[1] > w[0]));
    // half-space rows for k = 1, 2, 4, 8
    assert_eq!(
        report
            .table
            .rows
            .iter()
            .filter(|r| r[0] == "halfspace")
            .count(),
        4
    );
}

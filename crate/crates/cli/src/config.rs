use std::fmt;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_KMAX: usize = 4;
pub const DEFAULT_GRID_N: usize = 16;
pub const DEFAULT_P: f64 = 2.0;
pub const DEFAULT_BOX: [f64; 6] = [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0];
/// Top of the `k` range for `counterexample` when `--kmax` is not given.
pub const DEFAULT_COUNTEREXAMPLE_K: usize = 50;
/// Largest grid for the Lanczos cross-check (memory grows as iterations · n³).
pub const MAX_GRID_N: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Identities,
    Symbol,
    Korn,
    Counterexample,
    Kernel,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Identities => "identities",
            Command::Symbol => "symbol",
            Command::Korn => "korn",
            Command::Counterexample => "counterexample",
            Command::Kernel => "kernel",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub samples: usize,
    pub kmax: usize,
    /// Whether `kmax` came from a flag or the config file.
    pub kmax_given: bool,
    pub grid_n: usize,
    pub p: f64,
    pub bounds: [f64; 6],
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub timings: bool,
}

impl RunConfig {
    /// Upper end of the `k` range for the growth tables.
    pub fn k_range(&self) -> usize {
        if self.kmax_given {
            self.kmax
        } else {
            DEFAULT_COUNTEREXAMPLE_K
        }
    }

    /// Echo for the report. The output path is left out so that reports
    /// written to different files stay byte-identical.
    pub fn to_json(&self) -> Value {
        let kmax = match self.command {
            Command::Counterexample => self.k_range(),
            _ => self.kmax,
        };
        json!({
            "seed": self.seed,
            "samples": self.samples,
            "kmax": kmax,
            "grid_n": self.grid_n,
            "p": self.p,
            "box": self.bounds.to_vec(),
            "format": self.format.as_str(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UsageError {
    Invalid(String),
    /// `--help` or `--version` was requested; the text goes to stdout.
    Help(String),
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UsageError::Invalid(s) | UsageError::Help(s) => f.write_str(s),
        }
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(
    name = "kornlab",
    version,
    about = "Korn-type inequalities for incompatible tensor fields: identity checks, symbols, constants"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Randomised identity suite for the tensor algebra and spectral operators
    Identities(Flags),
    /// Kernel dimension, multiplier and sharp-ratio checks of the Curl symbols
    Symbol(Flags),
    /// Per-frequency Korn constant on the torus with a grid cross-check
    Korn(Flags),
    /// Growth tables for the polynomial and half-space counterexamples
    Counterexample(Flags),
    /// Kernel elements, projection and boundary rigidity
    Kernel(Flags),
}

#[derive(clap::Args, Debug, Default)]
struct Flags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// x0,y0,z0,x1,y1,z1
    #[arg(long = "box", value_name = "x0,y0,z0,x1,y1,z1")]
    bounds: Option<String>,
    #[arg(long = "out")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// TOML file with defaults for any of the above
    #[arg(long)]
    config: Option<PathBuf>,
    /// Record wall-clock time per phase (makes the report non-reproducible)
    #[arg(long)]
    timings: bool,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    samples: Option<usize>,
    kmax: Option<usize>,
    grid_n: Option<usize>,
    p: Option<f64>,
    #[serde(rename = "box")]
    bounds: Option<Vec<f64>>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

fn parse_box(s: &str) -> Result<Vec<f64>, UsageError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            UsageError::Invalid(format!(
                "--box: expected six comma-separated reals, got {s:?}"
            ))
        })
}

fn read_file_config(path: &PathBuf) -> Result<FileConfig, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        UsageError::Invalid(format!("--config: cannot read {}: {e}", path.display()))
    })?;
    toml::from_str(&text).map_err(|e| UsageError::Invalid(format!("--config: {}", e.message())))
}

/// Flags override the config file, which overrides the defaults.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("kornlab"))
        .chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => UsageError::Help(e.to_string()),
        _ => UsageError::Invalid(e.to_string()),
    })?;
    let (command, flags) = match cli.command {
        Sub::Identities(f) => (Command::Identities, f),
        Sub::Symbol(f) => (Command::Symbol, f),
        Sub::Korn(f) => (Command::Korn, f),
        Sub::Counterexample(f) => (Command::Counterexample, f),
        Sub::Kernel(f) => (Command::Kernel, f),
    };
    let file = match &flags.config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };
    let bounds = match (&flags.bounds, file.bounds) {
        (Some(s), _) => parse_box(s)?,
        (None, Some(v)) => v,
        (None, None) => DEFAULT_BOX.to_vec(),
    };
    let bounds: [f64; 6] = bounds.try_into().map_err(|v: Vec<f64>| {
        UsageError::Invalid(format!("--box: expected 6 values, got {}", v.len()))
    })?;
    let kmax_given = flags.kmax.is_some() || file.kmax.is_some();
    let cfg = RunConfig {
        command,
        seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        samples: flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
        kmax: flags.kmax.or(file.kmax).unwrap_or(DEFAULT_KMAX),
        kmax_given,
        grid_n: flags.grid_n.or(file.grid_n).unwrap_or(DEFAULT_GRID_N),
        p: flags.p.or(file.p).unwrap_or(DEFAULT_P),
        bounds,
        output_path: flags.out.or(file.out),
        format: flags.format.or(file.format).unwrap_or_default(),
        timings: flags.timings,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), UsageError> {
    if cfg.kmax < 1 {
        return Err(UsageError::Invalid("--kmax: must be at least 1".into()));
    }
    if cfg.samples < 1 {
        return Err(UsageError::Invalid("--samples: must be at least 1".into()));
    }
    if !cfg.grid_n.is_power_of_two() || cfg.grid_n < 8 || cfg.grid_n > MAX_GRID_N {
        return Err(UsageError::Invalid(format!(
            "--grid-n: must be a power of two between 8 and {MAX_GRID_N}, got {}",
            cfg.grid_n
        )));
    }
    if !(1.0..=64.0).contains(&cfg.p) {
        return Err(UsageError::Invalid(format!(
            "--p: must lie in [1, 64], got {}",
            cfg.p
        )));
    }
    let b = cfg.bounds;
    if b.iter().any(|v| !v.is_finite()) || (0..3).any(|i| b[i] >= b[i + 3]) {
        return Err(UsageError::Invalid(format!(
            "--box: need finite x0 < x1, y0 < y1, z0 < z1, got {b:?}"
        )));
    }
    Ok(())
}

/// Worker count from `KORNLAB_THREADS`; `None` means the hardware default.
pub fn threads_from_env(value: Option<&str>) -> Result<Option<usize>, UsageError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(UsageError::Invalid(format!(
                "KORNLAB_THREADS: expected a positive integer, got {v:?}"
            ))),
        },
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not skew-symmetric (|A + Aᵀ| = {0:e})")]
    NotSkew(f64),
    #[error("direction vector vanishes (|b| = {0:e})")]
    ZeroDirection(f64),
    #[error("matrix is not traceless symmetric (defect {0:e})")]
    NotTracelessSym(f64),
    #[error("vector is not of unit length (|ν| = {0})")]
    NotUnit(f64),
    #[error("frequency vector vanishes (|ξ| = {0:e})")]
    ZeroFrequency(f64),
    #[error("operator {op} cannot act on a rank-{rank} field")]
    RankMismatch { op: &'static str, rank: usize },
    #[error("field shapes differ: {0}")]
    ShapeMismatch(String),
    #[error("invalid grid size {0}: need a power of two ≥ {1}")]
    InvalidGrid(usize, usize),
    #[error("exponent p = {0} outside [1, 64]")]
    BadExponent(f64),
    #[error("band limit {kmax} too wide for n = {n} (need kmax ≤ n/2 − 1)")]
    BandTooWide { kmax: usize, n: usize },
    #[error("quadrature unresolved: relative drift {drift:e} at {points} points per axis")]
    UnderResolved { drift: f64, points: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("degenerate sample geometry (normal-matrix condition {0:e})")]
    DegenerateGeometry(f64),
    #[error("no convergence after {0} iterations (residual {1:e})")]
    NoConvergence(usize, f64),
    #[error("malformed field dump: {0}")]
    BadDump(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

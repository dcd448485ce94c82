use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension d = {0} is below 3")]
    DimensionTooSmall(u32),
    #[error("Riesz order alpha = {alpha} must lie in (0, {d})")]
    AlphaOutOfRange { d: u32, alpha: f64 },
    #[error("exponent p = {0} must exceed 1")]
    ExponentTooSmall(f64),
    #[error("grid needs at least 16 cells, got {0}")]
    GridTooSmall(usize),
    #[error("grid radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("grading power must be at least 1, got {0}")]
    InvalidGrading(f64),
    #[error("no nontrivial ground state: p = {p} is excluded by Pohožaev ({which})")]
    Excluded { p: f64, which: &'static str },
    #[error("parameters outside the dynamics range: {0}")]
    DynamicsRange(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("initial field is identically zero")]
    ZeroField,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("nonlinear fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    StepFailure { iterations: usize, residual: f64 },
    #[error("missing ground-state constants for the {0} branch")]
    MissingGroundState(&'static str),
    #[error("mass mismatch: |u0|^2 = {mass}, M_gs^2 = {target}")]
    MassMismatch { mass: f64, target: f64 },
    #[error("time {t} is outside the admissible window [0, {limit})")]
    TimeOutOfRange { t: f64, limit: f64 },
    #[error("need at least two snapshots, got {0}")]
    TooFewSnapshots(usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("kernel cache: {0}")]
    Cache(String),
    #[error("io: {0}")]
    Io(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

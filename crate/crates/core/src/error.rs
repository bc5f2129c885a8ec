use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected a {expected}-component field, got {found}")]
    Components { expected: usize, found: usize },
    #[error("grid mismatch: {0} vs {1} modes")]
    GridMismatch(usize, usize),
    #[error("field has a nonzero mean mode ({0:e})")]
    NonzeroMean(f64),
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("initial field has N = {field} but the configuration asks for N = {config}")]
    ResolutionMismatch { field: usize, config: usize },
    #[error("instability at t = {time}: energy grew by {growth:e} (relative) in one step")]
    Instability { time: f64, growth: f64 },
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InitialDataError {
    #[error("invalid initial-data parameters: {0}")]
    Spec(String),
    #[error("line integral unresolved with {nodes} nodes (tail {tail:e})")]
    QuadratureUnresolved { nodes: usize, tail: f64 },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("empty input")]
    Empty,
    #[error("extrapolation needs exactly three points, got {0}")]
    PointCount(usize),
    #[error("duplicate resolution {0} makes the extrapolation singular")]
    DuplicateDelta(f64),
    #[error("reference energy must be positive, got {0}")]
    NonpositiveReference(f64),
    #[error("invalid r-grid: {0}")]
    RGrid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("sup samples must be nonnegative and nonincreasing (violated at k = {0})")]
    NonMonotone(usize),
    #[error("envelope needs at least two knots")]
    TooShort,
    #[error("z = {z} outside [0, {k_max}]")]
    OutOfRange { z: f64, k_max: usize },
}

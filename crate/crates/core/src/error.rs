use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate singularity at {what} (guard band {guard:e})")]
    CoordinateSingularity { what: String, guard: f64 },

    #[error("invalid chart point: {0}")]
    InvalidPoint(String),

    #[error("invalid so(n,1) generator: antisymmetry residual {residual:e}")]
    InvalidGenerator { residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("determinant constraint violated: |det - 1| = {residual:e}")]
    Determinant { residual: f64 },

    #[error("matrix is not trace-free (|tr| = {residual:e})")]
    NotTraceFree { residual: f64 },

    #[error("point is not on the future hyperboloid: {0}")]
    NotOnHyperboloid(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("decay violation: {0}")]
    DecayViolation(String),

    #[error("point r = {r} lies outside the data domain (r > {min_radius})")]
    OutsideDomain { r: f64, min_radius: f64 },

    #[error("finite-difference step {0:e} is too small")]
    StepUnderflow(f64),

    #[error("metric is not invertible at the evaluation point")]
    SingularMetric,

    #[error("derivatives of order {0} are not available")]
    DerivativesUnavailable(usize),

    #[error("charge `{label}` did not converge: {reason}")]
    NonConvergence { label: String, reason: String },

    #[error("quadrature order too low: refinement changed the charge by {0:e}")]
    QuadratureTooLow(f64),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("energy-momentum is not timelike future-directed (det M = {det}, tr M = {trace})")]
    NotTimelike { det: f64, trace: f64 },

    #[error("grid file: {0}")]
    Grid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid boundary face {face} for {domain} domain")]
    InvalidFace { face: String, domain: &'static str },

    #[error("operation not supported on this domain: {0}")]
    UnsupportedDomain(String),

    #[error("singular corner geometry: gradient determinant {det:.3e} below threshold {threshold:.3e}")]
    SingularGeometry { det: f64, threshold: f64 },

    #[error("grid too small for stencil: need at least {needed} cells along an axis, have {have}")]
    StencilTooWide { needed: usize, have: usize },

    #[error("order {order} exceeds the supported cap {cap}")]
    OrderTooHigh { order: usize, cap: usize },

    #[error("field shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("equation of state outside its domain at cell {cell}: {detail}")]
    EosDomain { cell: usize, detail: String },

    #[error("invalid equation of state: {0}")]
    InvalidEos(String),

    #[error("boundary precondition violated: {detail} (max {value:.3e} > tol {tol:.3e})")]
    Precondition { detail: String, value: f64, tol: f64 },

    #[error("solver failed to converge after {iterations} iterations (relative residual {residual:.3e})")]
    SolverFailure {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("non-finite value in component {component} at cell {cell} (t = {t})")]
    NonFinite {
        component: &'static str,
        cell: usize,
        t: f64,
    },

    #[error("CFL violation: dt = {dt:.3e} exceeds limit {limit:.3e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("pressure variable kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("Picard iteration diverged at k = {k}: d = {d:.3e} grew twice in a row")]
    PicardDivergence { k: usize, d: f64 },

    #[error("state left the admissible set K_delta at t = {t}: {detail}")]
    AdmissibleSetExcursion { t: f64, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

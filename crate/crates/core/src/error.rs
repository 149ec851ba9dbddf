use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field is in {found} space, operation needs {expected} space")]
    SpaceMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("expected a {expected}-component field, got {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("ring index must be at least 1, got {0}")]
    InvalidRing(usize),

    #[error("negative-order fractional Laplacian applied to a field with nonzero mean")]
    NonzeroMean,

    #[error("heat semigroup needs t >= 0, got {0}")]
    NegativeTime(f64),

    #[error("empty time grid")]
    EmptyTimeGrid,

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),

    #[error("divergent time integral: {0}")]
    DivergentIntegral(String),

    #[error("degenerate tail fit: {0}")]
    DegenerateFit(String),

    #[error("field has content outside the cutoff ball (max coefficient {0:e})")]
    SupportViolation(f64),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("step failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

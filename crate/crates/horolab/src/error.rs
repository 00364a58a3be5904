use thiserror::Error;

/// Errors surfaced by the laboratory operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group element: {0}")]
    InvalidElement(String),
    #[error("rejection sampling failed after {0} attempts")]
    SamplingFailure(usize),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("aliasing: K-integral needs at least {needed} nodes, got {got}")]
    Aliasing { needed: usize, got: usize },
    #[error("quadrature budget exhausted: {0}")]
    QuadratureBudget(String),
    #[error("orbit precision: reversibility drift {drift:.3e} exceeds {tol:.1e}")]
    OrbitPrecision { drift: f64, tol: f64 },
    #[error("grid under-resolved: {0}")]
    Resolution(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

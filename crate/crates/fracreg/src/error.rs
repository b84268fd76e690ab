use thiserror::Error;

/// Errors surfaced by geometry construction, operator evaluation, solvers and
/// diagnostics. Report-producing operations prefer returning a report with a
/// `pass: false` entry; errors are reserved for contract violations.
#[derive(Error, Debug)]
pub enum FracError {
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("series divergent: {0}")]
    Divergence(String),
    #[error("barrier construction failed: {0}")]
    Construction(String),
    #[error("solver did not converge: residual {residual:.3e} after {iters} iterations (threshold {threshold:.3e})")]
    Nonconvergence {
        residual: f64,
        threshold: f64,
        iters: usize,
    },
}

pub type Result<T> = std::result::Result<T, FracError>;

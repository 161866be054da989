use thiserror::Error;

/// Errors raised by the library. Diagnostic outcomes (undecided verdicts,
/// failed fits) are reported in result structs, not here.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("point ({re}, {im}) is not inside the open unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("points {first} and {second} coincide; the density is infinite")]
    CoincidentPoints { first: usize, second: usize },

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("conjugate is infinite at s = {s}: derivative is bounded by {sup}")]
    ConjugateInfinite { s: f64, sup: f64 },

    #[error("perturbed pair {index} would interleave with a neighbour (rho {rho} >= {limit})")]
    Interleaving { index: usize, rho: f64, limit: f64 },

    #[error("cannot parse {kind} spec `{input}`: {reason}")]
    Spec { kind: &'static str, input: String, reason: String },

    #[error("{0}")]
    Precondition(String),

    #[error("i/o on {path}: {reason}")]
    Io { path: String, reason: String },

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> LabError {
    LabError::InvalidParameter { name, reason: reason.into() }
}

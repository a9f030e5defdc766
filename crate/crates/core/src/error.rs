use thiserror::Error;

/// Errors raised by the state, optimization and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not symmetric (max |A - A^T| = {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("state is not physical: smallest eigenvalue of I - 4AA^dagger is {margin:e}")]
    Unphysical { margin: f64 },

    #[error("I - 4AA^dagger is near singular: smallest eigenvalue {eigenvalue:e} is below {threshold:e}")]
    NearSingular { eigenvalue: f64, threshold: f64 },

    #[error("squeezing value 2d = {mu} at index {index} is not below 1")]
    UnphysicalSqueezing { index: usize, mu: f64 },

    #[error("gain makes the state unphysical (margin {margin:e}); largest feasible uniform gain is {max_uniform_gain}")]
    GainTooLarge { margin: f64, max_uniform_gain: f64 },

    #[error("core parameters violate lambda^2 (1 + s0) < 1: lambda = {lambda}, s0 = {s0}")]
    CoreUnphysical { lambda: f64, s0: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation too small: tail mass {tail:e} exceeds {eps:e}; try a truncation larger than {suggested}")]
    Truncation { tail: f64, eps: f64, suggested: usize },

    #[error("photon number {n} exceeds the truncation {cutoff}")]
    BeyondTruncation { n: usize, cutoff: usize },

    #[error("need at least {need} points for a scaling fit, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

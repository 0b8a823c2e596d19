use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its physical domain.
    #[error("invalid {field}: {value} ({reason})")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The three dimensionless coordinates do not satisfy z = x * omega_t.
    #[error("inconsistent dimensionless point: z = {z} but x * omega_t = {product}")]
    Inconsistent { z: f64, product: f64 },

    #[error("quadrature did not converge after {panels} panels: error estimate {error_estimate:e} above tolerance {tolerance:e}")]
    NonConvergence {
        panels: usize,
        error_estimate: f64,
        tolerance: f64,
    },

    #[error("integrand returned a non-finite value at k = {at}")]
    InvalidIntegrand { at: f64 },

    #[error("density matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    Positivity { min_eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("matrix is not X-shaped: off-X element of magnitude {magnitude:e}")]
    NotXShaped { magnitude: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error("sweep failed at {param} = {value}: {source}")]
    SweepPoint {
        param: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(field: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            field,
            value,
            reason,
        }
    }

    /// The innermost error, looking through sweep-point wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::SweepPoint { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

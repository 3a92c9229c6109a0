use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("eigenvalue density needs antennas >= matrix side (got N={antennas}, L={side})")]
    DensityShape { antennas: usize, side: usize },

    #[error("gamma is not positive ({0}); the parameter tuple is outside the admissible range")]
    NonPositiveGamma(f64),

    #[error("quadrature did not converge to {tol:e} (last relative change {change:e})")]
    Quadrature { tol: f64, change: f64 },

    #[error("log-det argument is not positive definite")]
    NotPositiveDefinite,

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

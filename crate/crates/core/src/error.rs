use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    Size(String),

    #[error("singular denominator: 1 + {0} = 0")]
    SingularCoupling(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("operation requires a real matrix")]
    ComplexInput,

    #[error("eigensolver did not converge for {0}")]
    NoConvergence(String),

    #[error("matrix is not symmetric (max asymmetry {defect:e} exceeds {tol:e})")]
    NotSymmetric { defect: f64, tol: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("spectrum has complex eigenvalues (max |Im| = {max_abs_imag:e})")]
    ComplexSpectrum { max_abs_imag: f64 },

    #[error("metric does not intertwine the Hamiltonian (residual {residual:e} > {limit:e})")]
    NotIntertwining { residual: f64, limit: f64 },

    #[error("no reality crossing in bracket [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("grid of {points} points exceeds the cap of {cap}")]
    GridTooLarge { points: usize, cap: usize },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

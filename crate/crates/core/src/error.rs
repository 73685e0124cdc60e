use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("matrix is not Hermitian: |A[{row}][{col}] - conj(A[{col}][{row}])| = {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("state {index} is not normalized: norm = {norm}")]
    NotNormalized { index: usize, norm: f64 },

    #[error("Gram diagonal entry {index} is {value}, expected 1")]
    NonUnitDiagonal { index: usize, value: f64 },

    #[error("Gram matrix is not positive semidefinite: min eigenvalue = {min_eigenvalue}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("capacity exceeded: estimated {estimated_terms} occupation patterns, limit {limit}")]
    Capacity { estimated_terms: u128, limit: u128 },

    #[error("{what} did not converge: tolerance {tolerance:e}, achieved {achieved:e}")]
    NoConvergence {
        what: String,
        tolerance: f64,
        achieved: f64,
    },

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            Error::NoConvergence { .. } => 4,
            _ => 2,
        }
    }
}

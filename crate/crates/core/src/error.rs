use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index ({row}, {col}) out of bounds for a {n}x{n} matrix")]
    IndexOutOfBounds { row: usize, col: usize, n: usize },

    #[error("malformed CSR structure: {0}")]
    MalformedCsr(String),

    #[error("matrix is not symmetric: entry ({row}, {col}) = {value} but mirror = {mirror}")]
    NotSymmetric {
        row: usize,
        col: usize,
        value: f64,
        mirror: f64,
    },

    #[error("right-hand side is zero; the relative residual is undefined")]
    ZeroRhs,

    #[error("vector contains a non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("zero diagonal entry at row {row}; Jacobi-type update undefined")]
    ZeroDiagonal { row: usize },

    #[error("row {row} is an isolated zero row; Jacobi-type update undefined")]
    ZeroRow { row: usize },

    #[error("block {block} of the proximal matrix is not positive definite")]
    BlockNotPositiveDefinite { block: usize },

    #[error("p'Qp = {value} <= 0 at iteration {iteration}; matrix indefinite or system inconsistent")]
    Indefinite { iteration: usize, value: f64 },

    #[error(
        "eigenvalue estimation did not converge after {steps} steps \
         (lambda_min ~ {lambda_min}, lambda_max ~ {lambda_max})"
    )]
    EigenNotConverged {
        steps: usize,
        lambda_min: f64,
        lambda_max: f64,
    },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported Matrix Market field `{0}` (only `real` is accepted)")]
    UnsupportedField(String),

    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

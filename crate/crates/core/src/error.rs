use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must have at least one row")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not Hermitian (scaled residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("eigenvalue solver failed to converge: {0}")]
    NonConvergence(String),

    #[error(
        "rank staircase inconsistent for eigenvalue {eigenvalue} (algebraic multiplicity \
         {multiplicity}, ranks {ranks:?}); try a looser or tighter tolerance"
    )]
    StaircaseInconsistent {
        eigenvalue: Complex64,
        multiplicity: usize,
        ranks: Vec<usize>,
    },

    #[error("H is not similar to its complex conjugate: unmatched eigenvalues {unmatched:?}")]
    NotSimilarToConjugate { unmatched: Vec<Complex64> },

    #[error(
        "conjugate block sizes differ for {eigenvalue}: {sizes:?} vs {conjugate_sizes:?}"
    )]
    PairingMismatch {
        eigenvalue: Complex64,
        sizes: Vec<usize>,
        conjugate_sizes: Vec<usize>,
    },

    #[error(
        "metric certificate failed verification ({reason}): residual {residual:.3e}, condQ {cond_q:.3e}"
    )]
    IllConditioned {
        reason: String,
        residual: f64,
        cond_q: f64,
    },

    #[error("metric is singular")]
    SingularMetric,

    #[error("certification failed at parameter {parameter}: {reason}")]
    CertificationFailed { parameter: f64, reason: String },

    #[error("interval [{lo}, {hi}] does not bracket a real-to-complex transition")]
    NotBracketing { lo: f64, hi: f64 },
}

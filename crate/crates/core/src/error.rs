use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max |A - A^dagger| = {deviation:e}")]
    NonHermitian { deviation: f64 },

    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("density matrix invariant violated ({invariant}): {detail}")]
    InvalidState {
        invariant: &'static str,
        detail: String,
    },

    #[error("state vector norm violation: |psi| = {norm}")]
    NormViolation { norm: f64 },

    #[error("invalid Schmidt coefficients: {0}")]
    InvalidSchmidt(String),

    #[error("subsystem dimension {0} is too small (need N >= 2)")]
    BadDimension(usize),

    #[error("rank {rank} outside 1..={max}")]
    BadRank { rank: usize, max: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unknown criterion '{0}'")]
    UnknownCriterion(String),

    #[error("criterion '{0}' is already registered")]
    DuplicateCriterion(String),

    #[error("criterion '{criterion}' is not applicable: {reason}")]
    Unsupported {
        criterion: &'static str,
        reason: &'static str,
    },

    #[error("no crossing: {0}")]
    NoCrossing(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::NumericalFailure(_))
    }
}

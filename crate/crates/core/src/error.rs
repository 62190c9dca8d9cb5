use thiserror::Error;

/// Errors raised anywhere in the compression pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The weak learner could not certify a hypothesis within its retry budget.
    #[error("weak learning failed in round {round:?} after {attempts} attempts (best fail mass {best_fail_mass})")]
    WeakLearningFailure {
        round: Option<usize>,
        attempts: usize,
        best_fail_mass: f64,
    },

    /// A weak hypothesis handed to the booster does not meet the margin it promised.
    #[error("weak learner contract violated: {0}")]
    WeakContractViolation(String),

    /// An ERM returned a hypothesis that does not fit its own training subsample.
    #[error("erm contract violated: {0}")]
    ErmContract(String),

    /// The labels cannot be fit by any member of the class.
    #[error("no consistent hypothesis: {0}")]
    ConsistencyImpossible(String),

    #[error("sparsification failed at n = {n}: {reason}")]
    SparsifyFailure { n: usize, reason: String },

    #[error("decode error: {0}")]
    Decode(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Combinatorial search hit its budget; `best` is the largest size certified so far.
    #[error("search budget of {budget} checks exhausted (best so far {best})")]
    Budget { budget: u64, best: usize },

    #[error("io error: {0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

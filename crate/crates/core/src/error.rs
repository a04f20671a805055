use thiserror::Error;

/// Errors raised by the library. Variants map onto CLI exit codes through
/// [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid step set: {0}")]
    InvalidStepSet(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-integer result: {0}")]
    NonIntegerResult(String),
    #[error("incompatible distribution: {0}")]
    IncompatibleDistribution(String),
    #[error("distribution is not injective: {0}")]
    NotInjective(String),
    #[error("profile is not surjective: {0}")]
    NonSurjectiveProfile(String),
    #[error("infeasible profile: {0}")]
    InfeasibleProfile(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("condition {condition} violated: {detail}")]
    ConditionViolated { condition: &'static str, detail: String },
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded(_) => 3,
            Error::NonIntegerResult(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn condition(condition: &'static str, detail: impl Into<String>) -> Self {
        Error::ConditionViolated { condition, detail: detail.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::verify::Failure;

/// Errors raised by cycle construction, composition and I/O.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a cycle must contain at least one symbol")]
    EmptyCycle,

    #[error("string of length {len} has no substrings of length {k}")]
    EmptyWindowSet { len: usize, k: usize },

    #[error("cycles share no common window of length {len}")]
    NoCommonWindow { len: usize },

    #[error("pool is not {k}-summable")]
    NotSummable { k: usize },

    #[error("cycle lengths {len_c} and {len_d} must both be multiples of {k}")]
    LengthNotDivisible { len_c: usize, len_d: usize, k: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("no universal cycle on {k}-subsets of [{n}] can exist: {k} does not divide C({n_1}, {k_1})", n_1 = .n - 1, k_1 = .k - 1)]
    NecessaryConditionFails { n: usize, k: usize },

    #[error("search budget of {budget_ms} ms exhausted")]
    BudgetExceeded { budget_ms: u64 },

    #[error("component constraint ({0}) does not hold")]
    ConstraintUnsatisfied(u8),

    #[error("internal contract violated: {0}")]
    ContractViolation(String),

    #[error("output is not a universal cycle: {0}")]
    VerificationFailed(Failure),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

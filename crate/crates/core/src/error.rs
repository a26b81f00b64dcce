use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("indeterminate valuation: value only known to be divisible by p^{abs_prec}")]
    IndeterminateValuation { abs_prec: i64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("insufficient precision: need {needed} digits, have {available}")]
    InsufficientPrecision { needed: i64, available: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("indeterminate comparison: {0}")]
    IndeterminateComparison(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;


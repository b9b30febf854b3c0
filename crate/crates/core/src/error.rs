use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("operation requires an odd prime, got {0}")]
    EvenPrime(u64),
    #[error("zero is not allowed here")]
    Zero,
    #[error("insufficient precision: criterion undecidable at level {level}")]
    InsufficientPrecision { level: u32 },
    #[error("p^k overflows 63 bits for p = {p}, k = {level}")]
    PrecisionOverflow { p: u64, level: u32 },
    #[error("invalid diagonal form: {0}")]
    InvalidForm(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("no evaluable presentation at the given precision")]
    NoEvaluablePresentation,
    #[error("work budget exceeded: {needed} states > {budget}; use sampling")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

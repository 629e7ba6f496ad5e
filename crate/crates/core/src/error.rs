use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("modulus is not a monic irreducible polynomial of degree {degree} over F_{p}")]
    BadModulus { p: u64, degree: usize },
    #[error("field of order {p}^{degree} does not fit the 63-bit element encoding")]
    FieldTooLarge { p: u64, degree: usize },
    #[error("element {0} does not belong to this field")]
    ForeignElement(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{r} does not divide m = {m}")]
    NotADivisor { r: usize, m: usize },
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("workload {workload} exceeds budget {budget} ({what})")]
    BudgetExceeded { what: String, workload: String, budget: u64 },
    #[error("generator matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("code is degenerate: columns span only {rank} of {n} F_q-dimensions")]
    Degenerate { rank: usize, n: usize },
    #[error("system does not span the ambient space: F_(q^m)-rank {rank} < {k}")]
    NotSpanning { rank: usize, k: usize },
    #[error("linear map is not invertible")]
    NotInvertible,
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
    #[error("certificate error: {0}")]
    Certificate(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }

    /// Budget refusals are distinguished from bad input at the process boundary.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

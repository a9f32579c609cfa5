use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("field of order {p}^{n} exceeds the table capacity of 2^24 elements")]
    FieldTooLarge { p: u64, n: u32 },

    #[error(
        "operands belong to different fields (GF({left_p}^{left_n}) and GF({right_p}^{right_n}))"
    )]
    FieldMismatch {
        left_p: u32,
        left_n: u32,
        right_p: u32,
        right_n: u32,
    },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("{0}")]
    Domain(String),

    #[error("invalid tower: {0}")]
    InvalidTower(String),

    #[error("work estimate {required} exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

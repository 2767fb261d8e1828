use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("location {value} at input position {position} is outside [0, 1]")]
    OutOfRange { position: usize, value: f64 },

    #[error("plans at input positions {first} and {second} coincide")]
    DegenerateTie { first: usize, second: usize },

    #[error("profile must contain at least one plan")]
    EmptyProfile,

    #[error("ideal point {0} is outside [0, 1]")]
    IdealOutOfRange(f64),

    #[error("pricing requires at least two competing plans, got {0}")]
    UnsupportedMonopoly(usize),

    #[error("plan index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("duplicate plan index {0} in adoption set")]
    DuplicateIndex(usize),

    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("price {0} is negative")]
    NegativePrice(f64),

    #[error("plan count must be at least 1")]
    InvalidCount,

    #[error("fixed cost must be positive, got {0}")]
    NonpositiveFixedCost(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, GameError>;

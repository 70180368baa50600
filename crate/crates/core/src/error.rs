use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{what} must be strictly increasing (violated at index {index})")]
    NotIncreasing { what: &'static str, index: usize },

    #[error("{what} too short: need at least {min} points, got {len}")]
    TooShort {
        what: &'static str,
        min: usize,
        len: usize,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no zero in range")]
    NoZeroInRange,

    #[error("half-maximum level is not crossed within the grid")]
    HalfLevelNotCrossed,

    #[error("total integrated intensity is zero")]
    ZeroIntensity,

    #[error("no root in range: Im B keeps its sign for |zeta| <= {zeta_max}")]
    NoRootInRange { zeta_max: f64 },

    #[error("evaluation failure: observable returned {value} at zeta = {zeta}")]
    EvaluationFailure { zeta: f64, value: String },

    #[error("root refinement stalled at zeta = {zeta} with residual {residual}")]
    NotConverged { zeta: f64, residual: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Input(String),

    #[error("adjustment undefined for E = 0")]
    ZeroEnergy,
}

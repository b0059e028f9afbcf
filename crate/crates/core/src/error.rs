use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("side length must be at least 2, got {0}")]
    InvalidSideLength(usize),

    #[error("bitstring of length {got} does not match the {expected} bits required for s={s}")]
    LengthMismatch {
        s: usize,
        expected: usize,
        got: usize,
    },

    #[error("cell ({row},{col}) is out of range for side length {s}")]
    OutOfRange { row: usize, col: usize, s: usize },

    #[error("matrix is not a 1-input")]
    NotAOneInput,

    #[error("degenerate input for log-log fit: {0}")]
    DegenerateInput(String),

    #[error("zpp driver exceeded the round limit of {0}")]
    RoundLimitExceeded(u32),

    #[error("malformed matrix file: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

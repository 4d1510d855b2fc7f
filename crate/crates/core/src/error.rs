use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index ({0}, {1}) out of range for bases ({2}, {3})")]
    IndexOutOfRange(usize, usize, usize, usize),

    #[error("base mismatch: {left} vs {right}")]
    BaseMismatch { left: usize, right: usize },

    #[error("cannot refine from level {from} down to level {to}")]
    LevelDecrease { from: usize, to: usize },

    #[error("digit {digit} out of range for alphabet of size {alphabet}")]
    DigitOutOfRange { digit: usize, alphabet: usize },

    #[error("expected {expected} coefficients, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("word {0:?} ends in 0 and is not canonical")]
    NonCanonicalWord(Vec<usize>),

    #[error("rows do not form a Parseval frame (deviation {deviation:e})")]
    NotParsevalInput { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid source matrix: {0}")]
    InvalidSource(String),

    #[error("dilation needs N*N' >= M, got N={n}, N'={nprime}, M={m}")]
    InsufficientDilation { n: usize, nprime: usize, m: usize },

    #[error("orthonormal completion failed: {0}")]
    CompletionFailure(String),

    #[error("level {level} exceeds the configured maximum {max}")]
    LevelTooLarge { level: usize, max: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

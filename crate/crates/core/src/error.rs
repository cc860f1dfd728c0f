use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("orbit value overflowed 128 bits at step {step} starting from {start}")]
    Overflow { start: u128, step: u64 },

    #[error("invalid family parameters a={a}, b={b}: {reason}")]
    InvalidFamily { a: f64, b: f64, reason: String },

    #[error("family ({a}, {b}) has non-integer coefficients; orbit iteration is undefined")]
    NonIntegerFamily { a: f64, b: f64 },

    #[error("step cap {cap} exceeded")]
    CapExceeded { cap: u64 },

    #[error("empty input")]
    EmptyInput,

    #[error("empty range")]
    EmptyRange,

    #[error("sequence is not a cycle: element at index {at} does not map to its successor")]
    NotACycle { at: usize },

    #[error("circular mean is degenerate: resultant length below 1e-9")]
    DegenerateMean,

    #[error("no reference table registered under \"{0}\"")]
    UnknownCounterpart(String),

    #[error("bad input: {0}")]
    BadInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("filling p = {0} must lie strictly between 0 and 1")]
    FillingOutOfRange(f64),

    #[error("weight vector has {got} entries, expected {expected}")]
    WeightLength { expected: usize, got: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("spectrum is not normalized (sum deviates from 1 by {0:e})")]
    Unnormalized(f64),

    #[error("log fit needs at least 3 points with distinct block sizes >= 2")]
    DegenerateFit,

    #[error("oracle: {0}")]
    Oracle(String),

    #[error("empty parameter range")]
    EmptyRange,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

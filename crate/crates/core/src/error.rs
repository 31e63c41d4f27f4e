use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series `{name}` is too short: need at least {required} values, got {actual}")]
    SeriesTooShort {
        name: String,
        required: usize,
        actual: usize,
    },

    #[error("test length {test_len} must be smaller than the series length {len}")]
    SplitTooLarge { test_len: usize, len: usize },

    #[error("cannot normalize: all training values equal {value}")]
    DegenerateRange { value: f64 },

    #[error("length mismatch: actual has {actual} values, predicted has {predicted}")]
    LengthMismatch { actual: usize, predicted: usize },

    #[error("MAPE undefined: |actual| at position {index} is {value}, at or below the floor")]
    ZeroTarget { index: usize, value: f64 },

    #[error("R² undefined for a constant actual series")]
    ConstantActual,

    #[error("series `{0}` is constant")]
    ConstantSeries(String),

    #[error("need {required} embedded vectors for {k} neighbors, only {available} available")]
    NotEnoughNeighbors {
        k: usize,
        required: usize,
        available: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("attention over an empty sequence")]
    EmptySequence,

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("input contains no observations")]
    EmptyInput,

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn too_short(name: &str, required: usize, actual: usize) -> Self {
        Error::SeriesTooShort {
            name: name.to_string(),
            required,
            actual,
        }
    }

    pub(crate) fn non_finite(context: impl Into<String>) -> Self {
        Error::NonFinite {
            context: context.into(),
        }
    }

    /// Process exit code: 1 usage/config, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter { .. } | Error::ShapeMismatch(_) => 1,
            Error::NonFinite { .. } | Error::NumericalFailure(_) => 3,
            _ => 2,
        }
    }
}

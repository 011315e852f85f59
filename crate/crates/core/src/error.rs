//! Crate-wide error type. Every fallible operation returns [`Result`].

/// Errors raised by the pipeline and its subsystems.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Radar reading violates its invariants (non-finite values, f_o <= 0).
    #[error("invalid radar reading: {0}")]
    InvalidReading(String),

    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Plate text outside the A-Z0-9 charset or the 1..=10 length bounds.
    #[error("invalid plate text: {0}")]
    InvalidPlate(String),

    /// Plate image geometry does not match the fixed glyph layout.
    #[error("segmentation failed: {0}")]
    Segmentation(String),

    /// A text file failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Two entries share a key that must be unique.
    #[error("duplicate plate: {0}")]
    DuplicateKey(String),

    /// Fitting requires both classes to be present.
    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),

    /// Structurally invalid input to an operation (e.g. mismatched lengths).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The pipeline is missing a required component.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

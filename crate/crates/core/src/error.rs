use alloc::string::String;

/// Errors raised by the engine.
///
/// Law violations found while *checking* an object are usually reported
/// through dedicated report types; this enum covers inputs an operation
/// cannot work with at all.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid category: {0}")]
    InvalidCategory(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("index {index} out of range (expected < {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("decode error: {0}")]
    Decode(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

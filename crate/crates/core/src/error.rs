use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CfxError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, CfxError>;

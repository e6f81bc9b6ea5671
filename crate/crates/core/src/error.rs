use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid letter: {0}")]
    InvalidLetter(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("not a Lyndon word of length >= 2: {0}")]
    NotLyndon(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("truncation: {0}")]
    Truncation(String),
    #[error("{0}")]
    Domain(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

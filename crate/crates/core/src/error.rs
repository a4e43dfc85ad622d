use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown case `{name}` (valid: {valid})")]
    UnknownCase { name: String, valid: String },

    #[error("unknown topology `{name}` (valid: {valid})")]
    UnknownTopology { name: String, valid: String },

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("size mismatch: {0}")]
    Size(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("cannot allocate {bytes} bytes for state")]
    Resource { bytes: u128 },

    #[error("no valid decomposition: {0}")]
    Decomposition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("report coverage mismatch: {0}")]
    Coverage(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

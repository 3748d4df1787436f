use std::path::PathBuf;

use thiserror::Error;

use crate::symkernel::SymError;

/// Errors raised outside the symbolic kernel.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("conformal factor `{psi}` does not satisfy the conformal Killing equation of the field")]
    PsiMismatch { psi: String },
    #[error("invalid generator combination `{text}`: {reason}")]
    Combination { text: String, reason: String },
    #[error("missing data file {}", .0.display())]
    MissingData(PathBuf),
    #[error("malformed data file {file}: {reason}")]
    Data { file: String, reason: String },
    #[error("catalog self-check failed for X{index}: {reason}")]
    Catalog { index: usize, reason: String },
    #[error("{0}")]
    Precondition(String),
    #[error("invalid ansatz: {0}")]
    Ansatz(String),
}

pub type Result<T> = std::result::Result<T, Error>;

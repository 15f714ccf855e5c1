//! File formats, parallel benchmark drivers and the `semistart` command line
//! on top of [`semistart_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::Path;

pub mod bench;
pub mod cli;
pub mod io;

pub use semistart_core as core;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flag combinations or values; exit code 2.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] semistart_core::Error),
    #[error("{0}")]
    Format(String),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub(crate) fn file(path: &Path, source: std::io::Error) -> Self {
        CliError::File { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

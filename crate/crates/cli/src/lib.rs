//! Library side of the psdpack command-line tool: experiment configuration,
//! the packing catalog, and the fig1/fig2 experiment harness. The binary in
//! `main.rs` is a thin argument-parsing layer over these modules.

pub mod catalog;
pub mod config;
pub mod experiments;
pub mod output;

use std::fmt;

/// CLI-level error with a dedicated process exit code: usage errors exit 2,
/// numerical failures 3, non-convergence 4, catalog misses 5.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    NonConvergence(String),
    CatalogMiss(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::NonConvergence(_) => 4,
            CliError::CatalogMiss(_) => 5,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Numerical(msg) => write!(f, "{msg}"),
            CliError::NonConvergence(msg) => write!(f, "did not converge: {msg}"),
            CliError::CatalogMiss(msg) => write!(f, "catalog miss: {msg}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<psdpack::Error> for CliError {
    fn from(e: psdpack::Error) -> Self {
        use psdpack::Error as E;
        match e {
            E::Parse(_) | E::Json(_) | E::InvalidArgument(_) | E::DimensionMismatch(_) => {
                CliError::Usage(e.to_string())
            }
            E::Numerical(_)
            | E::NotPsd { .. }
            | E::NotChordal { .. }
            | E::Degenerate(_)
            | E::PackingFailed(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

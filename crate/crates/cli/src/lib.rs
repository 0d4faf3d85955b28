//! Solve, certify and plot Poncelet configurations from the command line.
//!
//! Configurations are stored as versioned JSON documents and plotted as
//! plain SVG 1.1.

pub mod args;
pub mod commands;
pub mod json;
pub mod settings;
pub mod svg;

use std::path::PathBuf;

use poncelet_core::SolverError;
use thiserror::Error;

pub use args::{Cli, Command, SolveCommand};
pub use json::{Document, Payload};

/// Process exit code for a certified result.
pub const EXIT_OK: u8 = 0;
/// Process exit code when certification fails.
pub const EXIT_CERTIFICATION: u8 = 1;
/// Process exit code for usage, parse and validation errors.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("certification failed:\n{0}")]
    Certification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } => EXIT_USAGE,
            CliError::Solver(
                SolverError::OutOfDisk { .. }
                | SolverError::InvalidTriangleParam { .. }
                | SolverError::DegenerateConfiguration(_),
            ) => EXIT_USAGE,
            CliError::Solver(_) | CliError::Certification(_) => EXIT_CERTIFICATION,
        }
    }
}

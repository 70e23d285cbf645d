use std::path::PathBuf;

use thiserror::Error;

/// Failures of a run, each with a stable exit code. Usage errors and unknown
/// subcommands are reported by the argument parser with code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed config: {0}")]
    Config(String),
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("run failed: {0}")]
    Runtime(#[from] graphon_ldp::Error),
    #[error("cannot write {path}: {err}", path = .0.display(), err = .1)]
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::MissingFile(_) => 4,
            CliError::Runtime(_) => 5,
            CliError::Io(..) => 6,
        }
    }
}

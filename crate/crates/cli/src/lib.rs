//! Config-driven runs and sweeps over the bosonet library.

pub mod config;
pub mod output;
pub mod run;
pub mod selftest;
pub mod sweep;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config at `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error(transparent)]
    Core(#[from] bosonet::Error),
    #[error("oracle: {0}")]
    Oracle(#[from] bosonet_oracle::OracleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for anything the config author can fix, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } | CliError::Core(bosonet::Error::Validation { .. }) => 2,
            CliError::Core(bosonet::Error::DimensionMismatch { .. }) => 2,
            _ => 1,
        }
    }
}

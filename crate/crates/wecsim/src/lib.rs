//! Command-line companion to `wecsim-core`: configuration parsing, CSV
//! export, self-check oracle suites, and PD gain tuning.
//!
//! The library half exists so integration tests can exercise the exact code
//! paths the binary uses; `main.rs` is a thin dispatcher over these modules.

pub mod config;
pub mod export;
pub mod oracle;
pub mod tune;

use std::fmt;

/// Process-level error with a defined exit code:
/// 1 validation, 2 runtime numeric failure, 3 oracle-suite failure.
#[derive(Debug)]
pub enum CliError {
    /// Configuration, parameter, or usage problem (exit 1).
    Validation {
        /// 1-based config line, when the error came from a config file.
        line: Option<usize>,
        /// Human-readable description naming the offending key/constraint.
        message: String,
    },
    /// I/O failure with path context (exit 1).
    Io {
        /// Path being read or written.
        path: String,
        /// Underlying error.
        source: std::io::Error,
    },
    /// The integrator produced a non-finite state (exit 2).
    Numeric {
        /// Diagnostic naming the component and time.
        message: String,
    },
    /// One or more oracle suites exceeded tolerance (exit 3).
    OracleFailure {
        /// Names of the failing suites.
        failed: Vec<String>,
    },
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } | CliError::Io { .. } => 1,
            CliError::Numeric { .. } => 2,
            CliError::OracleFailure { .. } => 3,
        }
    }

    /// Wraps a core-model error, classifying integrator divergence as a
    /// numeric failure and everything else as validation.
    pub fn from_core(err: wecsim_core::Error) -> Self {
        match err {
            wecsim_core::Error::NonFinite { .. } => CliError::Numeric {
                message: err.to_string(),
            },
            _ => CliError::Validation {
                line: None,
                message: err.to_string(),
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation {
                line: Some(n),
                message,
            } => {
                write!(f, "config line {n}: {message}")
            }
            CliError::Validation {
                line: None,
                message,
            } => write!(f, "{message}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::Numeric { message } => write!(f, "numeric failure: {message}"),
            CliError::OracleFailure { failed } => {
                write!(f, "oracle suites failed: {}", failed.join(", "))
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<wecsim_core::Error> for CliError {
    fn from(err: wecsim_core::Error) -> Self {
        CliError::from_core(err)
    }
}

/// Reads `WECSIM_THREADS` as an upper bound on parallel scenario runs.
/// Unset means no cap; a set value must parse as an integer ≥ 1.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("WECSIM_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Validation {
            line: None,
            message: format!("WECSIM_THREADS: {e}"),
        }),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Validation {
                line: None,
                message: format!("WECSIM_THREADS: expected an integer >= 1, got {raw:?}"),
            }),
        },
    }
}

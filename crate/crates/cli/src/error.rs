use std::path::PathBuf;

use thiserror::Error;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    CheckFailed = 1,
    ConfigInvalid = 2,
    IntegrationFailure = 3,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }

    /// The more severe of two statuses.
    pub fn worst(self, other: Exit) -> Exit {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{source}; increase oracle.N (for example --set oracle.N={suggested})")]
    Truncation {
        source: qtrap_core::Error,
        suggested: usize,
    },

    #[error(transparent)]
    Core(#[from] qtrap_core::Error),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        use qtrap_core::Error as E;
        match self {
            CliError::Read { .. }
            | CliError::Write { .. }
            | CliError::Config(_)
            | CliError::Truncation { .. } => Exit::ConfigInvalid,
            CliError::Core(e) => match e {
                E::ZeroCrossing { .. } | E::StepFailure { .. } | E::OutOfInterval { .. } => {
                    Exit::IntegrationFailure
                }
                E::InvalidArgument(_)
                | E::NonCanonicalInitialConditions { .. }
                | E::GridTooCoarse { .. }
                | E::TruncationTooSmall { .. } => Exit::ConfigInvalid,
                E::ComplexLeak { .. }
                | E::NonCanonical { .. }
                | E::DegenerateMoments { .. }
                | E::Overflow { .. } => Exit::CheckFailed,
            },
        }
    }

    /// Wraps a truncation refusal with a suggested larger space.
    pub fn from_oracle(e: qtrap_core::Error) -> Self {
        match e {
            qtrap_core::Error::TruncationTooSmall { n, .. } => CliError::Truncation {
                source: e,
                suggested: 2 * n,
            },
            other => CliError::Core(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

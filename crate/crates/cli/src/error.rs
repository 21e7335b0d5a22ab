use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Invariant(String),

    #[error(transparent)]
    Core(wva_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Io { .. } => 2,
            Self::Invariant(_) | Self::Core(_) => 1,
        }
    }
}

impl From<wva_core::Error> for CliError {
    fn from(e: wva_core::Error) -> Self {
        match e {
            wva_core::Error::Input(m) => Self::Config(m),
            wva_core::Error::InvariantViolation(m) => Self::Invariant(m),
            other => Self::Core(other),
        }
    }
}

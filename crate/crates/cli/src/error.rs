use std::path::PathBuf;

use causal_forge::embed::EmbedError;
use causal_forge::sat::SatError;
use causal_forge::transform::TransformError;
use causal_forge::{GraphError, PlanningError};
use thiserror::Error;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
    #[error("{0}")]
    Budget(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Budget(_) => EXIT_BUDGET,
            _ => EXIT_FAILURE,
        }
    }

    pub fn input(path: impl Into<PathBuf>, e: impl ToString) -> Self {
        CliError::Input {
            path: path.into(),
            message: e.to_string(),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::BudgetExhausted(_) => CliError::Budget(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<PlanningError> for CliError {
    fn from(e: PlanningError) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<SatError> for CliError {
    fn from(e: SatError) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Graph(g) => g.into(),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::Graph(g) => g.into(),
            EmbedError::Transform(t) => t.into(),
            EmbedError::InsufficientCapacity { proven: false, .. } => CliError::Budget(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

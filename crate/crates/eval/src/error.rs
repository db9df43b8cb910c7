use thiserror::Error;
use vcontact_core::{ModelError, ProcessingError};
use vcontact_sim::SimError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("alpha grid is empty")]
    EmptyGrid,
    #[error("alpha grid must be ascending within (0, 1]: {0}")]
    InvalidGrid(String),
    #[error("dataset has no records")]
    EmptyDataset,
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Processing(#[from] ProcessingError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl EvalError {
    /// Whether the error stems from user-supplied configuration.
    pub fn is_config(&self) -> bool {
        matches!(self, EvalError::Config(_) | EvalError::InvalidGrid(_) | EvalError::EmptyGrid | EvalError::Sim(SimError::Config(_)))
    }
}

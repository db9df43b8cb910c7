use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("scenario config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] vcontact_core::ModelError),
}

impl SimError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        SimError::Invalid { field, reason: reason.into() }
    }
}

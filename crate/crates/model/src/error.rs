use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("encoder: {0}")]
    Encoder(String),

    #[error("dimension mismatch: {context} expected {expected}, got {got}")]
    Dimension {
        context: String,
        expected: usize,
        got: usize,
    },

    #[error("training: {0}")]
    Train(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Serde(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] sciie_core::CoreError),
}

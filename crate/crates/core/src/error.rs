use thiserror::Error;

pub type Result<T, E = CoreError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("empty corpus: {0}")]
    EmptyCorpus(String),
    #[error("all off-diagonal similarities are zero; the map would be fully disconnected")]
    DisconnectedSimilarities,
    #[error("partition covers {got} vertices, graph has {expected}")]
    PartitionMismatch { expected: usize, got: usize },
    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: &'static str, message: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("counts file line {line}: {message}")]
    Counts { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CoreError {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        CoreError::InvalidParameter {
            field,
            message: message.into(),
        }
    }
}

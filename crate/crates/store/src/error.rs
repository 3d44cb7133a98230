use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed XML near byte {position}: {message}")]
    Xml { position: u64, message: String },
    #[error("invalid filter `{field}`: {message}")]
    InvalidFilter { field: &'static str, message: String },
    #[error(transparent)]
    Sqlite(#[from] rusqlite::Error),
}

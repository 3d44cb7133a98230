//! Persistent, queryable storage for DBLP-style bibliographic records.

pub mod dblp;
mod error;
pub mod language;
pub mod sample;
mod store;

pub use error::{Result, StoreError};
pub use language::{classify_language, Language};
pub use store::{
    AuthorInfo, CorpusStats, CorpusStore, IngestOptions, IngestReport, NewDocument, VenueInfo, VenueRef, MAX_YEAR,
    MIN_YEAR,
};

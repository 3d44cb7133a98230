//! Jobs, HTTP API and CLI around the map pipeline.

pub mod api;
pub mod artifacts;
pub mod cli;
pub mod config;
pub mod error;
pub mod jobs;
pub mod request;
pub mod runner;

pub use error::{FieldError, Result, ServiceError};

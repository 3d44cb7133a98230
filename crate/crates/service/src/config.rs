//! Service configuration from an optional TOML file plus environment overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub store_path: PathBuf,
    pub output_dir: PathBuf,
    /// Worker threads for jobs; 0 means the host's available parallelism.
    pub workers: usize,
    pub host: String,
    pub port: u16,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            store_path: PathBuf::from("mocs.db"),
            output_dir: PathBuf::from("mocs-output"),
            workers: 0,
            host: "127.0.0.1".to_string(),
            port: 8080,
        }
    }
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| ServiceError::Config(e.to_string()))
    }

    /// Reads `path` when given (or `MOCS_CONFIG`), then applies `MOCS_STORE`,
    /// `MOCS_OUTPUT`, `MOCS_WORKERS`, `MOCS_HOST` and `MOCS_PORT`.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let env_path = std::env::var_os("MOCS_CONFIG").map(PathBuf::from);
        let mut config = match path.map(Path::to_path_buf).or(env_path) {
            Some(p) => {
                let text = std::fs::read_to_string(&p).map_err(|e| ServiceError::io(format!("reading {}", p.display()), e))?;
                Self::from_toml_str(&text)?
            }
            None => Config::default(),
        };
        config.apply_env(|k| std::env::var(k).ok())?;
        Ok(config)
    }

    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<()> {
        if let Some(v) = lookup("MOCS_STORE") {
            self.store_path = v.into();
        }
        if let Some(v) = lookup("MOCS_OUTPUT") {
            self.output_dir = v.into();
        }
        if let Some(v) = lookup("MOCS_WORKERS") {
            self.workers = v.parse().map_err(|_| ServiceError::Config(format!("MOCS_WORKERS: not a count: {v}")))?;
        }
        if let Some(v) = lookup("MOCS_HOST") {
            self.host = v;
        }
        if let Some(v) = lookup("MOCS_PORT") {
            self.port = v.parse().map_err(|_| ServiceError::Config(format!("MOCS_PORT: not a port: {v}")))?;
        }
        Ok(())
    }

    pub fn worker_count(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        }
    }
}

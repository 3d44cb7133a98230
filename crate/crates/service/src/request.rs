//! Request types shared by the HTTP API and the CLI.

use mocs_core::{BasemapParams, DocumentFilter, HeatmapParams};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::FieldError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BasemapRequest {
    #[serde(default)]
    pub filter: DocumentFilter,
    #[serde(flatten)]
    pub params: BasemapParams,
}

impl BasemapRequest {
    pub fn validate(&self) -> Vec<FieldError> {
        let mut errors: Vec<FieldError> = self
            .filter
            .validate()
            .into_iter()
            .map(|(f, m)| FieldError::new(format!("filter.{f}"), m))
            .collect();
        errors.extend(self.params.validate().into_iter().map(|(f, m)| FieldError::new(f, m)));
        errors
    }

    /// Parses a JSON body. Unknown top-level keys are rejected and type errors
    /// name the offending field path.
    pub fn from_json(body: &[u8]) -> Result<Self, Vec<FieldError>> {
        let value: serde_json::Value = parse_json(body)?;
        let serde_json::Value::Object(mut obj) = value else {
            return Err(vec![FieldError::new("body", "expected a JSON object")]);
        };
        let known = match serde_json::to_value(BasemapParams::default()) {
            Ok(serde_json::Value::Object(m)) => m,
            _ => unreachable!("params serialize to an object"),
        };
        let unknown: Vec<FieldError> = obj
            .keys()
            .filter(|k| k.as_str() != "filter" && !known.contains_key(k.as_str()))
            .map(|k| FieldError::new(k.clone(), "unknown field"))
            .collect();
        if !unknown.is_empty() {
            return Err(unknown);
        }
        let filter = match obj.remove("filter") {
            Some(v) => from_value(v).map_err(|mut e| {
                e.iter_mut().for_each(|f| f.field = prefixed("filter", &f.field));
                e
            })?,
            None => DocumentFilter::default(),
        };
        let params = from_value(serde_json::Value::Object(obj))?;
        Ok(BasemapRequest { filter, params })
    }

    /// Content hash of the canonical request JSON.
    pub fn id(&self) -> String {
        content_id("basemap", &canonical_json(self))
    }
}

/// Overlay target: a document query or free text such as an abstract.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<DocumentFilter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default)]
    pub params: HeatmapParams,
}

impl HeatmapRequest {
    pub fn validate(&self) -> Vec<FieldError> {
        let mut errors = Vec::new();
        match (&self.filter, &self.text) {
            (Some(f), None) => {
                errors.extend(f.validate().into_iter().map(|(k, m)| FieldError::new(format!("filter.{k}"), m)))
            }
            (None, Some(_)) => {}
            (None, None) => errors.push(FieldError::new("target", "give either `filter` or `text`")),
            (Some(_), Some(_)) => errors.push(FieldError::new("target", "give only one of `filter` and `text`")),
        }
        errors.extend(self.params.validate().into_iter().map(|(k, m)| FieldError::new(format!("params.{k}"), m)));
        errors
    }

    pub fn id(&self, basemap_id: &str) -> String {
        content_id("heatmap", &format!("{basemap_id}\n{}", canonical_json(self)))
    }
}

pub fn canonical_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("requests serialize")
}

/// First 16 hex digits of SHA-256 over `kind`, a newline and `body`.
pub fn content_id(kind: &str, body: &str) -> String {
    let digest = Sha256::digest(format!("{kind}\n{body}").as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Deserializes JSON, reporting the failing field path.
pub fn parse_json<T: DeserializeOwned>(body: &[u8]) -> Result<T, Vec<FieldError>> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| vec![path_error(e)])
}

fn prefixed(prefix: &str, field: &str) -> String {
    if field == "body" {
        prefix.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

fn from_value<T: DeserializeOwned>(value: serde_json::Value) -> Result<T, Vec<FieldError>> {
    serde_path_to_error::deserialize(value).map_err(|e| vec![path_error(e)])
}

fn path_error(e: serde_path_to_error::Error<serde_json::Error>) -> FieldError {
    let path = e.path().to_string();
    let field = if path == "." { "body".to_string() } else { path };
    FieldError::new(field, e.into_inner().to_string())
}

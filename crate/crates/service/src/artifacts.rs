//! On-disk artifacts, keyed by request content hash.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use mocs_core::BaseMap;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};
use crate::request::{BasemapRequest, HeatmapRequest};

pub const BASEMAP_SVG: &str = "basemap.svg";
pub const TERMS_JSON: &str = "terms.json";
pub const BASEMAP_JSON: &str = "basemap.json";
pub const REQUEST_JSON: &str = "request.json";
pub const HEATMAP_SVG: &str = "heatmap.svg";
pub const INTENSITIES_JSON: &str = "intensities.json";

/// Contents of `request.json` next to a basemap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasemapRecord {
    pub id: String,
    pub request: BasemapRequest,
}

/// Contents of `request.json` next to an overlay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRecord {
    pub id: String,
    pub basemap_id: String,
    pub request: HeatmapRequest,
}

/// Rendered basemap files.
#[derive(Debug, Clone, PartialEq)]
pub struct BasemapFiles {
    pub id: String,
    pub svg: Vec<u8>,
    pub terms_json: String,
    pub basemap_json: String,
    pub request_json: String,
}

impl BasemapFiles {
    pub fn entries(&self) -> [(&'static str, &[u8]); 4] {
        [
            (BASEMAP_SVG, &self.svg),
            (TERMS_JSON, self.terms_json.as_bytes()),
            (BASEMAP_JSON, self.basemap_json.as_bytes()),
            (REQUEST_JSON, self.request_json.as_bytes()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapFiles {
    pub id: String,
    pub svg: Vec<u8>,
    pub intensities_json: String,
    pub request_json: String,
}

impl HeatmapFiles {
    pub fn entries(&self) -> [(&'static str, &[u8]); 3] {
        [
            (HEATMAP_SVG, &self.svg),
            (INTENSITIES_JSON, self.intensities_json.as_bytes()),
            (REQUEST_JSON, self.request_json.as_bytes()),
        ]
    }
}

pub fn write_files(dir: &Path, entries: &[(&str, &[u8])]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| ServiceError::io(format!("creating {}", dir.display()), e))?;
    for (name, bytes) in entries {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| ServiceError::io(format!("writing {}", path.display()), e))?;
    }
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| ServiceError::io(format!("reading {}", path.display()), e))?;
    serde_json::from_str(&text)
        .map_err(|e| ServiceError::Artifact { path: path.display().to_string(), message: e.to_string() })
}

/// Loads `basemap.json` and the id from `request.json` in a basemap directory.
pub fn load_basemap_dir(dir: &Path) -> Result<(String, BaseMap)> {
    let record: BasemapRecord = read_json(&dir.join(REQUEST_JSON))?;
    let map: BaseMap = read_json(&dir.join(BASEMAP_JSON))?;
    Ok((record.id, map))
}

/// `root/basemaps/{id}/` and `root/heatmaps/{id}/`. Each directory appears
/// atomically: files are written to a scratch directory that is then renamed.
#[derive(Debug, Clone)]
pub struct ArtifactStore {
    root: PathBuf,
}

static SCRATCH: AtomicU64 = AtomicU64::new(0);

impl ArtifactStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ArtifactStore { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn basemap_dir(&self, id: &str) -> PathBuf {
        self.root.join("basemaps").join(id)
    }

    pub fn heatmap_dir(&self, id: &str) -> PathBuf {
        self.root.join("heatmaps").join(id)
    }

    pub fn has_basemap(&self, id: &str) -> bool {
        valid_id(id) && self.basemap_dir(id).join(REQUEST_JSON).is_file()
    }

    pub fn has_heatmap(&self, id: &str) -> bool {
        valid_id(id) && self.heatmap_dir(id).join(REQUEST_JSON).is_file()
    }

    pub fn load_basemap(&self, id: &str) -> Result<BaseMap> {
        if !self.has_basemap(id) {
            return Err(ServiceError::NotFound(format!("basemap {id}")));
        }
        Ok(load_basemap_dir(&self.basemap_dir(id))?.1)
    }

    /// Bytes of one artifact file, or `None` when it does not exist.
    pub fn read(&self, kind: &str, id: &str, file: &str) -> Option<Vec<u8>> {
        if !valid_id(id) {
            return None;
        }
        let dir = match kind {
            "basemaps" => self.basemap_dir(id),
            "heatmaps" => self.heatmap_dir(id),
            _ => return None,
        };
        fs::read(dir.join(file)).ok()
    }

    pub fn save_basemap(&self, files: &BasemapFiles) -> Result<PathBuf> {
        self.publish(self.basemap_dir(&files.id), &files.entries())
    }

    pub fn save_heatmap(&self, files: &HeatmapFiles) -> Result<PathBuf> {
        self.publish(self.heatmap_dir(&files.id), &files.entries())
    }

    fn publish(&self, target: PathBuf, entries: &[(&str, &[u8])]) -> Result<PathBuf> {
        let parent = target.parent().expect("artifact dirs have a parent").to_path_buf();
        let scratch = parent.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            SCRATCH.fetch_add(1, Ordering::Relaxed)
        ));
        write_files(&scratch, entries)?;
        match fs::rename(&scratch, &target) {
            Ok(()) => Ok(target),
            Err(_) if target.join(REQUEST_JSON).is_file() => {
                // Another worker published the same content first.
                let _ = fs::remove_dir_all(&scratch);
                Ok(target)
            }
            Err(e) => {
                let _ = fs::remove_dir_all(&scratch);
                Err(ServiceError::io(format!("publishing {}", target.display()), e))
            }
        }
    }
}

/// Ids are lowercase hex; anything else never names a file.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase())
}

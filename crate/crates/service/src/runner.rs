//! Pipeline runs shared by the CLI and the job workers.

use std::path::PathBuf;
use std::sync::Arc;

use mocs_core::geometry::svg::render_basemap_svg;
use mocs_core::heatmap::render_heatmap_svg;
use mocs_core::pipeline::{build_basemap, heatmap_from_documents, heatmap_from_text};
use mocs_core::{BaseMap, Resources};
use mocs_store::{CorpusStore, IngestOptions, IngestReport};
use serde::Serialize;

use crate::artifacts::{ArtifactStore, BasemapFiles, BasemapRecord, HeatmapFiles, HeatmapRecord};
use crate::error::{Result, ServiceError};
use crate::request::{canonical_json, BasemapRequest, HeatmapRequest};

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("records serialize")
}

/// Queries the store and renders a basemap. Returns the files and any warnings.
pub fn render_basemap(
    store: &CorpusStore,
    resources: &Resources,
    req: &BasemapRequest,
) -> Result<(BasemapFiles, Vec<String>)> {
    let errors = req.validate();
    if !errors.is_empty() {
        return Err(ServiceError::Invalid(errors));
    }
    let docs = store.query_documents(&req.filter)?;
    log::info!("basemap over {} documents", docs.len());
    let out = build_basemap(&docs, &req.params, resources)?;
    let id = req.id();
    let files = BasemapFiles {
        svg: render_basemap_svg(&out.map),
        terms_json: out.map.terms_json(),
        basemap_json: out.map.to_json(),
        request_json: pretty(&BasemapRecord { id: id.clone(), request: req.clone() }),
        id,
    };
    Ok((files, out.warnings))
}

/// Renders an overlay of `req` over an already built basemap.
pub fn render_heatmap(
    store: &CorpusStore,
    resources: &Resources,
    basemap_id: &str,
    map: &BaseMap,
    req: &HeatmapRequest,
) -> Result<(HeatmapFiles, Vec<String>)> {
    let errors = req.validate();
    if !errors.is_empty() {
        return Err(ServiceError::Invalid(errors));
    }
    let overlay = match (&req.filter, &req.text) {
        (Some(filter), _) => {
            let docs = store.query_documents(filter)?;
            heatmap_from_documents(map, basemap_id, &docs, &req.params, resources)?
        }
        (None, Some(text)) => heatmap_from_text(map, basemap_id, text, &req.params, resources)?,
        (None, None) => unreachable!("validated"),
    };
    let id = req.id(basemap_id);
    let files = HeatmapFiles {
        svg: render_heatmap_svg(map, &overlay),
        intensities_json: overlay.to_json(),
        request_json: pretty(&HeatmapRecord { id: id.clone(), basemap_id: basemap_id.to_string(), request: req.clone() }),
        id,
    };
    Ok((files, overlay.warnings))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub id: String,
    pub dir: PathBuf,
    pub cached: bool,
    pub warnings: Vec<String>,
}

/// Everything a worker needs to run jobs.
#[derive(Debug, Clone)]
pub struct Runner {
    pub store: Arc<CorpusStore>,
    pub resources: Resources,
    pub artifacts: ArtifactStore,
}

impl Runner {
    pub fn new(store: Arc<CorpusStore>, resources: Resources, artifacts: ArtifactStore) -> Self {
        Runner { store, resources, artifacts }
    }

    pub fn basemap(&self, req: &BasemapRequest) -> Result<Outcome> {
        let id = req.id();
        if self.artifacts.has_basemap(&id) {
            return Ok(Outcome { dir: self.artifacts.basemap_dir(&id), id, cached: true, warnings: Vec::new() });
        }
        let (files, warnings) = render_basemap(&self.store, &self.resources, req)?;
        let dir = self.artifacts.save_basemap(&files)?;
        Ok(Outcome { id, dir, cached: false, warnings })
    }

    pub fn heatmap(&self, basemap_id: &str, req: &HeatmapRequest) -> Result<Outcome> {
        let id = req.id(basemap_id);
        if self.artifacts.has_heatmap(&id) {
            return Ok(Outcome { dir: self.artifacts.heatmap_dir(&id), id, cached: true, warnings: Vec::new() });
        }
        let map = self.artifacts.load_basemap(basemap_id)?;
        let (files, warnings) = render_heatmap(&self.store, &self.resources, basemap_id, &map, req)?;
        let dir = self.artifacts.save_heatmap(&files)?;
        Ok(Outcome { id, dir, cached: false, warnings })
    }

    pub fn ingest(&self, path: &std::path::Path, opts: &IngestOptions) -> Result<IngestReport> {
        Ok(self.store.ingest_dblp_xml(path, opts)?)
    }
}

/// Id of the basemap request; exposed for callers that only hold the JSON.
pub fn request_body(req: &BasemapRequest) -> String {
    canonical_json(req)
}

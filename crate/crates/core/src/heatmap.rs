//! Heatmap overlays of a target document set over a basemap.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::geometry::basemap::BaseMap;
use crate::geometry::svg::{escape_xml, num, svg_open};
use crate::geometry::dist;
use crate::text::{ExtractedDocument, Term};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeatmapParams {
    pub beta: f64,
    pub radius_scale: f64,
}

impl Default for HeatmapParams {
    fn default() -> Self {
        HeatmapParams { beta: 1.0, radius_scale: 0.5 }
    }
}

impl HeatmapParams {
    pub fn validate(&self) -> Vec<(&'static str, String)> {
        let mut errors = Vec::new();
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            errors.push(("beta", format!("must be positive, got {}", self.beta)));
        }
        if !(self.radius_scale > 0.0 && self.radius_scale.is_finite()) {
            errors.push(("radius_scale", format!("must be positive, got {}", self.radius_scale)));
        }
        errors
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapEntry {
    pub surface: String,
    #[serde(rename = "I")]
    pub count: u64,
    #[serde(rename = "I_hat")]
    pub intensity: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapOverlay {
    pub basemap_id: String,
    pub radius: f64,
    pub entries: Vec<HeatmapEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl HeatmapOverlay {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("overlay serializes")
    }
}

/// Normalized log intensities `ln(I + beta) / max ln(I + beta)`.
pub fn normalized_intensities(counts: &[u64], beta: f64) -> Vec<f64> {
    let logs: Vec<f64> = counts.iter().map(|&c| (c as f64 + beta).ln()).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    logs.iter().map(|&l| l / max).collect()
}

/// `radius_scale` times the mean nearest-neighbour distance between terms;
/// a single term gets 10% of the bbox diagonal.
pub fn heatmap_radius(basemap: &BaseMap, params: &HeatmapParams) -> f64 {
    let pos = basemap.positions();
    if pos.len() < 2 {
        return 0.1 * basemap.bbox.diagonal();
    }
    let total: f64 = (0..pos.len())
        .map(|i| {
            (0..pos.len())
                .filter(|&j| j != i)
                .map(|j| dist(pos[i], pos[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    params.radius_scale * total / pos.len() as f64
}

/// Counts basemap terms in the target documents and normalizes the counts.
///
/// The target documents must be extracted with the basemap's extraction
/// mode. Entries follow basemap term order; terms absent from the target are
/// omitted.
pub fn compute_heatmap(
    basemap: &BaseMap,
    basemap_id: &str,
    target: &[ExtractedDocument],
    params: &HeatmapParams,
) -> Result<HeatmapOverlay> {
    if let Some((field, message)) = params.validate().into_iter().next() {
        return Err(CoreError::invalid(field, message));
    }
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in target {
        for term in &doc.terms {
            *counts.entry(term.surface()).or_default() += 1;
        }
    }
    let hits: Vec<(usize, u64)> = basemap
        .terms
        .iter()
        .enumerate()
        .filter_map(|(i, t)| counts.get(t.surface.as_str()).map(|&c| (i, c)))
        .collect();
    let intensities = normalized_intensities(&hits.iter().map(|h| h.1).collect::<Vec<_>>(), params.beta);
    let entries = hits
        .iter()
        .zip(intensities)
        .map(|(&(i, count), intensity)| {
            let t = &basemap.terms[i];
            HeatmapEntry { surface: t.surface.clone(), count, intensity, x: t.x, y: t.y }
        })
        .collect();
    let mut warnings = Vec::new();
    if target.is_empty() {
        warnings.push("target query matched no documents".to_string());
    } else if hits.is_empty() {
        warnings.push("no basemap term occurs in the target documents".to_string());
    }
    Ok(HeatmapOverlay {
        basemap_id: basemap_id.to_string(),
        radius: heatmap_radius(basemap, params),
        entries,
        warnings,
    })
}

/// Counts of `terms` in the target documents, for checking overlays.
pub fn count_occurrences(terms: &[Term], target: &[ExtractedDocument]) -> Vec<u64> {
    terms
        .iter()
        .map(|t| target.iter().map(|d| d.terms.iter().filter(|x| *x == t).count() as u64).sum())
        .collect()
}

/// Overlay layer sized like the basemap: one shared radial gradient and one
/// disc per entry whose opacity is its normalized intensity.
pub fn render_heatmap_svg(basemap: &BaseMap, overlay: &HeatmapOverlay) -> Vec<u8> {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&svg_open(basemap));
    let _ = writeln!(
        s,
        "<metadata id=\"mocs-heatmap\">{}</metadata>",
        escape_xml(&serde_json::json!({"basemap_id": overlay.basemap_id, "radius": overlay.radius}).to_string())
    );
    if !overlay.entries.is_empty() {
        s.push_str("<defs>\n<radialGradient id=\"heat\" cx=\"0.5\" cy=\"0.5\" r=\"0.5\">\n");
        s.push_str("<stop offset=\"0\" stop-color=\"#d7191c\" stop-opacity=\"1\"/>\n");
        s.push_str("<stop offset=\"0.5\" stop-color=\"#fdae61\" stop-opacity=\"0.5\"/>\n");
        s.push_str("<stop offset=\"1\" stop-color=\"#ffffbf\" stop-opacity=\"0\"/>\n");
        s.push_str("</radialGradient>\n</defs>\n");
    }
    let _ = writeln!(s, "<g id=\"heatmap\" opacity=\"0.75\">");
    for e in &overlay.entries {
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"url(#heat)\" fill-opacity=\"{}\" data-term=\"{}\"/>",
            num(e.x),
            num(e.y),
            num(overlay.radius),
            num(e.intensity),
            escape_xml(&e.surface)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s.into_bytes()
}

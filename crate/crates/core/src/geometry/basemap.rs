//! The assembled basemap and its JSON forms.

use serde::{Deserialize, Serialize};

use super::color::{assign_colors, CountryColor};
use super::countries::{build_countries, CountryAdjacency};
use super::labels::label_font_sizes;
use super::voronoi::build_voronoi_regions;
use super::{diameter, dist, Bbox, Point, Ring};
use crate::error::{CoreError, Result};
use crate::text::ExtractionMode;

/// Median nearest-neighbour distance, in map units, after scaling.
pub const TARGET_SPACING: f64 = 60.0;
/// Fraction of the larger extent added on every side of the bbox.
pub const BBOX_PADDING: f64 = 0.1;
/// Floor of the larger extent used for padding.
pub const MIN_EXTENT: f64 = 600.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapTerm {
    pub surface: String,
    pub x: f64,
    pub y: f64,
    pub cluster_id: usize,
    pub frequency: u64,
    pub weight: f64,
    pub font_size: f64,
    pub cell_diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Country {
    pub cluster_id: usize,
    pub color: CountryColor,
    /// Each island is a list of rings: one counter-clockwise outline followed
    /// by clockwise holes.
    pub islands: Vec<Vec<Ring>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseMap {
    pub terms: Vec<MapTerm>,
    pub countries: Vec<Country>,
    pub adjacency: Vec<(usize, usize)>,
    pub bbox: Bbox,
    pub seed: u64,
    pub stress: f64,
    pub modularity: f64,
    /// Mode the terms were extracted with; overlays must use the same one.
    #[serde(default)]
    pub extraction: ExtractionMode,
}

/// Per-term coordinate table shared by the SVG metadata and `terms.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermTable {
    pub bbox: Bbox,
    pub terms: Vec<TermEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub surface: String,
    pub x: f64,
    pub y: f64,
    pub cell_diameter: f64,
    pub cluster_id: usize,
    pub font_size: f64,
    pub frequency: u64,
}

/// Inputs for [`assemble_basemap`], all indexed by term.
#[derive(Debug, Clone)]
pub struct MapInput<'a> {
    pub surfaces: &'a [String],
    pub positions: &'a [Point],
    pub cluster_ids: &'a [usize],
    pub frequencies: &'a [u64],
    pub weights: &'a [f64],
    pub min_pt: f64,
    pub max_pt: f64,
    pub seed: u64,
    pub stress: f64,
    pub modularity: f64,
}

/// Rescales positions so the median nearest-neighbour distance is
/// [`TARGET_SPACING`] and the padded bounding box starts at the origin.
pub fn normalize_positions(positions: &[Point]) -> (Vec<Point>, Bbox) {
    let n = positions.len();
    let mut nn: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| dist(positions[i], positions[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|d| d.is_finite() && *d > 0.0)
        .collect();
    nn.sort_by(f64::total_cmp);
    let scale = if nn.is_empty() { 1.0 } else { TARGET_SPACING / nn[nn.len() / 2] };
    let scaled: Vec<Point> = positions.iter().map(|p| [p[0] * scale, p[1] * scale]).collect();
    let b = Bbox::around(&scaled, BBOX_PADDING, MIN_EXTENT);
    let shifted = scaled.iter().map(|p| [p[0] - b.min_x, p[1] - b.min_y]).collect();
    (shifted, Bbox::new(0.0, 0.0, b.width(), b.height()))
}

/// Builds cells, countries, colors and label sizes for an embedded term set.
pub fn assemble_basemap(input: &MapInput<'_>) -> Result<BaseMap> {
    let n = input.surfaces.len();
    if n == 0 {
        return Err(CoreError::invalid("terms", "a basemap needs at least one term"));
    }
    if [input.positions.len(), input.cluster_ids.len(), input.frequencies.len(), input.weights.len()]
        .iter()
        .any(|&len| len != n)
    {
        return Err(CoreError::invalid("terms", "term attributes differ in length"));
    }
    let (positions, bbox) = normalize_positions(input.positions);
    let voronoi = build_voronoi_regions(&positions, &bbox, input.seed);
    let geometry = build_countries(&voronoi.cells, &voronoi.sites, input.cluster_ids, &bbox, input.seed)?;
    let colors = assign_colors(&geometry.adjacency, geometry.countries.len(), input.seed);
    let freqs: Vec<f64> = input.frequencies.iter().map(|&f| f as f64).collect();
    let sizes = label_font_sizes(&freqs, input.min_pt, input.max_pt)?;

    let terms = (0..n)
        .map(|i| MapTerm {
            surface: input.surfaces[i].clone(),
            x: voronoi.sites[i][0],
            y: voronoi.sites[i][1],
            cluster_id: input.cluster_ids[i],
            frequency: input.frequencies[i],
            weight: input.weights[i],
            font_size: sizes[i],
            cell_diameter: diameter(&voronoi.cells[i]),
        })
        .collect();
    let countries = geometry
        .countries
        .into_iter()
        .zip(colors)
        .enumerate()
        .map(|(cluster_id, (islands, color))| Country {
            cluster_id,
            color,
            islands: islands.into_iter().map(|i| i.rings).collect(),
        })
        .collect();
    Ok(BaseMap {
        terms,
        countries,
        adjacency: geometry.adjacency.pairs().collect(),
        bbox,
        seed: input.seed,
        stress: input.stress,
        modularity: input.modularity,
        extraction: ExtractionMode::default(),
    })
}

impl BaseMap {
    pub fn term_table(&self) -> TermTable {
        TermTable {
            bbox: self.bbox,
            terms: self
                .terms
                .iter()
                .map(|t| TermEntry {
                    surface: t.surface.clone(),
                    x: t.x,
                    y: t.y,
                    cell_diameter: t.cell_diameter,
                    cluster_id: t.cluster_id,
                    font_size: t.font_size,
                    frequency: t.frequency,
                })
                .collect(),
        }
    }

    pub fn adjacency(&self) -> CountryAdjacency {
        self.adjacency.iter().copied().collect()
    }

    pub fn surfaces(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.surface.clone()).collect()
    }

    pub fn positions(&self) -> Vec<Point> {
        self.terms.iter().map(|t| [t.x, t.y]).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("basemap serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn terms_json(&self) -> String {
        serde_json::to_string_pretty(&self.term_table()).expect("term table serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point_in_rings;

    fn input<'a>(surfaces: &'a [String], positions: &'a [Point], clusters: &'a [usize], freqs: &'a [u64], weights: &'a [f64]) -> MapInput<'a> {
        MapInput {
            surfaces,
            positions,
            cluster_ids: clusters,
            frequencies: freqs,
            weights,
            min_pt: 8.0,
            max_pt: 28.0,
            seed: 5,
            stress: 0.0,
            modularity: 0.0,
        }
    }

    #[test]
    fn single_term_map() {
        let s = vec!["graph".to_string()];
        let m = assemble_basemap(&input(&s, &[[0.3, 0.4]], &[0], &[4], &[1.0])).unwrap();
        assert_eq!(m.countries.len(), 1);
        assert_eq!(m.countries[0].islands.len(), 1);
        assert!(m.bbox.contains([m.terms[0].x, m.terms[0].y]));
        assert_eq!(m.terms[0].font_size, 8.0);
    }

    #[test]
    fn terms_inside_their_countries() {
        let s: Vec<String> = (0..6).map(|i| format!("t{i}")).collect();
        let pos = [[0.0, 0.0], [1.0, 0.1], [0.2, 1.0], [5.0, 5.0], [6.0, 5.2], [5.1, 6.1]];
        let clusters = [0, 0, 0, 1, 1, 1];
        let m = assemble_basemap(&input(&s, &pos, &clusters, &[1, 2, 3, 4, 5, 6], &[1.0; 6])).unwrap();
        for t in &m.terms {
            let rings: Vec<Ring> = m.countries[t.cluster_id].islands.iter().flatten().cloned().collect();
            assert!(point_in_rings([t.x, t.y], &rings));
        }
        assert_eq!(m.adjacency, vec![(0, 1)]);
        let back = BaseMap::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn spacing_normalization() {
        let (p, b) = normalize_positions(&[[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]]);
        assert!((dist(p[0], p[1]) - 60.0).abs() < 1e-9);
        assert!(p.iter().all(|&q| b.contains(q)));
        assert_eq!(b.min_x, 0.0);
    }
}

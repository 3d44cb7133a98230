//! Maps of science from bibliographic titles.
//!
//! The pipeline turns a set of document titles into a basemap: terms are
//! extracted with a part-of-speech pattern, ranked, compared by
//! co-occurrence, filtered, turned into distances, embedded in the plane,
//! clustered and finally rendered as a map of countries. Heatmap overlays
//! profile a second document set over an existing basemap.

pub mod document;
pub mod error;
pub mod filtering;
pub mod geometry;
pub mod heatmap;
pub mod layout;
pub mod pipeline;
pub mod ranking;
pub mod similarity;
pub mod text;

pub use document::{Document, DocumentFilter, VenueKind};
pub use error::{CoreError, Result};
pub use geometry::basemap::BaseMap;
pub use heatmap::{HeatmapOverlay, HeatmapParams};
pub use pipeline::{BasemapParams, Resources};
pub use ranking::{RankedTermSet, RankingMethod};
pub use similarity::{SimilarityMatrix, SimilarityMethod};
pub use text::{ExtractionMode, Term, TermExtractor};

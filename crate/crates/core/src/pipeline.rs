//! The end-to-end basemap and overlay pipelines over in-memory documents.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::document::Document;
use crate::error::{CoreError, Result};
use crate::filtering::{
    distances_from_similarities, pull_lesser_indices, rescale_similarities, DistanceParams, FilterMethod,
    FilterParams,
};
use crate::geometry::basemap::{assemble_basemap, BaseMap, MapInput};
use crate::geometry::labels::{DEFAULT_MAX_PT, DEFAULT_MIN_PT};
use crate::heatmap::{compute_heatmap, HeatmapOverlay, HeatmapParams};
use crate::layout::{
    cluster_modularity, embed_force_directed, embed_mds, ClusterAssignment, Embedding, ForceOptions, LayoutBackend,
    MdsOptions, TermGraph,
};
use crate::ranking::{collect_term_stats, rank, top_n, ComparisonCorpus, RankingMethod};
use crate::similarity::{compute_similarity, SimilarityMethod, DEFAULT_LSA_RANK};
use crate::text::{ExtractedDocument, ExtractionMode, LexiconTagger, PosTagger, TermExtractor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutParams {
    pub backend: LayoutBackend,
    pub max_iter: usize,
    pub epsilon: f64,
    /// Scale on target distances inside a cluster (1 = none).
    pub cluster_gravity: f64,
    pub force_iterations: usize,
    /// Strongest neighbours per term kept in the clustering graph.
    pub max_neighbors: usize,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            backend: LayoutBackend::Mds,
            max_iter: 300,
            epsilon: 1e-6,
            cluster_gravity: 0.7,
            force_iterations: 500,
            max_neighbors: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BasemapParams {
    pub extraction: ExtractionMode,
    pub ranking: RankingMethod,
    pub similarity: SimilarityMethod,
    pub filtering: FilterParams,
    pub distance: DistanceParams,
    pub layout: LayoutParams,
    pub lsa_rank: usize,
    pub min_pt: f64,
    pub max_pt: f64,
    pub seed: u64,
}

impl Default for BasemapParams {
    fn default() -> Self {
        BasemapParams {
            extraction: ExtractionMode::MultiWord,
            ranking: RankingMethod::CValueUnigrams,
            similarity: SimilarityMethod::PartialMatchJaccard,
            filtering: FilterParams::default(),
            distance: DistanceParams::default(),
            layout: LayoutParams::default(),
            lsa_rank: DEFAULT_LSA_RANK,
            min_pt: DEFAULT_MIN_PT,
            max_pt: DEFAULT_MAX_PT,
            seed: 0,
        }
    }
}

impl BasemapParams {
    /// Field-level problems as `(path, message)`; empty when usable.
    pub fn validate(&self) -> Vec<(String, String)> {
        let mut errors = Vec::new();
        for (prefix, r) in [("filtering", self.filtering.validate()), ("distance", self.distance.validate())] {
            if let Err(CoreError::InvalidParameter { field, message }) = r {
                errors.push((format!("{prefix}.{field}"), message));
            }
        }
        let l = &self.layout;
        let mut push = |field: &str, message: &str| errors.push((field.to_string(), message.to_string()));
        if l.max_iter == 0 {
            push("layout.max_iter", "must be at least 1");
        }
        if !(l.epsilon >= 0.0 && l.epsilon.is_finite()) {
            push("layout.epsilon", "must be a nonnegative number");
        }
        if !(l.cluster_gravity > 0.0 && l.cluster_gravity.is_finite()) {
            push("layout.cluster_gravity", "must be positive");
        }
        if l.max_neighbors == 0 {
            push("layout.max_neighbors", "must be at least 1");
        }
        if self.similarity == SimilarityMethod::Lsa && self.lsa_rank == 0 {
            push("lsa_rank", "must be at least 1");
        }
        if !(self.min_pt > 0.0 && self.min_pt < self.max_pt && self.max_pt.is_finite()) {
            push("min_pt", "need 0 < min_pt < max_pt");
        }
        errors
    }
}

/// Shared, read-only inputs of every pipeline run.
#[derive(Clone)]
pub struct Resources {
    pub tagger: Arc<dyn PosTagger>,
    pub comparison: Arc<ComparisonCorpus>,
}

impl std::fmt::Debug for Resources {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Resources").field("comparison_terms", &self.comparison.len()).finish()
    }
}

impl Resources {
    pub fn bundled() -> Self {
        Resources {
            tagger: Arc::new(LexiconTagger::bundled()),
            comparison: Arc::new(ComparisonCorpus::bundled()),
        }
    }

    pub fn extractor(&self, mode: ExtractionMode) -> TermExtractor {
        TermExtractor::new(Arc::clone(&self.tagger), mode)
    }
}

#[derive(Debug, Clone)]
pub struct BasemapOutput {
    pub map: BaseMap,
    pub embedding: Embedding,
    pub clusters: ClusterAssignment,
    pub warnings: Vec<String>,
}

/// Builds a basemap from the documents of one query.
pub fn build_basemap(docs: &[Document], params: &BasemapParams, resources: &Resources) -> Result<BasemapOutput> {
    if let Some((field, message)) = params.validate().into_iter().next() {
        return Err(CoreError::invalid("params", format!("{field}: {message}")));
    }
    if docs.is_empty() {
        return Err(CoreError::EmptyCorpus("the query matched no documents".to_string()));
    }
    let mut warnings = Vec::new();
    let extractor = resources.extractor(params.extraction);
    let extracted: Vec<ExtractedDocument> = docs.iter().map(|d| extractor.extract_document(d)).collect();
    let stats = collect_term_stats(&extracted);
    if stats.is_empty() {
        return Err(CoreError::EmptyCorpus(format!(
            "no terms could be extracted from {} documents",
            docs.len()
        )));
    }
    let ranked = rank(&stats, params.ranking, &resources.comparison);
    let pool = top_n(&ranked, params.filtering.n_terms)?;
    log::debug!("{} candidate terms, pool of {}", stats.len(), pool.len());

    let pool_terms = pool.terms();
    if params.similarity == SimilarityMethod::Lsa && params.lsa_rank > pool_terms.len().min(extracted.len()) {
        warnings.push(format!(
            "lsa_rank {} exceeds the matrix rank bound {}; using all dimensions",
            params.lsa_rank,
            pool_terms.len().min(extracted.len())
        ));
    }
    let sim = compute_similarity(params.similarity, &pool_terms, &extracted, params.lsa_rank, params.seed)?;
    let chosen: Vec<usize> = match params.filtering.method {
        FilterMethod::TopTerms => (0..params.filtering.k.min(pool.len())).collect(),
        FilterMethod::PullLesserTerms => pull_lesser_indices(&pool, &sim, params.filtering.k, params.filtering.l),
    };
    let entries: Vec<_> = chosen.iter().map(|&i| pool.entries[i].clone()).collect();
    let surfaces: Vec<String> = entries.iter().map(|e| e.term.surface().to_string()).collect();
    let frequencies: Vec<u64> = entries.iter().map(|e| e.frequency).collect();
    let weights: Vec<f64> = entries.iter().map(|e| e.weight).collect();
    let n = entries.len();

    let (embedding, clusters) = if n < 2 {
        (
            Embedding { positions: vec![[0.0, 0.0]; n], stress: 0.0, seed: params.seed, stress_history: Vec::new() },
            ClusterAssignment { cluster_ids: vec![0; n], modularity: 0.0 },
        )
    } else {
        let sub = sim.submatrix(&chosen);
        let rescaled = rescale_similarities(&sub)?;
        let graph = TermGraph::from_similarities(
            &rescaled,
            frequencies.iter().map(|&f| f as f64).collect(),
            Some(params.layout.max_neighbors),
        );
        let clusters = cluster_modularity(&graph);
        let distances = distances_from_similarities(rescaled, params.distance)?;
        let embedding = match params.layout.backend {
            LayoutBackend::Mds => embed_mds(
                &distances,
                Some(&clusters),
                &MdsOptions {
                    max_iter: params.layout.max_iter,
                    epsilon: params.layout.epsilon,
                    seed: params.seed,
                    cluster_gravity: params.layout.cluster_gravity,
                },
            )?,
            LayoutBackend::ForceDirected => embed_force_directed(
                &graph,
                &ForceOptions { iterations: params.layout.force_iterations, seed: params.seed, natural_length: 1.0 },
            ),
        };
        (embedding, clusters)
    };
    let mut map = assemble_basemap(&MapInput {
        surfaces: &surfaces,
        positions: &embedding.positions,
        cluster_ids: &clusters.cluster_ids,
        frequencies: &frequencies,
        weights: &weights,
        min_pt: params.min_pt,
        max_pt: params.max_pt,
        seed: params.seed,
        stress: embedding.stress,
        modularity: clusters.modularity,
    })?;
    map.extraction = params.extraction;
    Ok(BasemapOutput { map, embedding, clusters, warnings })
}

/// Overlay of the titles of `docs` over `basemap`.
pub fn heatmap_from_documents(
    basemap: &BaseMap,
    basemap_id: &str,
    docs: &[Document],
    params: &HeatmapParams,
    resources: &Resources,
) -> Result<HeatmapOverlay> {
    let extractor = resources.extractor(basemap.extraction);
    let extracted: Vec<ExtractedDocument> = docs.iter().map(|d| extractor.extract_document(d)).collect();
    compute_heatmap(basemap, basemap_id, &extracted, params)
}

/// Overlay of free text, such as an abstract, treated as one document.
pub fn heatmap_from_text(
    basemap: &BaseMap,
    basemap_id: &str,
    text: &str,
    params: &HeatmapParams,
    resources: &Resources,
) -> Result<HeatmapOverlay> {
    let extractor = resources.extractor(basemap.extraction);
    let doc = ExtractedDocument { id: 0, terms: extractor.extract(text) };
    let target = if doc.terms.is_empty() && text.trim().is_empty() { Vec::new() } else { vec![doc] };
    compute_heatmap(basemap, basemap_id, &target, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point_in_rings;

    fn corpus() -> Vec<Document> {
        let titles = [
            "Interactive visualization of large graphs",
            "Graph drawing with force directed layouts",
            "Large graph visualization on the web",
            "Volume rendering of medical data",
            "Interactive volume rendering with transfer functions",
            "Transfer functions for direct volume rendering",
            "Force directed graph drawing algorithms",
            "Medical data visualization with volume rendering",
            "Web based interactive visualization",
            "Scalable graph layouts for large networks",
        ];
        titles.iter().enumerate().map(|(i, t)| Document::from_title(i as i64 + 1, *t)).collect()
    }

    #[test]
    fn builds_deterministic_map() {
        let params = BasemapParams {
            filtering: FilterParams { k: 10, l: 2, ..FilterParams::default() },
            seed: 3,
            ..BasemapParams::default()
        };
        let r = Resources::bundled();
        let a = build_basemap(&corpus(), &params, &r).unwrap();
        let b = build_basemap(&corpus(), &params, &r).unwrap();
        assert_eq!(a.map, b.map);
        assert!(a.map.terms.len() >= 10);
        for t in &a.map.terms {
            let rings: Vec<_> = a.map.countries[t.cluster_id].islands.iter().flatten().cloned().collect();
            assert!(point_in_rings([t.x, t.y], &rings), "{}", t.surface);
        }
    }

    #[test]
    fn empty_inputs_fail() {
        let r = Resources::bundled();
        let err = build_basemap(&[], &BasemapParams::default(), &r).unwrap_err();
        assert!(matches!(err, CoreError::EmptyCorpus(_)));
        let err = build_basemap(&[Document::from_title(1, "of the and")], &BasemapParams::default(), &r).unwrap_err();
        assert!(matches!(err, CoreError::EmptyCorpus(_)));
    }

    #[test]
    fn single_term_corpus() {
        let r = Resources::bundled();
        let out = build_basemap(&[Document::from_title(1, "Graphs")], &BasemapParams::default(), &r).unwrap();
        assert_eq!(out.map.terms.len(), 1);
    }

    #[test]
    fn overlay_uses_basemap_terms() {
        let params = BasemapParams { filtering: FilterParams { k: 10, l: 2, ..FilterParams::default() }, ..BasemapParams::default() };
        let r = Resources::bundled();
        let out = build_basemap(&corpus(), &params, &r).unwrap();
        let o = heatmap_from_text(&out.map, "x", "Volume rendering. Volume rendering of graphs.", &HeatmapParams::default(), &r).unwrap();
        assert!(!o.entries.is_empty());
        let surfaces = out.map.surfaces();
        assert!(o.entries.iter().all(|e| surfaces.contains(&e.surface)));
        assert!(o.entries.iter().any(|e| e.intensity == 1.0));
    }

    #[test]
    fn invalid_params_are_reported() {
        let mut p = BasemapParams::default();
        p.filtering.k = 0;
        p.distance.sigma = 2.0;
        let fields: Vec<_> = p.validate().into_iter().map(|e| e.0).collect();
        assert_eq!(fields, vec!["filtering.k", "distance.sigma"]);
    }
}

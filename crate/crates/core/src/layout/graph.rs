use crate::filtering::RescaledSimilarities;
use crate::text::Term;

/// Undirected weighted graph over terms. Edges are stored once with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TermGraph {
    pub terms: Vec<Term>,
    /// Vertex weights (term frequencies).
    pub weights: Vec<f64>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl TermGraph {
    /// Builds a graph, dropping self-loops and non-positive weights and merging
    /// parallel edges by summing.
    pub fn new(terms: Vec<Term>, weights: Vec<f64>, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut merged: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
        for (a, b, w) in edges {
            if a == b || !(w > 0.0) {
                continue;
            }
            *merged.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
        }
        TermGraph {
            terms,
            weights,
            edges: merged.into_iter().map(|((a, b), w)| (a, b, w)).collect(),
        }
    }

    /// Unweighted convenience constructor over anonymous vertices.
    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Self {
        let terms = (0..n).map(|i| Term::parse(&format!("v{i}")).unwrap()).collect();
        TermGraph::new(terms, vec![1.0; n], edges.iter().map(|&(a, b)| (a, b, 1.0)))
    }

    /// Similarity graph: an edge for every positive `Ŝ` pair. With
    /// `max_neighbors`, only pairs among each vertex's strongest neighbours
    /// (ties by index) are kept; a pair survives if either endpoint keeps it.
    pub fn from_similarities(rescaled: &RescaledSimilarities, weights: Vec<f64>, max_neighbors: Option<usize>) -> Self {
        let n = rescaled.len();
        let mut keep = std::collections::BTreeSet::new();
        for i in 0..n {
            let mut nbrs: Vec<usize> = (0..n).filter(|&j| j != i && rescaled.get(i, j) > 0.0).collect();
            if let Some(m) = max_neighbors {
                nbrs.sort_by(|&a, &b| rescaled.get(i, b).total_cmp(&rescaled.get(i, a)).then(a.cmp(&b)));
                nbrs.truncate(m);
            }
            for j in nbrs {
                keep.insert((i.min(j), i.max(j)));
            }
        }
        let edges: Vec<_> = keep.into_iter().map(|(i, j)| (i, j, rescaled.get(i, j))).collect();
        TermGraph::new(rescaled.terms.clone(), weights, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.terms.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Weighted degree of every vertex.
    pub fn strengths(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n_vertices()];
        for &(a, b, w) in &self.edges {
            s[a] += w;
            s[b] += w;
        }
        s
    }
}

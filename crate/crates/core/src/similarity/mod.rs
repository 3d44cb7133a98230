//! Term-document matrices and pairwise term similarity.

mod jaccard;
mod lsa;
mod matrix;
mod svd;

pub use jaccard::jaccard_similarity;
pub use lsa::{lsa_similarity, LsaResult, SemanticSpace};
pub use matrix::{build_term_document_matrix, TermDocumentMatrix};
pub use svd::{truncated_svd, TruncatedSvd};

use serde::{Deserialize, Serialize};

use crate::text::{ExtractedDocument, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityMethod {
    Lsa,
    Jaccard,
    #[serde(alias = "pmj")]
    PartialMatchJaccard,
}

pub const DEFAULT_LSA_RANK: usize = 50;

/// Dense symmetric matrix of similarities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    terms: Vec<Term>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Wraps row-major `values`; panics when the shape does not match `terms`.
    pub fn new(terms: Vec<Term>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), terms.len() * terms.len(), "similarity matrix shape");
        SimilarityMatrix { terms, values }
    }

    pub fn from_fn(terms: Vec<Term>, f: impl Fn(usize, usize) -> f64) -> Self {
        let n = terms.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = f(i, j);
            }
        }
        SimilarityMatrix { terms, values }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.terms.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.terms.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Restricts the matrix to `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> SimilarityMatrix {
        let terms = indices.iter().map(|&i| self.terms[i].clone()).collect();
        SimilarityMatrix::from_fn(terms, |a, b| self.get(indices[a], indices[b]))
    }

    /// Tab-delimited dump for debugging: a header row of surfaces, then one row per term.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("term");
        for t in &self.terms {
            out.push('\t');
            out.push_str(t.surface());
        }
        out.push('\n');
        for (i, t) in self.terms.iter().enumerate() {
            out.push_str(t.surface());
            for v in self.row(i) {
                out.push_str(&format!("\t{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Similarities between `terms` over `docs` with the chosen method.
pub fn compute_similarity(
    method: SimilarityMethod,
    terms: &[Term],
    docs: &[ExtractedDocument],
    lsa_rank: usize,
    seed: u64,
) -> crate::Result<SimilarityMatrix> {
    Ok(match method {
        SimilarityMethod::Lsa => {
            let m = build_term_document_matrix(terms, docs, false);
            lsa_similarity(&m, lsa_rank, seed)?.similarities
        }
        SimilarityMethod::Jaccard => jaccard_similarity(&build_term_document_matrix(terms, docs, false)),
        SimilarityMethod::PartialMatchJaccard => {
            jaccard_similarity(&build_term_document_matrix(terms, docs, true))
        }
    })
}

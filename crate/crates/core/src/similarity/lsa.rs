use log::warn;

use super::{truncated_svd, SimilarityMatrix, TermDocumentMatrix};
use crate::error::{CoreError, Result};
use crate::text::Term;

/// Term feature vectors: the rows of `U Σ` from a rank-`k` SVD.
#[derive(Debug, Clone)]
pub struct SemanticSpace {
    pub terms: Vec<Term>,
    pub vectors: Vec<Vec<f64>>,
    pub rank: usize,
}

#[derive(Debug, Clone)]
pub struct LsaResult {
    pub space: SemanticSpace,
    pub similarities: SimilarityMatrix,
    /// Set when the requested rank exceeded the matrix dimensions.
    pub warning: Option<String>,
}

fn cosine_matrix(terms: Vec<Term>, vectors: &[Vec<f64>]) -> SimilarityMatrix {
    let norms: Vec<f64> = vectors.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    let zero = |i: usize| norms[i] <= 1e-12 * max_norm || norms[i] == 0.0;
    let n = vectors.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        if zero(i) {
            continue;
        }
        values[i * n + i] = 1.0;
        for j in i + 1..n {
            if zero(j) {
                continue;
            }
            let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
            let cos = (dot / (norms[i] * norms[j])).clamp(0.0, 1.0);
            values[i * n + j] = cos;
            values[j * n + i] = cos;
        }
    }
    SimilarityMatrix::new(terms, values)
}

/// Cosine similarity of term vectors in a rank-`k` latent semantic space.
///
/// Negative cosines are clamped to 0; terms whose vector vanishes are
/// dissimilar to everything, themselves included.
pub fn lsa_similarity(m: &TermDocumentMatrix, k: usize, seed: u64) -> Result<LsaResult> {
    if k == 0 {
        return Err(CoreError::invalid("lsa_rank", "must be at least 1"));
    }
    let short_side = m.n_terms().min(m.n_docs());
    let warning = (k > short_side).then(|| {
        let msg = format!("LSA rank {k} exceeds matrix dimension {short_side}; reduced to {short_side}");
        warn!("{msg}");
        msg
    });
    let svd = truncated_svd(m, k, seed);
    let vectors: Vec<Vec<f64>> = (0..m.n_terms())
        .map(|i| svd.scaled_left.row(i).iter().copied().collect())
        .collect();
    let similarities = cosine_matrix(m.terms().to_vec(), &vectors);
    Ok(LsaResult {
        space: SemanticSpace {
            terms: m.terms().to_vec(),
            vectors,
            rank: svd.rank,
        },
        similarities,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: usize, counts: &[u32]) -> TermDocumentMatrix {
        let cols = counts.len() / rows;
        let terms = (0..rows).map(|i| Term::parse(&format!("t{i}")).unwrap()).collect();
        TermDocumentMatrix::from_dense(terms, (0..cols as i64).collect(), counts)
    }

    #[test]
    fn identical_rows_are_fully_similar() {
        let m = matrix(3, &[1, 0, 2, 1, 0, 2, 0, 1, 0]);
        let s = lsa_similarity(&m, 3, 0).unwrap().similarities;
        assert!((s.get(0, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_rows_are_dissimilar() {
        let m = matrix(2, &[1, 1, 0, 0, 0, 0, 3, 1]);
        let s = lsa_similarity(&m, 2, 0).unwrap().similarities;
        assert!(s.get(0, 1).abs() < 1e-12);
        assert_eq!(s.get(0, 0), 1.0);
    }

    #[test]
    fn oversized_rank_is_reduced_with_warning() {
        let m = matrix(2, &[1, 0, 0, 1]);
        let res = lsa_similarity(&m, 50, 0).unwrap();
        assert_eq!(res.space.rank, 2);
        assert!(res.warning.is_some());
        assert!(lsa_similarity(&m, 0, 0).is_err());
    }

    #[test]
    fn zero_row_is_dissimilar_to_everything() {
        let m = matrix(3, &[1, 2, 0, 0, 0, 0, 2, 1, 1]);
        let s = lsa_similarity(&m, 2, 0).unwrap().similarities;
        assert_eq!(s.get(1, 1), 0.0);
        assert_eq!(s.get(1, 0), 0.0);
        assert_eq!(s.get(1, 2), 0.0);
    }

    #[test]
    fn truncation_keeps_bounds() {
        let counts: Vec<u32> = (0..6 * 8).map(|i| ((i * 37 + 11) % 4) as u32).collect();
        let m = matrix(6, &counts);
        let s = lsa_similarity(&m, 1, 0).unwrap().similarities;
        for i in 0..6 {
            for j in 0..6 {
                let v = s.get(i, j);
                assert!((0.0..=1.0).contains(&v));
                assert_eq!(v, s.get(j, i));
            }
        }
    }
}

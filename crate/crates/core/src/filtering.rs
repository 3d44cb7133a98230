//! Choosing the map's terms and turning similarities into layout distances.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::ranking::RankedTermSet;
use crate::similarity::SimilarityMatrix;
use crate::text::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMethod {
    #[serde(alias = "top")]
    TopTerms,
    #[serde(alias = "pull_lesser")]
    PullLesserTerms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterParams {
    pub method: FilterMethod,
    /// Size of the ranked pool the similarities are computed over.
    pub n_terms: usize,
    /// Number of top-ranked terms always plotted.
    pub k: usize,
    /// Similar terms pulled in per top term.
    pub l: usize,
}

impl FilterParams {
    pub const DEFAULT_N: usize = 1500;

    pub fn top_terms() -> Self {
        FilterParams {
            method: FilterMethod::TopTerms,
            n_terms: Self::DEFAULT_N,
            k: 150,
            l: 0,
        }
    }

    pub fn pull_lesser_terms() -> Self {
        FilterParams {
            method: FilterMethod::PullLesserTerms,
            n_terms: Self::DEFAULT_N,
            k: 90,
            l: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_terms == 0 {
            return Err(CoreError::invalid("n_terms", "must be at least 1"));
        }
        if self.k == 0 || self.k > self.n_terms {
            return Err(CoreError::invalid(
                "k",
                format!("must satisfy 1 <= k <= n_terms ({})", self.n_terms),
            ));
        }
        Ok(())
    }
}

impl Default for FilterParams {
    fn default() -> Self {
        Self::pull_lesser_terms()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistanceParams {
    pub sigma: f64,
}

impl Default for DistanceParams {
    fn default() -> Self {
        DistanceParams { sigma: 0.1 }
    }
}

impl DistanceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(CoreError::invalid("sigma", "must lie strictly between 0 and 1"));
        }
        Ok(())
    }
}

/// The first `k` terms by rank.
pub fn filter_top_terms(ranked: &RankedTermSet, k: usize) -> Vec<Term> {
    ranked.entries.iter().take(k).map(|e| e.term.clone()).collect()
}

/// Indices (into `ranked`) of the top `k` terms plus, for each of them, the `l`
/// most similar terms with positive similarity. Candidates with equal
/// similarity are taken in rank order. The result is sorted by rank.
pub fn pull_lesser_indices(ranked: &RankedTermSet, s: &SimilarityMatrix, k: usize, l: usize) -> Vec<usize> {
    let n = ranked.len().min(s.len());
    let k = k.min(n);
    let mut chosen: BTreeSet<usize> = (0..k).collect();
    for top in 0..k {
        let mut candidates: Vec<usize> = (0..n).filter(|&j| j != top && s.get(top, j) > 0.0).collect();
        // Ranked order doubles as the surface tie-break: ranked sets are
        // already ordered by surface among equal weights.
        candidates.sort_by(|&a, &b| s.get(top, b).total_cmp(&s.get(top, a)).then(a.cmp(&b)));
        chosen.extend(candidates.into_iter().take(l));
    }
    chosen.into_iter().collect()
}

/// Top-`k` terms plus each one's `l` most similar terms among the ranked pool.
///
/// `s` must be indexed in the same order as `ranked`.
pub fn filter_pull_lesser_terms(ranked: &RankedTermSet, s: &SimilarityMatrix, k: usize, l: usize) -> Vec<Term> {
    pull_lesser_indices(ranked, s, k, l)
        .into_iter()
        .map(|i| ranked.entries[i].term.clone())
        .collect()
}

/// Dense symmetric matrix of rescaled similarities `Ŝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledSimilarities {
    pub terms: Vec<Term>,
    pub values: Vec<f64>,
    /// The off-diagonal maximum the input was divided by.
    pub max_off_diagonal: f64,
}

impl RescaledSimilarities {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.terms.len() + j]
    }
}

/// `Ŝ = S / max_{m≠n} S(t_m, t_n)`, clamped to `[0, 1]`.
pub fn rescale_similarities(s: &SimilarityMatrix) -> Result<RescaledSimilarities> {
    let n = s.len();
    let mut max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max = max.max(s.get(i, j));
            }
        }
    }
    if max <= 0.0 {
        return Err(CoreError::DisconnectedSimilarities);
    }
    let values = s.values().iter().map(|v| (v / max).clamp(0.0, 1.0)).collect();
    Ok(RescaledSimilarities {
        terms: s.terms().to_vec(),
        values,
        max_off_diagonal: max,
    })
}

/// `-ln((1 - σ) Ŝ + σ)`.
pub fn distance_from_similarity(rescaled: f64, sigma: f64) -> f64 {
    let d = -((1.0 - sigma) * rescaled + sigma).ln();
    // -ln(1) is -0.0; keep distances nonnegative in sign too.
    d.max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub terms: Vec<Term>,
    pub values: Vec<f64>,
    pub rescaled: RescaledSimilarities,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.terms.len() + j]
    }

    /// Builds from raw row-major distances with no similarity provenance.
    pub fn from_values(terms: Vec<Term>, values: Vec<f64>) -> Self {
        let n = terms.len();
        assert_eq!(values.len(), n * n, "distance matrix shape");
        DistanceMatrix {
            rescaled: RescaledSimilarities {
                terms: terms.clone(),
                values: vec![0.0; n * n],
                max_off_diagonal: 0.0,
            },
            terms,
            values,
        }
    }
}

pub fn distances_from_similarities(rescaled: RescaledSimilarities, params: DistanceParams) -> Result<DistanceMatrix> {
    params.validate()?;
    let n = rescaled.len();
    let mut values: Vec<f64> = rescaled
        .values
        .iter()
        .map(|&v| distance_from_similarity(v, params.sigma))
        .collect();
    for i in 0..n {
        values[i * n + i] = 0.0;
    }
    Ok(DistanceMatrix {
        terms: rescaled.terms.clone(),
        values,
        rescaled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::{RankedTerm, RankingMethod};
    use proptest::prelude::*;

    fn ranked(names: &[&str]) -> RankedTermSet {
        RankedTermSet {
            entries: names
                .iter()
                .enumerate()
                .map(|(i, n)| RankedTerm {
                    term: Term::parse(n).unwrap(),
                    weight: (names.len() - i) as f64,
                    frequency: 1,
                })
                .collect(),
            method: RankingMethod::Tf,
            n: names.len(),
        }
    }

    fn sim(names: &[&str], pairs: &[(usize, usize, f64)]) -> SimilarityMatrix {
        let n = names.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
        }
        for &(i, j, v) in pairs {
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
        SimilarityMatrix::new(names.iter().map(|s| Term::parse(s).unwrap()).collect(), values)
    }

    fn surfaces(terms: &[Term]) -> Vec<&str> {
        terms.iter().map(Term::surface).collect()
    }

    #[test]
    fn top_terms_saturates() {
        let r = ranked(&["a", "b", "c", "d", "e", "f", "g"]);
        assert_eq!(surfaces(&filter_top_terms(&r, 1)), ["a"]);
        assert_eq!(filter_top_terms(&r, 10).len(), 7);
    }

    #[test]
    fn pull_lesser_hand_simulation() {
        // a b | c d e. a's best neighbour is d (0.6); b's best is c and e tied
        // at 0.3, broken by rank, so c.
        let names = ["a", "b", "c", "d", "e"];
        let r = ranked(&names);
        let s = sim(&names, &[(0, 3, 0.6), (0, 1, 0.2), (1, 2, 0.3), (1, 4, 0.3), (0, 4, 0.1)]);
        assert_eq!(surfaces(&filter_pull_lesser_terms(&r, &s, 2, 1)), ["a", "b", "c", "d"]);
        // With l = 2 a also pulls b (0.2), already present; b pulls c and e.
        assert_eq!(surfaces(&filter_pull_lesser_terms(&r, &s, 2, 2)), ["a", "b", "c", "d", "e"]);
        assert_eq!(filter_pull_lesser_terms(&r, &s, 2, 0), filter_top_terms(&r, 2));
    }

    #[test]
    fn pull_lesser_skips_zero_similarity() {
        let names = ["a", "b", "c"];
        let s = sim(&names, &[]);
        assert_eq!(surfaces(&filter_pull_lesser_terms(&ranked(&names), &s, 1, 5)), ["a"]);
    }

    #[test]
    fn rescaling() {
        let names = ["a", "b", "c"];
        let s = sim(&names, &[(0, 1, 0.5), (0, 2, 0.25)]);
        let r = rescale_similarities(&s).unwrap();
        assert_eq!(r.get(0, 2), 0.5);
        assert_eq!(r.get(0, 1), 1.0);
        assert_eq!(r.get(1, 1), 1.0);
        assert!(matches!(
            rescale_similarities(&sim(&names, &[])),
            Err(CoreError::DisconnectedSimilarities)
        ));
    }

    #[test]
    fn distance_values() {
        assert_eq!(distance_from_similarity(1.0, 0.1), 0.0);
        assert!((distance_from_similarity(0.0, 0.1) - std::f64::consts::LN_10).abs() < 1e-12);
        assert!((distance_from_similarity(0.5, 0.1) - 0.5978370007556204).abs() < 1e-12);
        assert!(DistanceParams { sigma: 1.0 }.validate().is_err());
        assert!(DistanceParams { sigma: 0.0 }.validate().is_err());
    }

    #[test]
    fn filter_params_validation() {
        assert!(FilterParams::default().validate().is_ok());
        assert!(FilterParams { k: 0, ..FilterParams::default() }.validate().is_err());
        assert!(FilterParams { k: 2000, ..FilterParams::default() }.validate().is_err());
    }

    proptest! {
        #[test]
        fn distance_monotone_and_bounded(a in 0.0f64..=1.0, b in 0.0f64..=1.0, sigma in 0.01f64..0.99) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let d_lo = distance_from_similarity(lo, sigma);
            let d_hi = distance_from_similarity(hi, sigma);
            prop_assert!(d_lo >= d_hi);
            if lo < hi { prop_assert!(d_lo > d_hi || (hi - lo) < 1e-15); }
            prop_assert!(d_hi >= 0.0 && d_lo <= -sigma.ln() + 1e-15);
        }

        #[test]
        fn pull_lesser_contains_top_terms(
            n in 2usize..12,
            k in 1usize..6,
            l in 0usize..4,
            raw in prop::collection::vec(0.0f64..1.0, 144),
        ) {
            let names: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let r = ranked(&refs);
            let s = SimilarityMatrix::from_fn(r.terms(), |i, j| {
                if i == j { 1.0 } else { raw[i.min(j) * 12 + i.max(j)] }
            });
            let k = k.min(n);
            let pulled = filter_pull_lesser_terms(&r, &s, k, l);
            for t in filter_top_terms(&r, k) {
                prop_assert!(pulled.contains(&t));
            }
            prop_assert!(pulled.len() <= k * (l + 1));
        }
    }
}

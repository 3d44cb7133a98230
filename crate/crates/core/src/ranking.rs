//! Term importance weights: TF, TF/ICF, C-value and C-value with unigrams.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::text::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingMethod {
    Tf,
    #[serde(alias = "tficf")]
    TfIcf,
    #[serde(alias = "cvalue")]
    CValue,
    #[serde(alias = "cvalue_unigrams")]
    CValueUnigrams,
}

/// Longer candidate terms that contain a term as a contiguous word run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Nesting {
    pub longer: Vec<Term>,
    /// Sum of the frequencies of `longer`.
    pub containment_frequency: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermStats {
    pub term: Term,
    /// Occurrences as a complete extracted term across the corpus.
    pub frequency: u64,
    pub nesting: Nesting,
}

/// Counts term occurrences over per-document term lists and records nesting.
/// The result is sorted by surface.
pub fn collect_term_stats<D: AsRef<[Term]>>(docs: &[D]) -> Vec<TermStats> {
    let mut freq: BTreeMap<&Term, u64> = BTreeMap::new();
    for doc in docs {
        for term in doc.as_ref() {
            *freq.entry(term).or_insert(0) += 1;
        }
    }
    let index: HashMap<&[String], usize> = freq
        .keys()
        .enumerate()
        .map(|(i, t)| (t.words(), i))
        .collect();
    let mut longer: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); freq.len()];
    for (b_idx, b) in freq.keys().enumerate() {
        let words = b.words();
        for len in 1..words.len() {
            for window in words.windows(len) {
                if let Some(&a_idx) = index.get(window) {
                    longer[a_idx].insert(b_idx);
                }
            }
        }
    }
    let entries: Vec<(&Term, u64)> = freq.into_iter().collect();
    entries
        .iter()
        .enumerate()
        .map(|(i, (term, f))| {
            let nest = &longer[i];
            TermStats {
                term: (*term).clone(),
                frequency: *f,
                nesting: Nesting {
                    longer: nest.iter().map(|&j| entries[j].0.clone()).collect(),
                    containment_frequency: nest.iter().map(|&j| entries[j].1).sum(),
                },
            }
        })
        .collect()
}

const BUNDLED_COUNTS: &str = include_str!("../data/comparison_counts.tsv");

/// Occurrence counts of terms in a general-domain reference corpus.
#[derive(Debug, Clone, Default)]
pub struct ComparisonCorpus {
    counts: HashMap<String, u64>,
}

impl ComparisonCorpus {
    pub fn bundled() -> Self {
        Self::from_counts_str(BUNDLED_COUNTS).expect("bundled counts file is well-formed")
    }

    /// Parses `surface<TAB>count` lines. Repeated surfaces are summed.
    pub fn from_counts_str(text: &str) -> Result<Self> {
        let mut counts = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| CoreError::Counts {
                line: idx + 1,
                message: message.to_string(),
            };
            let (surface, count) = line.split_once('\t').ok_or_else(|| err("expected surface<TAB>count"))?;
            let count: u64 = count.trim().parse().map_err(|_| err("count is not a nonnegative integer"))?;
            let surface = Term::parse(surface).ok_or_else(|| err("empty surface"))?;
            *counts.entry(surface.surface().to_string()).or_insert(0) += count;
        }
        Ok(ComparisonCorpus { counts })
    }

    pub fn from_counts_file(path: &Path) -> Result<Self> {
        Self::from_counts_str(&std::fs::read_to_string(path)?)
    }

    pub fn count(&self, surface: &str) -> u64 {
        self.counts.get(surface).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

impl FromIterator<(String, u64)> for ComparisonCorpus {
    fn from_iter<I: IntoIterator<Item = (String, u64)>>(iter: I) -> Self {
        ComparisonCorpus {
            counts: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTerm {
    pub term: Term,
    pub weight: f64,
    pub frequency: u64,
}

/// Terms sorted by descending weight; equal weights are ordered by surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTermSet {
    pub entries: Vec<RankedTerm>,
    pub method: RankingMethod,
    /// Selection size the set was cut to (its length when uncut).
    pub n: usize,
}

impl RankedTermSet {
    fn from_weights(stats: &[TermStats], method: RankingMethod, weight: impl Fn(&TermStats) -> f64) -> Self {
        let mut entries: Vec<RankedTerm> = stats
            .iter()
            .map(|s| RankedTerm {
                term: s.term.clone(),
                weight: weight(s),
                frequency: s.frequency,
            })
            .collect();
        entries.sort_by(|a, b| {
            b.weight
                .total_cmp(&a.weight)
                .then_with(|| a.term.surface().cmp(b.term.surface()))
        });
        let n = entries.len();
        RankedTermSet { entries, method, n }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn terms(&self) -> Vec<Term> {
        self.entries.iter().map(|e| e.term.clone()).collect()
    }
}

pub fn rank_tf(stats: &[TermStats]) -> RankedTermSet {
    RankedTermSet::from_weights(stats, RankingMethod::Tf, |s| s.frequency as f64)
}

/// `Target(t) / (Comp(t) + 1)`.
pub fn rank_tficf(stats: &[TermStats], comparison: &ComparisonCorpus) -> RankedTermSet {
    RankedTermSet::from_weights(stats, RankingMethod::TfIcf, |s| {
        s.frequency as f64 / (comparison.count(s.term.surface()) as f64 + 1.0)
    })
}

/// C-value of one term.
///
/// With `L = log2(|a|)` (or `log2(|a| + 1)` in unigram mode) the weight is
/// `L * f(a)` for a term nested in nothing and
/// `L * (f(a) - sum_{b in T_a} f(b) / |T_a|)` otherwise, clamped at zero.
pub fn cvalue(stats: &TermStats, unigram_mode: bool) -> f64 {
    let words = stats.term.len() as f64;
    let length_factor = if unigram_mode { (words + 1.0).log2() } else { words.log2() };
    let f = stats.frequency as f64;
    let nested = &stats.nesting;
    let weight = if nested.longer.is_empty() {
        length_factor * f
    } else {
        length_factor * (f - nested.containment_frequency as f64 / nested.longer.len() as f64)
    };
    weight.max(0.0)
}

pub fn rank_cvalue(stats: &[TermStats], unigram_mode: bool) -> RankedTermSet {
    let method = if unigram_mode {
        RankingMethod::CValueUnigrams
    } else {
        RankingMethod::CValue
    };
    RankedTermSet::from_weights(stats, method, |s| cvalue(s, unigram_mode))
}

pub fn rank(stats: &[TermStats], method: RankingMethod, comparison: &ComparisonCorpus) -> RankedTermSet {
    match method {
        RankingMethod::Tf => rank_tf(stats),
        RankingMethod::TfIcf => rank_tficf(stats, comparison),
        RankingMethod::CValue => rank_cvalue(stats, false),
        RankingMethod::CValueUnigrams => rank_cvalue(stats, true),
    }
}

pub fn top_n(ranked: &RankedTermSet, n: usize) -> Result<RankedTermSet> {
    if n == 0 {
        return Err(CoreError::invalid("n_terms", "must be at least 1"));
    }
    let entries: Vec<RankedTerm> = ranked.entries.iter().take(n).cloned().collect();
    Ok(RankedTermSet {
        n: n.min(ranked.entries.len()),
        entries,
        method: ranked.method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: &str) -> Term {
        Term::parse(s).unwrap()
    }

    fn docs(counts: &[(&str, usize)]) -> Vec<Vec<Term>> {
        counts.iter()
            .flat_map(|(s, n)| std::iter::repeat_with(move || vec![t(s)]).take(*n))
            .collect()
    }

    fn weights(set: &RankedTermSet) -> Vec<(&str, f64)> {
        set.entries.iter().map(|e| (e.term.surface(), e.weight)).collect()
    }

    #[test]
    fn tf_counts() {
        let stats = collect_term_stats(&docs(&[("graph", 3), ("model", 5)]));
        assert_eq!(weights(&rank_tf(&stats)), [("model", 5.0), ("graph", 3.0)]);
        let single = collect_term_stats(&docs(&[("graph", 2)]));
        assert_eq!(weights(&rank_tf(&single)), [("graph", 2.0)]);
        assert!(rank_tf(&[]).is_empty());
    }

    #[test]
    fn tficf_smoothing() {
        let stats = collect_term_stats(&docs(&[("alpha", 10)]));
        let comp: ComparisonCorpus = [("alpha".to_string(), 4)].into_iter().collect();
        assert_eq!(rank_tficf(&stats, &comp).entries[0].weight, 2.0);
        let empty = ComparisonCorpus::default();
        assert_eq!(rank_tficf(&stats, &empty).entries[0].weight, 10.0);

        let stats = collect_term_stats(&docs(&[("first", 6), ("second", 6)]));
        let comp: ComparisonCorpus = [("second".to_string(), 11)].into_iter().collect();
        assert_eq!(weights(&rank_tficf(&stats, &comp)), [("first", 6.0), ("second", 0.5)]);
    }

    #[test]
    fn cvalue_length_factor() {
        let stats = collect_term_stats(&docs(&[("network", 100)]));
        assert_eq!(rank_cvalue(&stats, false).entries[0].weight, 0.0);
        assert_eq!(rank_cvalue(&stats, true).entries[0].weight, 100.0);
    }

    #[test]
    fn cvalue_nested_term() {
        let stats = collect_term_stats(&docs(&[
            ("jaccard coefficient", 10),
            ("partial match jaccard coefficient", 4),
        ]));
        let jc = stats.iter().find(|s| s.term.surface() == "jaccard coefficient").unwrap();
        assert_eq!(jc.nesting.longer, [t("partial match jaccard coefficient")]);
        assert_eq!(jc.nesting.containment_frequency, 4);
        assert_eq!(cvalue(jc, false), 6.0);
        let long = stats.iter().find(|s| s.term.len() == 4).unwrap();
        assert!(long.nesting.longer.is_empty());
        assert_eq!(cvalue(long, false), 2.0 * 4.0);
    }

    #[test]
    fn cvalue_clamps_negative() {
        let stats = collect_term_stats(&docs(&[("web service", 1), ("web service composition", 9)]));
        let ws = stats.iter().find(|s| s.term.len() == 2).unwrap();
        assert_eq!(cvalue(ws, true), 0.0);
    }

    #[test]
    fn top_n_selection() {
        let stats = collect_term_stats(&docs(&[("a", 1), ("b", 3), ("c", 2)]));
        let ranked = rank_tf(&stats);
        let one = top_n(&ranked, 1).unwrap();
        assert_eq!(weights(&one), [("b", 3.0)]);
        assert_eq!(top_n(&ranked, 10).unwrap().entries, ranked.entries);
        assert!(top_n(&ranked, 0).is_err());
    }

    #[test]
    fn ties_break_by_surface() {
        let stats = collect_term_stats(&docs(&[("zeta", 2), ("alpha", 2), ("mid", 2)]));
        let ranked = rank_tf(&stats);
        let order: Vec<&str> = ranked.entries.iter().map(|e| e.term.surface()).collect();
        assert_eq!(order, ["alpha", "mid", "zeta"]);
    }

    #[test]
    fn counts_file_parsing() {
        let c = ComparisonCorpus::from_counts_str("# header\nthe\t100\nNeural  Network\t3\nthe\t1\n").unwrap();
        assert_eq!(c.count("the"), 101);
        assert_eq!(c.count("neural network"), 3);
        assert!(ComparisonCorpus::from_counts_str("x\t-1").is_err());
        assert!(ComparisonCorpus::from_counts_str("x 1").is_err());
        assert!(ComparisonCorpus::bundled().count("the") > 0);
    }

    proptest! {
        #[test]
        fn scaling_frequencies_preserves_order(
            counts in prop::collection::vec(1u64..50, 1..12),
            comp in prop::collection::vec(0u64..30, 12),
            scale in 1u64..9,
        ) {
            let names: Vec<String> = (0..counts.len()).map(|i| format!("term{i}")).collect();
            let build = |mult: u64| -> Vec<TermStats> {
                names.iter().zip(&counts).map(|(n, c)| TermStats {
                    term: t(n), frequency: c * mult, nesting: Nesting::default(),
                }).collect()
            };
            let corpus: ComparisonCorpus = names.iter().cloned().zip(comp.iter().copied()).collect();
            let order = |set: RankedTermSet| set.terms();
            prop_assert_eq!(order(rank_tf(&build(1))), order(rank_tf(&build(scale))));
            prop_assert_eq!(order(rank_tficf(&build(1), &corpus)), order(rank_tficf(&build(scale), &corpus)));
        }
    }
}

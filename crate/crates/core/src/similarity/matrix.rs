use std::collections::{BTreeMap, HashMap};

use crate::text::{ExtractedDocument, Term};

/// Sparse term-by-document occurrence counts, stored row-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDocumentMatrix {
    terms: Vec<Term>,
    doc_ids: Vec<i64>,
    /// Per term, `(column, count)` pairs sorted by column; counts are positive.
    rows: Vec<Vec<(usize, u32)>>,
}

impl TermDocumentMatrix {
    /// Builds from dense row-major counts, dropping zeros.
    pub fn from_dense(terms: Vec<Term>, doc_ids: Vec<i64>, counts: &[u32]) -> Self {
        let cols = doc_ids.len();
        assert_eq!(counts.len(), terms.len() * cols, "dense count shape");
        let rows = (0..terms.len())
            .map(|i| {
                (0..cols)
                    .filter_map(|j| {
                        let c = counts[i * cols + j];
                        (c > 0).then_some((j, c))
                    })
                    .collect()
            })
            .collect();
        TermDocumentMatrix { terms, doc_ids, rows }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn doc_ids(&self) -> &[i64] {
        &self.doc_ids
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, u32)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Row-major dense copy of the counts.
    pub fn to_dense(&self) -> Vec<u32> {
        let cols = self.n_docs();
        let mut dense = vec![0; self.n_terms() * cols];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                dense[i * cols + j] = c;
            }
        }
        dense
    }
}

/// Counts each top term per document.
///
/// An occurrence is a complete extracted term equal to the top term. With
/// `partial_match`, every contiguous occurrence of a top term inside a longer
/// extracted term counts as well.
pub fn build_term_document_matrix(
    top_terms: &[Term],
    docs: &[ExtractedDocument],
    partial_match: bool,
) -> TermDocumentMatrix {
    let index: HashMap<&[String], usize> = top_terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.words(), i))
        .collect();
    let max_len = top_terms.iter().map(Term::len).max().unwrap_or(0);
    let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); top_terms.len()];
    for (col, doc) in docs.iter().enumerate() {
        let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
        for term in &doc.terms {
            if let Some(&row) = index.get(term.words()) {
                *counts.entry(row).or_insert(0) += 1;
            }
            if partial_match {
                let words = term.words();
                for len in 1..words.len().min(max_len + 1) {
                    for window in words.windows(len) {
                        if let Some(&row) = index.get(window) {
                            *counts.entry(row).or_insert(0) += 1;
                        }
                    }
                }
            }
        }
        for (row, c) in counts {
            rows[row].push((col, c));
        }
    }
    TermDocumentMatrix {
        terms: top_terms.to_vec(),
        doc_ids: docs.iter().map(|d| d.id).collect(),
        rows,
    }
}

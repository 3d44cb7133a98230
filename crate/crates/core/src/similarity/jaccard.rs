use super::{SimilarityMatrix, TermDocumentMatrix};

/// `|S_i ∩ S_j| / |S_i ∪ S_j|` over the document sets `S_i = {j : M_ij > 0}`.
///
/// Two empty sets give 0. Over a partial-match matrix this is the Partial
/// Match Jaccard coefficient.
pub fn jaccard_similarity(m: &TermDocumentMatrix) -> SimilarityMatrix {
    let n = m.n_terms();
    let sizes: Vec<u32> = (0..n).map(|i| m.row(i).len() as u32).collect();
    // Terms present in each document.
    let mut by_doc: Vec<Vec<usize>> = vec![Vec::new(); m.n_docs()];
    for i in 0..n {
        for &(j, _) in m.row(i) {
            by_doc[j].push(i);
        }
    }
    let mut shared = vec![0u32; n * n];
    for present in &by_doc {
        for (a, &i) in present.iter().enumerate() {
            for &j in &present[a + 1..] {
                shared[i * n + j] += 1;
            }
        }
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        if sizes[i] > 0 {
            values[i * n + i] = 1.0;
        }
        for j in i + 1..n {
            let inter = shared[i * n + j];
            let union = sizes[i] + sizes[j] - inter;
            let s = if union == 0 { 0.0 } else { inter as f64 / union as f64 };
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    }
    SimilarityMatrix::new(m.terms().to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Term;

    fn terms(n: usize) -> Vec<Term> {
        (0..n).map(|i| Term::parse(&format!("t{i}")).unwrap()).collect()
    }

    fn matrix(rows: &[&[u32]]) -> TermDocumentMatrix {
        let cols = rows[0].len();
        let dense: Vec<u32> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        TermDocumentMatrix::from_dense(terms(rows.len()), (0..cols as i64).collect(), &dense)
    }

    #[test]
    fn identical_disjoint_and_partial_overlap() {
        let m = matrix(&[
            &[1, 1, 0, 0, 0, 1, 1],
            &[2, 1, 0, 0, 0, 3, 1],
            &[0, 0, 1, 1, 0, 0, 0],
            &[1, 0, 1, 0, 0, 1, 0],
            &[0, 0, 0, 0, 0, 0, 0],
        ]);
        let s = jaccard_similarity(&m);
        assert_eq!(s.get(0, 1), 1.0);
        assert_eq!(s.get(0, 2), 0.0);
        // |S_0| = 4, |S_3| = 3, |S_0 ∩ S_3| = 2.
        assert_eq!(s.get(0, 3), 0.4);
        assert_eq!(s.get(4, 4), 0.0);
        assert_eq!(s.get(4, 0), 0.0);
        assert_eq!(s.get(3, 3), 1.0);
    }
}

//! Truncated SVD of a sparse nonnegative matrix.
//!
//! Small problems (rank plus oversampling covering the short side) are
//! decomposed exactly from a dense copy. Larger ones use a randomized range
//! finder with power iterations, touching the sparse matrix only through
//! products, followed by an exact SVD of the projected matrix.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TermDocumentMatrix;

const OVERSAMPLE: usize = 10;
const POWER_ITERATIONS: usize = 4;

#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    /// `U Σ`, one row per term, `rank` columns.
    pub scaled_left: DMatrix<f64>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

fn sparse_times(m: &TermDocumentMatrix, x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut y = DMatrix::zeros(m.n_terms(), x.ncols());
    for i in 0..m.n_terms() {
        for &(j, c) in m.row(i) {
            for k in 0..x.ncols() {
                y[(i, k)] += c as f64 * x[(j, k)];
            }
        }
    }
    y
}

fn sparse_transpose_times(m: &TermDocumentMatrix, x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut y = DMatrix::zeros(m.n_docs(), x.ncols());
    for i in 0..m.n_terms() {
        for &(j, c) in m.row(i) {
            for k in 0..x.ncols() {
                y[(j, k)] += c as f64 * x[(i, k)];
            }
        }
    }
    y
}

fn orthonormal_basis(y: DMatrix<f64>) -> DMatrix<f64> {
    y.qr().q()
}

/// Left singular vectors scaled by singular values, truncated to `rank`
/// (which must not exceed `min(n_terms, n_docs)`).
pub fn truncated_svd(m: &TermDocumentMatrix, rank: usize, seed: u64) -> TruncatedSvd {
    let short_side = m.n_terms().min(m.n_docs());
    let rank = rank.min(short_side);
    if rank == 0 {
        return TruncatedSvd {
            scaled_left: DMatrix::zeros(m.n_terms(), 0),
            singular_values: Vec::new(),
            rank: 0,
        };
    }

    // `basis` has orthonormal columns spanning (approximately) the range of M.
    let (basis, projected) = if rank + OVERSAMPLE >= short_side {
        let dense = DMatrix::from_row_slice(
            m.n_terms(),
            m.n_docs(),
            &m.to_dense().iter().map(|&c| c as f64).collect::<Vec<_>>(),
        );
        if m.n_terms() <= m.n_docs() {
            (DMatrix::identity(m.n_terms(), m.n_terms()), dense)
        } else {
            let basis = orthonormal_basis(dense.clone());
            let projected = basis.transpose() * dense;
            (basis, projected)
        }
    } else {
        let width = rank + OVERSAMPLE;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let omega = DMatrix::from_fn(m.n_docs(), width, |_, _| rng.gen_range(-1.0..1.0));
        let mut q = orthonormal_basis(sparse_times(m, &omega));
        for _ in 0..POWER_ITERATIONS {
            let z = orthonormal_basis(sparse_transpose_times(m, &q));
            q = orthonormal_basis(sparse_times(m, &z));
        }
        let projected = sparse_transpose_times(m, &q).transpose();
        (q, projected)
    };

    let svd = projected.svd(true, false);
    let u_small = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    order.truncate(rank);

    let left = &basis * &u_small;
    let mut scaled_left = DMatrix::zeros(m.n_terms(), rank);
    let mut singular_values = Vec::with_capacity(rank);
    for (col, &k) in order.iter().enumerate() {
        let sigma = svd.singular_values[k];
        singular_values.push(sigma);
        for i in 0..m.n_terms() {
            scaled_left[(i, col)] = left[(i, k)] * sigma;
        }
    }
    TruncatedSvd {
        scaled_left,
        singular_values,
        rank,
    }
}

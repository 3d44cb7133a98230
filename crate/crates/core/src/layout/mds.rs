//! Stress majorization (SMACOF) with unit weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClusterAssignment, Embedding};
use crate::error::{CoreError, Result};
use crate::filtering::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdsOptions {
    pub max_iter: usize,
    /// Stop once the relative stress decrease of an iteration falls below this.
    pub epsilon: f64,
    pub seed: u64,
    /// Multiplier on target distances between terms of the same cluster;
    /// values below 1 pull clusters together, 1 disables the effect.
    pub cluster_gravity: f64,
}

impl Default for MdsOptions {
    fn default() -> Self {
        MdsOptions {
            max_iter: 300,
            epsilon: 1e-6,
            seed: 0,
            cluster_gravity: 1.0,
        }
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// `Σ_{i<j} (‖x_i − x_j‖ − δ_ij)²` over a row-major target matrix.
pub fn raw_stress(positions: &[[f64; 2]], targets: &[f64]) -> f64 {
    let n = positions.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = dist(positions[i], positions[j]) - targets[i * n + j];
            s += r * r;
        }
    }
    s
}

fn guttman_transform(positions: &[[f64; 2]], targets: &[f64]) -> Vec<[f64; 2]> {
    let n = positions.len();
    let inv_n = 1.0 / n as f64;
    (0..n)
        .map(|i| {
            let xi = positions[i];
            let mut acc = [0.0, 0.0];
            for (j, &xj) in positions.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = dist(xi, xj);
                if d > 0.0 {
                    let ratio = targets[i * n + j] / d;
                    acc[0] += ratio * (xi[0] - xj[0]);
                    acc[1] += ratio * (xi[1] - xj[1]);
                }
            }
            [acc[0] * inv_n, acc[1] * inv_n]
        })
        .collect()
}

fn validate(d: &DistanceMatrix, clusters: Option<&ClusterAssignment>, opts: &MdsOptions) -> Result<()> {
    let n = d.len();
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            if !v.is_finite() || v < 0.0 {
                return Err(CoreError::Dimension(format!("distance ({i}, {j}) = {v} is not a finite nonnegative value")));
            }
            if (v - d.get(j, i)).abs() > 1e-12 * (1.0 + v.abs()) {
                return Err(CoreError::Dimension(format!("distance matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    if let Some(c) = clusters {
        if c.cluster_ids.len() != n {
            return Err(CoreError::PartitionMismatch {
                expected: n,
                got: c.cluster_ids.len(),
            });
        }
    }
    if !(opts.cluster_gravity > 0.0 && opts.cluster_gravity.is_finite()) {
        return Err(CoreError::invalid("cluster_gravity", "must be a positive finite number"));
    }
    if !(opts.epsilon >= 0.0) {
        return Err(CoreError::invalid("epsilon", "must be nonnegative"));
    }
    Ok(())
}

/// Metric MDS of `d` in the plane by stress majorization.
///
/// Starts from a seeded uniform configuration in the unit square. Every
/// accepted iteration has stress no larger than the previous one; the loop
/// stops on `max_iter`, on a relative decrease below `epsilon`, or on an
/// exact fit.
pub fn embed_mds(d: &DistanceMatrix, clusters: Option<&ClusterAssignment>, opts: &MdsOptions) -> Result<Embedding> {
    validate(d, clusters, opts)?;
    let n = d.len();
    if n <= 1 {
        return Ok(Embedding {
            positions: vec![[0.0, 0.0]; n],
            stress: 0.0,
            seed: opts.seed,
            stress_history: vec![0.0],
        });
    }
    let mut targets = d.values.clone();
    if let Some(c) = clusters {
        if opts.cluster_gravity != 1.0 {
            for i in 0..n {
                for j in 0..n {
                    if i != j && c.cluster_ids[i] == c.cluster_ids[j] {
                        targets[i * n + j] *= opts.cluster_gravity;
                    }
                }
            }
        }
    }
    let norm: f64 = {
        let s: f64 = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| targets[i * n + j].powi(2)).sum();
        if s > 0.0 {
            s
        } else {
            1.0
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut positions: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let mut stress = raw_stress(&positions, &targets);
    let mut history = vec![stress / norm];
    for _ in 0..opts.max_iter {
        let next = guttman_transform(&positions, &targets);
        let next_stress = raw_stress(&next, &targets);
        if next_stress > stress {
            break;
        }
        positions = next;
        history.push(next_stress / norm);
        let converged = next_stress <= 1e-20 * norm || (stress - next_stress) < opts.epsilon * stress;
        stress = next_stress;
        if converged {
            break;
        }
    }
    Ok(Embedding {
        positions,
        stress: stress / norm,
        seed: opts.seed,
        stress_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Term;
    use nalgebra::Matrix2;

    fn terms(n: usize) -> Vec<Term> {
        (0..n).map(|i| Term::parse(&format!("p{i}")).unwrap()).collect()
    }

    fn from_points(points: &[[f64; 2]]) -> DistanceMatrix {
        let n = points.len();
        let values = (0..n * n).map(|k| dist(points[k / n], points[k % n])).collect();
        DistanceMatrix::from_values(terms(n), values)
    }

    /// Residual after optimal translation plus rotation/reflection.
    pub(crate) fn procrustes_residual(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
        let centre = |p: &[[f64; 2]]| {
            let n = p.len() as f64;
            let c = p.iter().fold([0.0, 0.0], |s, x| [s[0] + x[0], s[1] + x[1]]);
            p.iter().map(|x| [x[0] - c[0] / n, x[1] - c[1] / n]).collect::<Vec<_>>()
        };
        let (a, b) = (centre(a), centre(b));
        let mut h = Matrix2::zeros();
        for (x, y) in a.iter().zip(&b) {
            h += Matrix2::new(x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]);
        }
        let svd = h.svd(true, true);
        let r = svd.u.unwrap() * svd.v_t.unwrap();
        a.iter()
            .zip(&b)
            .map(|(x, y)| {
                let rx = [x[0] * r[(0, 0)] + x[1] * r[(1, 0)], x[0] * r[(0, 1)] + x[1] * r[(1, 1)]];
                (rx[0] - y[0]).powi(2) + (rx[1] - y[1]).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn recovers_three_four_five_triangle() {
        let truth = [[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]];
        let opts = MdsOptions { max_iter: 20_000, epsilon: 0.0, seed: 11, ..Default::default() };
        let e = embed_mds(&from_points(&truth), None, &opts).unwrap();
        assert!(procrustes_residual(&e.positions, &truth) < 1e-6);
    }

    #[test]
    fn single_and_empty() {
        let one = embed_mds(&from_points(&[[5.0, 5.0]]), None, &MdsOptions::default()).unwrap();
        assert_eq!(one.positions, [[0.0, 0.0]]);
        assert!(embed_mds(&from_points(&[]), None, &MdsOptions::default()).unwrap().positions.is_empty());
    }

    #[test]
    fn stress_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20;
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(0.1..2.3);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        let d = DistanceMatrix::from_values(terms(n), values);
        let e = embed_mds(&d, None, &MdsOptions { seed: 1, ..Default::default() }).unwrap();
        assert!(e.stress_history.len() > 2);
        assert!(e.stress_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(e.stress, *e.stress_history.last().unwrap());
    }

    #[test]
    fn deterministic_under_seed() {
        let d = from_points(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 2.0], [1.5, 0.3]]);
        let opts = MdsOptions { seed: 42, ..Default::default() };
        let a = embed_mds(&d, None, &opts).unwrap();
        let b = embed_mds(&d, None, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cluster_gravity_contracts_clusters() {
        let d = from_points(&[[0.0, 0.0], [1.0, 0.0], [5.0, 0.0], [6.0, 0.0]]);
        let clusters = ClusterAssignment { cluster_ids: vec![0, 0, 1, 1], modularity: 0.0 };
        let opts = MdsOptions { cluster_gravity: 0.5, max_iter: 2000, epsilon: 0.0, ..Default::default() };
        let e = embed_mds(&d, Some(&clusters), &opts).unwrap();
        assert!(dist(e.positions[0], e.positions[1]) < 0.8);
        let bad = ClusterAssignment { cluster_ids: vec![0], modularity: 0.0 };
        assert!(embed_mds(&d, Some(&bad), &opts).is_err());
    }

    #[test]
    fn rejects_invalid_distances() {
        let d = DistanceMatrix::from_values(terms(2), vec![0.0, 1.0, 2.0, 0.0]);
        assert!(embed_mds(&d, None, &MdsOptions::default()).is_err());
        let d = DistanceMatrix::from_values(terms(2), vec![0.0, f64::NAN, f64::NAN, 0.0]);
        assert!(embed_mds(&d, None, &MdsOptions::default()).is_err());
    }
}

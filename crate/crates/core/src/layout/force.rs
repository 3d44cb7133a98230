//! Spring-electrical layout in the Fruchterman–Reingold style.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Embedding, TermGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceOptions {
    pub iterations: usize,
    pub seed: u64,
    /// Equilibrium length of a unit-weight edge between two isolated vertices.
    pub natural_length: f64,
}

impl Default for ForceOptions {
    fn default() -> Self {
        ForceOptions {
            iterations: 500,
            seed: 0,
            natural_length: 1.0,
        }
    }
}

/// Attraction `w·d²/k` along edges, repulsion `k²/d` between all pairs, with
/// per-step displacement capped by a linearly cooling temperature.
pub fn embed_force_directed(g: &TermGraph, opts: &ForceOptions) -> Embedding {
    let n = g.n_vertices();
    let k = opts.natural_length;
    let side = k * (n as f64).sqrt().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pos: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.gen::<f64>() * side, rng.gen::<f64>() * side])
        .collect();
    if n <= 1 {
        return Embedding {
            positions: vec![[0.0, 0.0]; n],
            stress: 0.0,
            seed: opts.seed,
            stress_history: Vec::new(),
        };
    }
    let start_temp = 0.1 * side;
    let iterations = opts.iterations.max(1);
    for step in 0..iterations {
        let temp = start_temp * (1.0 - step as f64 / iterations as f64);
        let mut disp = vec![[0.0f64; 2]; n];
        for i in 0..n {
            for j in i + 1..n {
                let mut dx = pos[i][0] - pos[j][0];
                let mut dy = pos[i][1] - pos[j][1];
                let mut d2 = dx * dx + dy * dy;
                if d2 < 1e-18 {
                    // Coincident vertices: separate along a fixed direction.
                    dx = 1e-9 * k;
                    dy = 0.0;
                    d2 = dx * dx;
                }
                let f = k * k / d2; // (k²/d) / d
                disp[i][0] += dx * f;
                disp[i][1] += dy * f;
                disp[j][0] -= dx * f;
                disp[j][1] -= dy * f;
            }
        }
        for &(a, b, w) in &g.edges {
            let dx = pos[a][0] - pos[b][0];
            let dy = pos[a][1] - pos[b][1];
            let d = (dx * dx + dy * dy).sqrt();
            let f = w * d / k; // (w d²/k) / d
            disp[a][0] -= dx * f;
            disp[a][1] -= dy * f;
            disp[b][0] += dx * f;
            disp[b][1] += dy * f;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
            if len > 0.0 {
                let step_len = len.min(temp);
                p[0] += d[0] / len * step_len;
                p[1] += d[1] / len * step_len;
            }
        }
    }
    // Centre on the origin.
    let c = pos.iter().fold([0.0, 0.0], |s, p| [s[0] + p[0], s[1] + p[1]]);
    for p in &mut pos {
        p[0] -= c[0] / n as f64;
        p[1] -= c[1] / n as f64;
    }
    Embedding {
        positions: pos,
        stress: 0.0,
        seed: opts.seed,
        stress_history: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix2, SymmetricEigen};

    #[test]
    fn two_vertices_settle_at_natural_length() {
        let g = TermGraph::unweighted(2, &[(0, 1)]);
        let e = embed_force_directed(&g, &ForceOptions { seed: 3, ..Default::default() });
        let [a, b] = [e.positions[0], e.positions[1]];
        let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        assert!((d - 1.0).abs() < 0.05, "{d}");
    }

    #[test]
    fn deterministic_under_seed() {
        let g = TermGraph::unweighted(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let opts = ForceOptions { seed: 9, ..Default::default() };
        assert_eq!(embed_force_directed(&g, &opts), embed_force_directed(&g, &opts));
    }

    #[test]
    fn path_orders_along_principal_axis() {
        let g = TermGraph::unweighted(4, &[(0, 1), (1, 2), (2, 3)]);
        for seed in 0..5 {
            let e = embed_force_directed(&g, &ForceOptions { seed, ..Default::default() });
            let mut cov = Matrix2::zeros();
            for p in &e.positions {
                cov += Matrix2::new(p[0] * p[0], p[0] * p[1], p[1] * p[0], p[1] * p[1]);
            }
            let eig = SymmetricEigen::new(cov);
            let axis = eig.eigenvectors.column(eig.eigenvalues.imax()).into_owned();
            let proj: Vec<f64> = e.positions.iter().map(|p| p[0] * axis[0] + p[1] * axis[1]).collect();
            let increasing = proj.windows(2).all(|w| w[0] < w[1]);
            let decreasing = proj.windows(2).all(|w| w[0] > w[1]);
            assert!(increasing || decreasing, "seed {seed}: {proj:?}");
        }
    }
}

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::TermGraph;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// Cluster of each vertex; ids are contiguous from 0, numbered by first vertex.
    pub cluster_ids: Vec<usize>,
    pub modularity: f64,
}

impl ClusterAssignment {
    pub fn n_clusters(&self) -> usize {
        self.cluster_ids.iter().max().map_or(0, |m| m + 1)
    }

    /// Renumbers arbitrary labels to contiguous ids in order of first appearance.
    pub fn normalize_labels(labels: &[usize]) -> Vec<usize> {
        let mut map = HashMap::new();
        labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect()
    }
}

/// Weighted modularity `Q = Σ_c [ w_in(c)/W − (w_tot(c) / 2W)² ]`, where `W`
/// is the total edge weight, `w_in(c)` the weight of edges inside `c` and
/// `w_tot(c)` the summed weighted degree of `c`. An edgeless graph scores 0.
pub fn modularity_score(g: &TermGraph, partition: &[usize]) -> Result<f64> {
    if partition.len() != g.n_vertices() {
        return Err(CoreError::PartitionMismatch {
            expected: g.n_vertices(),
            got: partition.len(),
        });
    }
    let total = g.total_weight();
    if total <= 0.0 {
        return Ok(0.0);
    }
    let mut inside: BTreeMap<usize, f64> = BTreeMap::new();
    let mut degree: BTreeMap<usize, f64> = BTreeMap::new();
    for &(a, b, w) in &g.edges {
        *degree.entry(partition[a]).or_insert(0.0) += w;
        *degree.entry(partition[b]).or_insert(0.0) += w;
        if partition[a] == partition[b] {
            *inside.entry(partition[a]).or_insert(0.0) += w;
        }
    }
    Ok(degree
        .iter()
        .map(|(c, d)| inside.get(c).copied().unwrap_or(0.0) / total - (d / (2.0 * total)).powi(2))
        .sum())
}

/// Greedy agglomerative modularity maximization.
///
/// Starting from singletons, repeatedly merges the pair of connected clusters
/// with the largest modularity gain `w_ij/W − tot_i·tot_j/(2W²)` until no merge
/// improves modularity. Equal gains go to the lowest `(i, j)` pair.
pub fn cluster_modularity(g: &TermGraph) -> ClusterAssignment {
    let n = g.n_vertices();
    let total = g.total_weight();
    let mut label: Vec<usize> = (0..n).collect();
    if total > 0.0 {
        let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for &(a, b, w) in &g.edges {
            *adj[a].entry(b).or_insert(0.0) += w;
            *adj[b].entry(a).or_insert(0.0) += w;
        }
        let mut tot = g.strengths();
        let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let scale = 2.0 * total * total;
        loop {
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..n {
                for (&j, &w) in adj[i].range(i + 1..) {
                    let gain = w / total - tot[i] * tot[j] / scale;
                    if best.is_none_or(|(b, _, _)| gain > b) {
                        best = Some((gain, i, j));
                    }
                }
            }
            let Some((gain, i, j)) = best else { break };
            if gain <= 0.0 {
                break;
            }
            let absorbed = std::mem::take(&mut adj[j]);
            for (k, w) in absorbed {
                if k == i {
                    continue;
                }
                adj[k].remove(&j);
                *adj[k].entry(i).or_insert(0.0) += w;
                *adj[i].entry(k).or_insert(0.0) += w;
            }
            adj[i].remove(&j);
            tot[i] += tot[j];
            tot[j] = 0.0;
            let moved = std::mem::take(&mut members[j]);
            for &v in &moved {
                label[v] = i;
            }
            members[i].extend(moved);
        }
    }
    let cluster_ids = ClusterAssignment::normalize_labels(&label);
    let modularity = modularity_score(g, &cluster_ids).expect("partition covers graph");
    ClusterAssignment {
        cluster_ids,
        modularity,
    }
}

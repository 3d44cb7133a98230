//! Planar embedding and modularity clustering of the map's terms.

mod force;
mod graph;
mod mds;
mod modularity;

pub use force::{embed_force_directed, ForceOptions};
pub use graph::TermGraph;
pub use mds::{embed_mds, raw_stress, MdsOptions};
pub use modularity::{cluster_modularity, modularity_score, ClusterAssignment};

use serde::{Deserialize, Serialize};

/// Planar positions for a term list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub positions: Vec<[f64; 2]>,
    /// Final stress normalized by the sum of squared target distances (0 for
    /// force-directed layouts).
    pub stress: f64,
    pub seed: u64,
    /// Normalized stress after each accepted iteration, starting with the
    /// initial configuration.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stress_history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutBackend {
    #[default]
    Mds,
    ForceDirected,
}

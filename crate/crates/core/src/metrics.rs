//! Partition-quality measures: replication factor, load balance and cluster
//! statistics.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::completion::PartitionedGraph;
use crate::error::{Error, Result};
use crate::spring::{ClusterState, UNCLUSTERED};

pub const REPORT_SCHEMA: u32 = 1;

/// `total / distinct` where `total = Σ_i |V_i|` and `distinct = |V|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicationFactor {
    pub total: u64,
    pub distinct: u64,
}

impl ReplicationFactor {
    pub fn value(&self) -> f64 {
        self.total as f64 / self.distinct as f64
    }
}

pub fn replication_factor(g: &PartitionedGraph) -> Result<ReplicationFactor> {
    if g.num_nodes() == 0 {
        return Err(Error::Empty("replication factor of a graph with no nodes".into()));
    }
    Ok(ReplicationFactor {
        total: g.partitions().iter().map(|p| p.nodes.len() as u64).sum(),
        distinct: g.num_nodes() as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceStats {
    pub owned: Vec<u64>,
    pub total: Vec<u64>,
    pub edges: Vec<u64>,
    /// max / mean of owned loads.
    pub owned_imbalance: f64,
    /// max / mean of edge counts.
    pub edge_imbalance: f64,
}

/// `max / mean`, with an all-zero vector counting as perfectly balanced.
pub fn max_over_mean(xs: &[u64]) -> f64 {
    let sum: u64 = xs.iter().sum();
    if xs.is_empty() || sum == 0 {
        return 1.0;
    }
    let max = *xs.iter().max().unwrap() as f64;
    max * xs.len() as f64 / sum as f64
}

pub fn balance_stats(g: &PartitionedGraph) -> BalanceStats {
    let owned: Vec<u64> = g.partitions().iter().map(|p| p.num_owned() as u64).collect();
    let total: Vec<u64> = g.partitions().iter().map(|p| p.nodes.len() as u64).collect();
    let edges: Vec<u64> = g.partitions().iter().map(|p| p.edges.len() as u64).collect();
    BalanceStats {
        owned_imbalance: max_over_mean(&owned),
        edge_imbalance: max_over_mean(&edges),
        owned,
        total,
        edges,
    }
}

/// Live-cluster count with mean and population standard deviation of sizes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    /// Nodes in the counted clusters.
    pub nodes: u64,
}

impl ClusterStats {
    pub fn from_sizes(sizes: &[u64]) -> Self {
        if sizes.is_empty() {
            return ClusterStats::default();
        }
        let n = sizes.len() as f64;
        let nodes: u64 = sizes.iter().sum();
        let mean = nodes as f64 / n;
        let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / n;
        ClusterStats {
            count: sizes.len(),
            mean,
            std: var.sqrt(),
            nodes,
        }
    }
}

/// Statistics over live clusters, skipping clusters made only of isolated
/// nodes (no member has a neighbor other than itself).
pub fn cluster_stats(state: &ClusterState) -> ClusterStats {
    let bound = state.cluster_id_bound() as usize;
    let mut size = vec![0u64; bound];
    let mut connected = vec![false; bound];
    for v in 0..state.num_nodes() {
        let node = crate::graph_stream::NodeId(v as u32);
        let Some(c) = state.cluster(node) else { continue };
        debug_assert_ne!(c, UNCLUSTERED);
        size[c as usize] += 1;
        connected[c as usize] |= state.richest_neighbor(node).is_some();
    }
    let sizes: Vec<u64> = size
        .into_iter()
        .zip(connected)
        .filter(|&(s, c)| s > 0 && c)
        .map(|(s, _)| s)
        .collect();
    ClusterStats::from_sizes(&sizes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub schema: u32,
    pub algorithm: String,
    pub partitions: usize,
    pub nodes: u64,
    pub replication_factor: f64,
    pub replicated_nodes: u64,
    pub balance: BalanceStats,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clusters_before_merge: Option<ClusterStats>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clusters_after_merge: Option<ClusterStats>,
}

impl PartitionReport {
    pub fn new(algorithm: &str, g: &PartitionedGraph) -> Result<Self> {
        let rf = replication_factor(g)?;
        Ok(PartitionReport {
            schema: REPORT_SCHEMA,
            algorithm: algorithm.to_string(),
            partitions: g.partitions().len(),
            nodes: rf.distinct,
            replication_factor: rf.value(),
            replicated_nodes: rf.total,
            balance: balance_stats(g),
            clusters_before_merge: None,
            clusters_after_merge: None,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: PartitionReport = serde_json::from_str(s)?;
        if r.schema != REPORT_SCHEMA {
            return Err(Error::CorruptArtifact(format!("unsupported report schema {}", r.schema)));
        }
        Ok(r)
    }

    /// Aligned plain-text rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "algorithm           {}", self.algorithm);
        let _ = writeln!(out, "partitions          {}", self.partitions);
        let _ = writeln!(out, "nodes               {}", self.nodes);
        let _ = writeln!(out, "replication factor  {:.4}", self.replication_factor);
        let _ = writeln!(out, "owned max/mean      {:.4}", self.balance.owned_imbalance);
        let _ = writeln!(out, "edges max/mean      {:.4}", self.balance.edge_imbalance);
        for (label, stats) in [
            ("clusters (clustered)", self.clusters_before_merge),
            ("clusters (merged)   ", self.clusters_after_merge),
        ] {
            if let Some(s) = stats {
                let _ = writeln!(out, "{label} {} ({:.1} ± {:.1})", s.count, s.mean, s.std);
            }
        }
        let _ = writeln!(out, "{:>9} {:>10} {:>10} {:>12}", "partition", "owned", "nodes", "edges");
        for i in 0..self.partitions {
            let _ = writeln!(
                out,
                "{:>9} {:>10} {:>10} {:>12}",
                i, self.balance.owned[i], self.balance.total[i], self.balance.edges[i]
            );
        }
        out
    }
}

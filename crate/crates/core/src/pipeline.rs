//! End-to-end helpers: partition with any algorithm, complete neighborhoods
//! and sweep algorithm/partition-count grids.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::baselines::{
    dbh_partition, greedy_partition, hdrf_partition, two_phase_partition, Algorithm, HdrfDegrees, NodeHash,
    DEFAULT_HDRF_LAMBDA,
};
use crate::completion::{complete_edges, random_edge_assign, resolve_replica_homes, Homes, PartitionedGraph};
use crate::error::Result;
use crate::exec::Exec;
use crate::graph_stream::{DegreeTable, EdgeSource};
use crate::metrics::{replication_factor, PartitionReport};
use crate::spring::{spring_partition, SpringConfig, SpringOutcome, DEFAULT_BETA};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    pub algorithm: Algorithm,
    pub partitions: usize,
    pub beta: f64,
    pub tau_vol: Option<u64>,
    pub seed: u64,
    pub lambda: f64,
    pub hdrf_degrees: HdrfDegrees,
    pub greedy_slack: f64,
    pub hash: NodeHash,
    /// Completion depth; `0` skips completion and places each cut edge in
    /// one of its endpoints' homes at random.
    pub hops: u32,
}

impl PartitionConfig {
    pub fn new(algorithm: Algorithm, partitions: usize) -> Self {
        PartitionConfig {
            algorithm,
            partitions,
            beta: DEFAULT_BETA,
            tau_vol: None,
            seed: 0,
            lambda: DEFAULT_HDRF_LAMBDA,
            hdrf_degrees: HdrfDegrees::default(),
            greedy_slack: 0.1,
            hash: NodeHash::default(),
            hops: 1,
        }
    }
}

pub struct PartitionRun {
    pub graph: PartitionedGraph,
    pub homes: Homes,
    /// Only for SPRING.
    pub spring: Option<SpringOutcome>,
    /// Vertex-cut replication before completion (1 for SPRING, which
    /// assigns nodes rather than edges).
    pub pre_completion_rf: f64,
}

impl PartitionRun {
    pub fn report(&self, algorithm: Algorithm) -> Result<PartitionReport> {
        let mut r = PartitionReport::new(algorithm.name(), &self.graph)?;
        if let Some(s) = &self.spring {
            r.clusters_before_merge = Some(s.before_merge);
            r.clusters_after_merge = Some(s.after_merge);
        }
        Ok(r)
    }
}

/// Home partition for every node under `cfg`, plus the SPRING outcome when
/// applicable.
pub fn assign_homes(
    src: &dyn EdgeSource,
    degrees: &DegreeTable,
    cfg: &PartitionConfig,
) -> Result<(Homes, Option<SpringOutcome>, f64)> {
    let p = cfg.partitions;
    let replicas = match cfg.algorithm {
        Algorithm::Spring => {
            let out = spring_partition(
                src,
                degrees,
                &SpringConfig {
                    partitions: p,
                    beta: cfg.beta,
                    tau_vol: cfg.tau_vol,
                },
            )?;
            let homes = Homes::from(&out.assignment);
            return Ok((homes, Some(out), 1.0));
        }
        Algorithm::Dbh => dbh_partition(src, degrees, p, cfg.hash)?,
        Algorithm::Greedy => greedy_partition(src, degrees, p, cfg.greedy_slack)?,
        Algorithm::Hdrf => hdrf_partition(src, degrees, p, cfg.lambda, cfg.hdrf_degrees)?,
        Algorithm::TwoPhase => two_phase_partition(src, degrees, p, cfg.tau_vol)?,
    };
    let rf = replicas.replication_factor();
    Ok((resolve_replica_homes(&replicas, cfg.seed), None, rf))
}

pub fn partition_graph(src: &dyn EdgeSource, degrees: &DegreeTable, cfg: &PartitionConfig) -> Result<PartitionRun> {
    let (homes, spring, pre_completion_rf) = assign_homes(src, degrees, cfg)?;
    let graph = if cfg.hops == 0 {
        random_edge_assign(src, degrees, &homes, cfg.seed)?
    } else {
        complete_edges(src, degrees, &homes, cfg.hops)?
    };
    Ok(PartitionRun {
        graph,
        homes,
        spring,
        pre_completion_rf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub algorithm: Algorithm,
    pub partitions: usize,
    pub replication_factor: f64,
    pub pre_completion_rf: f64,
}

/// Post-completion RF for every `(algorithm, p)` pair, configurations run
/// concurrently under `exec`. Cells are ordered by `ps` then `algorithms`.
pub fn sweep(
    src: &dyn EdgeSource,
    degrees: &DegreeTable,
    algorithms: &[Algorithm],
    ps: &[usize],
    base: &PartitionConfig,
    exec: Exec,
) -> Result<Vec<SweepCell>> {
    let grid: Vec<(usize, Algorithm)> = ps
        .iter()
        .flat_map(|&p| algorithms.iter().map(move |&a| (p, a)))
        .collect();
    exec.map_slice(&grid, |&(p, algorithm)| {
        let cfg = PartitionConfig {
            algorithm,
            partitions: p,
            ..*base
        };
        let run = partition_graph(src, degrees, &cfg)?;
        Ok(SweepCell {
            algorithm,
            partitions: p,
            replication_factor: replication_factor(&run.graph)?.value(),
            pre_completion_rf: run.pre_completion_rf,
        })
    })
    .into_iter()
    .collect()
}

/// RF matrix with one row per partition count and one column per algorithm.
pub fn sweep_table(cells: &[SweepCell]) -> String {
    let mut algos: Vec<Algorithm> = Vec::new();
    let mut ps: Vec<usize> = Vec::new();
    for c in cells {
        if !algos.contains(&c.algorithm) {
            algos.push(c.algorithm);
        }
        if !ps.contains(&c.partitions) {
            ps.push(c.partitions);
        }
    }
    let mut out = String::new();
    let _ = write!(out, "{:>4}", "p");
    for a in &algos {
        let _ = write!(out, " {:>9}", a.name());
    }
    out.push('\n');
    for &p in &ps {
        let _ = write!(out, "{p:>4}");
        for &a in &algos {
            match cells.iter().find(|c| c.algorithm == a && c.partitions == p) {
                Some(c) => {
                    let _ = write!(out, " {:>9.4}", c.replication_factor);
                }
                None => {
                    let _ = write!(out, " {:>9}", "-");
                }
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_stream::{compute_degrees, IdMode, MemoryEdges};

    fn two_triangles() -> (MemoryEdges, DegreeTable) {
        let g = MemoryEdges::from_pairs(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]);
        let d = compute_degrees(&g, IdMode::FirstSeen).unwrap();
        (g, d)
    }

    #[test]
    fn every_algorithm_yields_a_valid_partitioning() {
        let (g, d) = two_triangles();
        for a in Algorithm::ALL {
            let run = partition_graph(&g, &d, &PartitionConfig::new(a, 2)).unwrap();
            assert_eq!(run.graph.num_nodes(), 6);
            assert!(replication_factor(&run.graph).unwrap().value() >= 1.0);
            assert_eq!(run.spring.is_some(), a == Algorithm::Spring);
        }
    }

    #[test]
    fn sweep_is_mode_independent() {
        let (g, d) = two_triangles();
        let base = PartitionConfig::new(Algorithm::Spring, 2);
        let a = sweep(&g, &d, &Algorithm::ALL, &[2, 3], &base, Exec::Sequential).unwrap();
        let b = sweep(&g, &d, &Algorithm::ALL, &[2, 3], &base, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        let t = sweep_table(&a);
        assert!(t.lines().next().unwrap().contains("spring"));
        assert_eq!(t.lines().count(), 3);
    }

    #[test]
    fn zero_hops_skips_completion() {
        let (g, d) = two_triangles();
        let mut cfg = PartitionConfig::new(Algorithm::Spring, 2);
        cfg.hops = 0;
        let run = partition_graph(&g, &d, &cfg).unwrap();
        let total: usize = run.graph.partitions().iter().map(|p| p.edges.len()).sum();
        assert_eq!(total, 7);
    }
}

//! Comparison edge partitioners (vertex-cut): DBH, PowerGraph greedy, HDRF and
//! a 2PS-style two-phase clustering partitioner.
//!
//! Each one places every edge in exactly one partition and tracks, per node,
//! the set of partitions holding at least one of its edges.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::bitset::PartitionSets;
use crate::error::{Error, Result};
use crate::graph_stream::{DegreeTable, EdgeSource, NodeId};
use crate::spring::{cluster_stream, default_tau_vol, UNCLUSTERED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Spring,
    Dbh,
    Greedy,
    Hdrf,
    #[serde(rename = "2ps")]
    TwoPhase,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Spring,
        Algorithm::Dbh,
        Algorithm::Greedy,
        Algorithm::Hdrf,
        Algorithm::TwoPhase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Spring => "spring",
            Algorithm::Dbh => "dbh",
            Algorithm::Greedy => "greedy",
            Algorithm::Hdrf => "hdrf",
            Algorithm::TwoPhase => "2ps",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Edge placement produced by a vertex-cut partitioner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicaAssignment {
    /// Partition per edge, in stream order.
    edge_part: Vec<u32>,
    replicas: PartitionSets,
    edge_counts: Vec<u64>,
}

impl ReplicaAssignment {
    fn new(nodes: usize, partitions: usize) -> Self {
        ReplicaAssignment {
            edge_part: Vec::new(),
            replicas: PartitionSets::new(nodes, partitions),
            edge_counts: vec![0; partitions],
        }
    }

    fn place(&mut self, u: NodeId, v: NodeId, s: usize) {
        self.edge_part.push(s as u32);
        self.edge_counts[s] += 1;
        self.replicas.insert(u.index(), s);
        self.replicas.insert(v.index(), s);
    }

    pub fn partitions(&self) -> usize {
        self.edge_counts.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.replicas.nodes()
    }

    pub fn edge_partitions(&self) -> &[u32] {
        &self.edge_part
    }

    pub fn edge_counts(&self) -> &[u64] {
        &self.edge_counts
    }

    pub fn replicas(&self) -> &PartitionSets {
        &self.replicas
    }

    pub fn replica_set(&self, v: NodeId) -> Vec<usize> {
        self.replicas.iter(v.index()).collect()
    }

    /// `Σ_v max(1, |replicas(v)|) / |V|`; a node with no edges still lives
    /// somewhere, so it counts once.
    pub fn replication_factor(&self) -> f64 {
        let n = self.num_nodes();
        if n == 0 {
            return 1.0;
        }
        let total: u64 = (0..n).map(|v| self.replicas.count(v).max(1) as u64).sum();
        total as f64 / n as f64
    }

    pub fn heap_bytes(&self) -> usize {
        4 * self.edge_part.capacity() + self.replicas.heap_bytes() + 8 * self.edge_counts.capacity()
    }
}

fn check_partitions(p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidParameter("partition count must be at least 1".into()));
    }
    Ok(())
}

/// Hash applied to external node ids by DBH.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeHash {
    Identity,
    #[default]
    Mix64,
}

impl NodeHash {
    pub fn hash(self, id: u64) -> u64 {
        match self {
            NodeHash::Identity => id,
            NodeHash::Mix64 => {
                // splitmix64 finaliser
                let mut z = id.wrapping_add(0x9e37_79b9_7f4a_7c15);
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
                z ^ (z >> 31)
            }
        }
    }
}

/// Degree-based hashing: each edge follows the hash of its lower-degree
/// endpoint (lower external id on a degree tie).
pub fn dbh_partition(
    src: &dyn EdgeSource,
    degrees: &DegreeTable,
    partitions: usize,
    hash: NodeHash,
) -> Result<ReplicaAssignment> {
    check_partitions(partitions)?;
    let mut out = ReplicaAssignment::new(degrees.num_nodes(), partitions);
    degrees.replay_dense(src, &mut |u, v| {
        let (du, dv) = (degrees.degree(u), degrees.degree(v));
        let (eu, ev) = (degrees.external(u), degrees.external(v));
        let pick = if du < dv || (du == dv && eu <= ev) { eu } else { ev };
        let s = (hash.hash(pick) % partitions as u64) as usize;
        out.place(u, v, s);
        Ok(())
    })?;
    Ok(out)
}

fn least_loaded(loads: &[u64], candidates: impl Iterator<Item = usize>) -> Option<usize> {
    candidates.min_by_key(|&s| (loads[s], s))
}

/// PowerGraph greedy vertex-cut.
///
/// Candidate sets, in order of preference: partitions holding both
/// endpoints, partitions holding either endpoint, all partitions. The least
/// loaded candidate wins. Candidates whose edge load exceeds
/// `(1 + balance_slack) * assigned / p + 1` are skipped; if that leaves none
/// the globally least-loaded partition is used.
pub fn greedy_partition(
    src: &dyn EdgeSource,
    degrees: &DegreeTable,
    partitions: usize,
    balance_slack: f64,
) -> Result<ReplicaAssignment> {
    check_partitions(partitions)?;
    if !(balance_slack >= 0.0) {
        return Err(Error::InvalidParameter("balance slack must be non-negative".into()));
    }
    let mut out = ReplicaAssignment::new(degrees.num_nodes(), partitions);
    let mut assigned = 0u64;
    degrees.replay_dense(src, &mut |u, v| {
        let s = greedy_choose(&out.replicas, &out.edge_counts, u, v, assigned, balance_slack);
        out.place(u, v, s);
        assigned += 1;
        Ok(())
    })?;
    Ok(out)
}

fn greedy_choose(
    replicas: &PartitionSets,
    loads: &[u64],
    u: NodeId,
    v: NodeId,
    assigned: u64,
    balance_slack: f64,
) -> usize {
    let cap = (1.0 + balance_slack) * assigned as f64 / loads.len() as f64 + 1.0;
    let ok = |s: &usize| loads[*s] as f64 <= cap;
    let (iu, iv) = (u.index(), v.index());
    least_loaded(loads, replicas.intersection_iter(iu, iv).filter(ok))
        .or_else(|| least_loaded(loads, replicas.union_iter(iu, iv).filter(ok)))
        .or_else(|| least_loaded(loads, 0..loads.len()))
        .expect("at least one partition")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HdrfDegrees {
    /// Degrees counted so far in the stream (the original formulation).
    #[default]
    Partial,
    /// Exact degrees from the first pass.
    Exact,
}

pub const DEFAULT_HDRF_LAMBDA: f64 = 1.1;
const HDRF_EPSILON: f64 = 1.0;

/// High-Degree Replicated First.
///
/// Score of partition `s` for edge `(u, v)`:
/// `g(u,s) + g(v,s) + lambda * (max_load - load_s) / (epsilon + max_load - min_load)`
/// with `g(x,s) = 1 + (1 - theta(x))` if `s` already holds `x`, else 0, and
/// `theta(u) = d(u) / (d(u) + d(v))`. Highest score wins, lowest index on
/// ties; `epsilon = 1`.
pub fn hdrf_partition(
    src: &dyn EdgeSource,
    degrees: &DegreeTable,
    partitions: usize,
    lambda: f64,
    mode: HdrfDegrees,
) -> Result<ReplicaAssignment> {
    check_partitions(partitions)?;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter("lambda must be non-negative".into()));
    }
    let mut out = ReplicaAssignment::new(degrees.num_nodes(), partitions);
    let mut partial = match mode {
        HdrfDegrees::Partial => vec![0u32; degrees.num_nodes()],
        HdrfDegrees::Exact => Vec::new(),
    };
    degrees.replay_dense(src, &mut |u, v| {
        let (du, dv) = match mode {
            HdrfDegrees::Partial => {
                partial[u.index()] += 1;
                partial[v.index()] += 1;
                (partial[u.index()], partial[v.index()])
            }
            HdrfDegrees::Exact => (degrees.degree(u), degrees.degree(v)),
        };
        let s = hdrf_choose(&out.replicas, &out.edge_counts, u, v, (du, dv), lambda);
        out.place(u, v, s);
        Ok(())
    })?;
    Ok(out)
}

fn hdrf_choose(
    replicas: &PartitionSets,
    loads: &[u64],
    u: NodeId,
    v: NodeId,
    (du, dv): (u32, u32),
    lambda: f64,
) -> usize {
    let sum = (du + dv).max(1) as f64;
    let theta_u = du as f64 / sum;
    let theta_v = dv as f64 / sum;
    let max_load = *loads.iter().max().unwrap() as f64;
    let min_load = *loads.iter().min().unwrap() as f64;
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (s, &load) in loads.iter().enumerate() {
        let mut rep = 0.0;
        if replicas.contains(u.index(), s) {
            rep += 2.0 - theta_u;
        }
        if replicas.contains(v.index(), s) {
            rep += 2.0 - theta_v;
        }
        let bal = lambda * (max_load - load as f64) / (HDRF_EPSILON + max_load - min_load);
        if rep + bal > best.0 {
            best = (rep + bal, s);
        }
    }
    best.1
}

/// 2PS-style two-phase partitioner.
///
/// Phase one runs the same streaming clustering as SPRING (no merging) and
/// maps clusters, by descending volume, onto the partition with the least
/// accumulated volume. Phase two re-streams the edges: an edge whose endpoint
/// clusters share a partition goes there, otherwise it follows the endpoint
/// in the higher-volume cluster (`u` on a tie).
pub fn two_phase_partition(
    src: &dyn EdgeSource,
    degrees: &DegreeTable,
    partitions: usize,
    tau_vol: Option<u64>,
) -> Result<ReplicaAssignment> {
    check_partitions(partitions)?;
    let tau = tau_vol.unwrap_or_else(|| default_tau_vol(degrees.num_edges(), partitions));
    let clusters = cluster_stream(src, degrees, tau)?;

    let mut order: Vec<(u64, u32)> = clusters
        .live_clusters()
        .into_iter()
        .map(|c| (clusters.volume(c), c))
        .collect();
    order.sort_unstable_by_key(|&(vol, c)| (Reverse(vol), c));
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = (0..partitions).map(|s| Reverse((0, s))).collect();
    let mut cluster_part = vec![0u32; clusters.cluster_id_bound() as usize];
    for (vol, c) in order {
        let Reverse((load, s)) = heap.pop().unwrap();
        cluster_part[c as usize] = s as u32;
        heap.push(Reverse((load + vol, s)));
    }

    let mut out = ReplicaAssignment::new(degrees.num_nodes(), partitions);
    degrees.replay_dense(src, &mut |u, v| {
        let cu = clusters.cluster(u).unwrap_or(UNCLUSTERED);
        let cv = clusters.cluster(v).unwrap_or(UNCLUSTERED);
        let (pu, pv) = (cluster_part[cu as usize], cluster_part[cv as usize]);
        let s = if pu == pv || clusters.volume(cu) >= clusters.volume(cv) { pu } else { pv };
        out.place(u, v, s as usize);
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_stream::{compute_degrees, IdMode, MemoryEdges};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn dense(pairs: &[(u64, u64)], n: u64) -> (MemoryEdges, DegreeTable) {
        let g = MemoryEdges::from_pairs(pairs);
        let d = compute_degrees(&g, IdMode::Dense(n)).unwrap();
        (g, d)
    }

    /// Rebuilds replica sets from the per-edge placements.
    fn recount(g: &MemoryEdges, d: &DegreeTable, a: &ReplicaAssignment) -> Vec<BTreeSet<usize>> {
        let mut sets = vec![BTreeSet::new(); d.num_nodes()];
        for (e, &s) in g.0.iter().zip(a.edge_partitions()) {
            sets[d.dense(e.u).unwrap().index()].insert(s as usize);
            sets[d.dense(e.v).unwrap().index()].insert(s as usize);
        }
        sets
    }

    fn assert_consistent(g: &MemoryEdges, d: &DegreeTable, a: &ReplicaAssignment) {
        assert_eq!(a.edge_partitions().len(), g.0.len());
        let sets = recount(g, d, a);
        for (v, set) in sets.iter().enumerate() {
            assert_eq!(&a.replica_set(NodeId(v as u32)).into_iter().collect::<BTreeSet<_>>(), set);
        }
        assert_eq!(a.edge_counts().iter().sum::<u64>(), g.0.len() as u64);
        assert!(a.replication_factor() >= 1.0);
    }

    #[test]
    fn dbh_follows_lower_degree_endpoint() {
        let (g, d) = dense(&[(3, 4), (4, 5)], 6);
        let a = dbh_partition(&g, &d, 2, NodeHash::Identity).unwrap();
        // d(3)=1 < d(4)=2 -> hash(3) % 2 = 1
        assert_eq!(a.edge_partitions()[0], 1);
        // d(5)=1 < d(4)=2 -> hash(5) % 2 = 1
        assert_eq!(a.edge_partitions()[1], 1);
    }

    #[test]
    fn dbh_star_replicates_center_once_per_leaf_partition() {
        let (g, d) = dense(&[(0, 1), (0, 2), (0, 3), (0, 4)], 5);
        let a = dbh_partition(&g, &d, 2, NodeHash::Identity).unwrap();
        // leaves hash to 1, 0, 1, 0
        assert_eq!(a.edge_partitions(), &[1, 0, 1, 0]);
        let leaf_parts: BTreeSet<usize> = (1..=4).map(|l| l % 2).collect();
        assert_eq!(a.replica_set(NodeId(0)).len(), leaf_parts.len());
        assert_consistent(&g, &d, &a);
    }

    #[test]
    fn single_partition_has_unit_rf() {
        let (g, d) = dense(&[(0, 1), (1, 2), (2, 3), (3, 0)], 4);
        for a in [
            dbh_partition(&g, &d, 1, NodeHash::Mix64).unwrap(),
            greedy_partition(&g, &d, 1, 0.1).unwrap(),
            hdrf_partition(&g, &d, 1, 1.1, HdrfDegrees::Partial).unwrap(),
            two_phase_partition(&g, &d, 1, None).unwrap(),
        ] {
            assert!(a.edge_partitions().iter().all(|&s| s == 0));
            assert_eq!(a.replication_factor(), 1.0);
        }
    }

    #[test]
    fn greedy_first_edge_and_intersection_rule() {
        let (g, d) = dense(&[(0, 1)], 2);
        let a = greedy_partition(&g, &d, 3, 0.1).unwrap();
        assert_eq!(a.edge_partitions(), &[0]);

        let mut reps = PartitionSets::new(2, 4);
        for s in [0, 2] {
            reps.insert(0, s);
        }
        for s in [1, 2, 3] {
            reps.insert(1, s);
        }
        let loads = [0, 0, 9, 0];
        assert_eq!(greedy_choose(&reps, &loads, NodeId(0), NodeId(1), 9, f64::INFINITY), 2);
        // no intersection: least loaded holder of either endpoint
        let mut reps = PartitionSets::new(2, 4);
        reps.insert(0, 2);
        reps.insert(1, 3);
        assert_eq!(greedy_choose(&reps, &[0, 0, 5, 4], NodeId(0), NodeId(1), 9, f64::INFINITY), 3);
        // slack excludes an overloaded shared partition
        let mut reps = PartitionSets::new(2, 2);
        reps.insert(0, 1);
        reps.insert(1, 1);
        assert_eq!(greedy_choose(&reps, &[0, 10], NodeId(0), NodeId(1), 10, 0.1), 0);
    }

    #[test]
    fn greedy_path_replicas_recount() {
        let pairs: Vec<(u64, u64)> = (0..20).map(|i| (i, i + 1)).collect();
        let (g, d) = dense(&pairs, 21);
        let a = greedy_partition(&g, &d, 2, 0.1).unwrap();
        assert_consistent(&g, &d, &a);
    }

    #[test]
    fn hdrf_first_edge_goes_to_lowest_index() {
        let (g, d) = dense(&[(0, 1)], 2);
        let a = hdrf_partition(&g, &d, 4, 1.1, HdrfDegrees::Partial).unwrap();
        assert_eq!(a.edge_partitions(), &[0]);
    }

    #[test]
    fn hdrf_balance_term_spreads_disjoint_edges() {
        let (g, d) = dense(&[(2, 3), (0, 1)], 4);
        let a = hdrf_partition(&g, &d, 2, 2.0, HdrfDegrees::Partial).unwrap();
        assert_eq!(a.edge_partitions(), &[0, 1]);
    }

    #[test]
    fn hdrf_lambda_zero_prefers_shared_partition() {
        let mut reps = PartitionSets::new(2, 3);
        reps.insert(0, 1);
        reps.insert(1, 1);
        assert_eq!(hdrf_choose(&reps, &[0, 50, 0], NodeId(0), NodeId(1), (3, 7), 0.0), 1);
        // with only one endpoint present, the higher-degree one's partition loses
        let mut reps = PartitionSets::new(2, 2);
        reps.insert(0, 0);
        reps.insert(1, 1);
        // theta(0) = 0.1 -> g = 1.9 ; theta(1) = 0.9 -> g = 1.1
        assert_eq!(hdrf_choose(&reps, &[0, 0], NodeId(0), NodeId(1), (1, 9), 0.0), 0);
        assert_eq!(hdrf_choose(&reps, &[0, 0], NodeId(0), NodeId(1), (9, 1), 0.0), 1);
    }

    #[test]
    fn two_phase_separates_cliques() {
        let mut pairs = Vec::new();
        for base in [0u64, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    pairs.push((base + i, base + j));
                }
            }
        }
        let (g, d) = dense(&pairs, 8);
        let a = two_phase_partition(&g, &d, 2, None).unwrap();
        assert_eq!(a.replication_factor(), 1.0);
        assert_eq!(a.edge_counts(), &[6, 6]);
        assert_consistent(&g, &d, &a);
    }

    #[test]
    fn zero_partitions_rejected() {
        let (g, d) = dense(&[(0, 1)], 2);
        assert!(dbh_partition(&g, &d, 0, NodeHash::Mix64).is_err());
        assert!(greedy_partition(&g, &d, 0, 0.1).is_err());
        assert!(hdrf_partition(&g, &d, 0, 1.0, HdrfDegrees::Partial).is_err());
        assert!(hdrf_partition(&g, &d, 2, -1.0, HdrfDegrees::Partial).is_err());
        assert!(two_phase_partition(&g, &d, 0, None).is_err());
    }

    #[test]
    fn algorithm_names_parse() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("metis".parse::<Algorithm>().is_err());
    }

    proptest! {
        #[test]
        fn replica_sets_match_recount(
            edges in prop::collection::vec((0u64..30, 0u64..30), 1..150),
            p in 1usize..7,
        ) {
            let (g, d) = dense(&edges, 30);
            for a in [
                dbh_partition(&g, &d, p, NodeHash::Mix64).unwrap(),
                greedy_partition(&g, &d, p, 0.1).unwrap(),
                hdrf_partition(&g, &d, p, DEFAULT_HDRF_LAMBDA, HdrfDegrees::Partial).unwrap(),
                two_phase_partition(&g, &d, p, None).unwrap(),
            ] {
                assert_consistent(&g, &d, &a);
                let rf = a.replication_factor();
                let spans = (0..30).any(|v| a.replicas.count(v) > 1);
                prop_assert_eq!(rf > 1.0, spans);
            }
            let again = hdrf_partition(&g, &d, p, 1.1, HdrfDegrees::Partial).unwrap();
            prop_assert_eq!(again, hdrf_partition(&g, &d, p, 1.1, HdrfDegrees::Partial).unwrap());
        }
    }
}

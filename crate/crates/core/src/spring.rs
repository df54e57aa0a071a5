//! SPRING: streaming node clustering, richest-neighbor cluster merging and
//! greedy assignment of whole clusters to partitions.
//!
//! All state is indexed by dense node id or by cluster id; cluster ids are
//! allocated at most once per node, so every array here is `O(|V|)`. No
//! adjacency is ever stored.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_stream::{DegreeTable, EdgeSource, NodeId};
use crate::metrics::{cluster_stats, ClusterStats};

/// Marks an unset richest neighbor or representative.
pub const NO_NODE: u32 = u32::MAX;
/// Cluster id of a node that has not been seen in the stream.
pub const UNCLUSTERED: u32 = 0;

pub const DEFAULT_BETA: f64 = 1.05;

/// Volume threshold used when none is given: one partition's share of the
/// edge endpoints, `max(1, ceil(2|E|/p))`.
pub fn default_tau_vol(num_edges: u64, partitions: usize) -> u64 {
    (2 * num_edges).div_ceil(partitions.max(1) as u64).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterState {
    /// Cluster id per node, `UNCLUSTERED` for unseen nodes. May be stale after
    /// merging until [`ClusterState::resolve`] is called.
    cluster_of: Vec<u32>,
    /// Indexed by cluster id; slot 0 is unused.
    volume: Vec<u64>,
    size: Vec<u32>,
    /// Union-find parent over cluster ids.
    alias: Vec<u32>,
    richest: Vec<u32>,
    next_cluster: u32,
}

impl ClusterState {
    fn with_nodes(n: usize) -> Self {
        ClusterState {
            cluster_of: vec![UNCLUSTERED; n],
            volume: vec![0; n + 1],
            size: vec![0; n + 1],
            alias: (0..=n as u32).collect(),
            richest: vec![NO_NODE; n],
            next_cluster: 1,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.cluster_of.len()
    }

    /// Highest cluster id allocated so far plus one.
    pub fn cluster_id_bound(&self) -> u32 {
        self.next_cluster
    }

    fn find(&self, mut c: u32) -> u32 {
        while self.alias[c as usize] != c {
            c = self.alias[c as usize];
        }
        c
    }

    fn find_compress(&mut self, mut c: u32) -> u32 {
        while self.alias[c as usize] != c {
            let grand = self.alias[self.alias[c as usize] as usize];
            self.alias[c as usize] = grand;
            c = grand;
        }
        c
    }

    /// Live cluster of `v`, or `None` if `v` never appeared in the stream.
    pub fn cluster(&self, v: NodeId) -> Option<u32> {
        match self.cluster_of[v.index()] {
            UNCLUSTERED => None,
            c => Some(self.find(c)),
        }
    }

    pub fn richest_neighbor(&self, v: NodeId) -> Option<NodeId> {
        match self.richest[v.index()] {
            NO_NODE => None,
            n => Some(NodeId(n)),
        }
    }

    pub fn volume(&self, cluster: u32) -> u64 {
        self.volume[self.find(cluster) as usize]
    }

    pub fn size(&self, cluster: u32) -> u32 {
        self.size[self.find(cluster) as usize]
    }

    fn is_live(&self, c: u32) -> bool {
        c != UNCLUSTERED && self.alias[c as usize] == c && self.size[c as usize] > 0
    }

    /// Ids of non-empty, non-aliased clusters in ascending order.
    pub fn live_clusters(&self) -> Vec<u32> {
        (1..self.next_cluster).filter(|&c| self.is_live(c)).collect()
    }

    pub fn num_live_clusters(&self) -> usize {
        (1..self.next_cluster).filter(|&c| self.is_live(c)).count()
    }

    /// Members of `cluster`, by a scan over all nodes.
    pub fn members(&self, cluster: u32) -> Vec<NodeId> {
        let c = self.find(cluster);
        (0..self.cluster_of.len() as u32)
            .map(NodeId)
            .filter(|&v| self.cluster(v) == Some(c))
            .collect()
    }

    /// Rewrites every node's cluster id to its live alias and flattens the
    /// alias table.
    pub fn resolve(&mut self) {
        for v in 0..self.cluster_of.len() {
            let c = self.cluster_of[v];
            if c != UNCLUSTERED {
                self.cluster_of[v] = self.find_compress(c);
            }
        }
        for c in 1..self.next_cluster {
            let root = self.find_compress(c);
            self.alias[c as usize] = root;
        }
    }

    pub fn heap_bytes(&self) -> usize {
        4 * (self.cluster_of.capacity() + self.size.capacity() + self.alias.capacity() + self.richest.capacity())
            + 8 * self.volume.capacity()
    }

    fn fresh(&mut self, v: usize, degree: u32) {
        let c = self.next_cluster;
        self.next_cluster += 1;
        self.cluster_of[v] = c;
        self.volume[c as usize] = degree as u64;
        self.size[c as usize] = 1;
    }

    fn move_node(&mut self, v: usize, degree: u32, to: u32) {
        let from = self.cluster_of[v] as usize;
        self.volume[from] -= degree as u64;
        self.size[from] -= 1;
        self.volume[to as usize] += degree as u64;
        self.size[to as usize] += 1;
        self.cluster_of[v] = to;
    }
}

#[inline]
fn degree_of(degrees: &[u32], v: u32) -> u32 {
    if v == NO_NODE {
        0
    } else {
        degrees[v as usize]
    }
}

/// One-pass streaming clustering with volume threshold `tau_vol`.
///
/// Unseen endpoints open singleton clusters. When both endpoint clusters have
/// volume at most `tau_vol`, the endpoint in the lighter cluster joins the
/// heavier one (`u` moves on a tie). Richest neighbors are replaced only by a
/// strictly higher-degree neighbor. Self-loops register their node and are
/// otherwise ignored.
pub fn cluster_stream(src: &dyn EdgeSource, degrees: &DegreeTable, tau_vol: u64) -> Result<ClusterState> {
    if tau_vol == 0 {
        return Err(Error::InvalidParameter("tau_vol must be positive".into()));
    }
    let deg = degrees.degrees();
    let mut st = ClusterState::with_nodes(degrees.num_nodes());
    degrees.replay_dense(src, &mut |u, v| {
        let (u, v) = (u.index(), v.index());
        if st.cluster_of[u] == UNCLUSTERED {
            st.fresh(u, deg[u]);
        }
        if st.cluster_of[v] == UNCLUSTERED {
            st.fresh(v, deg[v]);
        }
        if u == v {
            return Ok(());
        }
        let (cu, cv) = (st.cluster_of[u], st.cluster_of[v]);
        let (vol_u, vol_v) = (st.volume[cu as usize], st.volume[cv as usize]);
        if cu != cv && vol_u <= tau_vol && vol_v <= tau_vol {
            if vol_u <= vol_v {
                st.move_node(u, deg[u], cv);
            } else {
                st.move_node(v, deg[v], cu);
            }
        }
        if degree_of(deg, st.richest[u]) < deg[v] {
            st.richest[u] = v as u32;
        }
        if degree_of(deg, st.richest[v]) < deg[u] {
            st.richest[v] = u as u32;
        }
        Ok(())
    })?;
    Ok(st)
}

/// Representative node per cluster id (`NO_NODE` when the cluster has none).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergePlan {
    representative: Vec<u32>,
}

impl MergePlan {
    pub fn representative(&self, cluster: u32) -> Option<NodeId> {
        match self.representative.get(cluster as usize).copied() {
            None | Some(NO_NODE) => None,
            Some(r) => Some(NodeId(r)),
        }
    }

    pub fn heap_bytes(&self) -> usize {
        4 * self.representative.capacity()
    }
}

/// Picks, for every cluster, the member whose richest neighbor has the
/// largest degree; the first such member in node order wins ties. Members
/// without a richest neighbor are skipped.
pub fn select_representatives(state: &ClusterState, degrees: &DegreeTable) -> MergePlan {
    let deg = degrees.degrees();
    let mut representative = vec![NO_NODE; state.size.len()];
    for v in 0..state.num_nodes() {
        let n_v = state.richest[v];
        if n_v == NO_NODE || state.cluster_of[v] == UNCLUSTERED {
            continue;
        }
        let c = state.find(state.cluster_of[v]) as usize;
        let r = representative[c];
        if r == NO_NODE || degree_of(deg, state.richest[r as usize]) < deg[n_v as usize] {
            representative[c] = v as u32;
        }
    }
    MergePlan { representative }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MergeReport {
    pub merges: u64,
    pub declined: u64,
    pub internal_targets: u64,
    /// Size bound `beta * |V| / p` that every merge respected.
    pub bound: f64,
}

/// Merges clusters into the cluster holding their representative's richest
/// neighbor, smallest first, as long as the merged size stays within
/// `beta * |V| / p`.
///
/// Work queue: a min-heap on (size, id). A merged cluster re-enters at its new
/// size; a cluster whose target is itself or too large is retired.
pub fn merge_clusters(
    state: &mut ClusterState,
    plan: &mut MergePlan,
    degrees: &DegreeTable,
    partitions: usize,
    beta: f64,
) -> Result<MergeReport> {
    if partitions == 0 {
        return Err(Error::InvalidParameter("partition count must be at least 1".into()));
    }
    if !(beta >= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must be >= 1, got {beta}")));
    }
    let deg = degrees.degrees();
    let bound = beta * state.num_nodes() as f64 / partitions as f64;
    let mut report = MergeReport {
        bound,
        ..MergeReport::default()
    };
    let mut queue: BinaryHeap<Reverse<(u32, u32)>> = (1..state.next_cluster)
        .filter(|&c| state.is_live(c) && plan.representative[c as usize] != NO_NODE)
        .map(|c| Reverse((state.size[c as usize], c)))
        .collect();

    while let Some(Reverse((size, i))) = queue.pop() {
        if !state.is_live(i) || state.size[i as usize] != size {
            continue;
        }
        let r = plan.representative[i as usize];
        if r == NO_NODE {
            continue;
        }
        let target_node = state.richest[r as usize];
        let t = state.find_compress(state.cluster_of[target_node as usize]);
        if t == i {
            report.internal_targets += 1;
            continue;
        }
        let merged = size as u64 + state.size[t as usize] as u64;
        if merged as f64 > bound {
            report.declined += 1;
            continue;
        }
        state.alias[i as usize] = t;
        state.size[t as usize] = merged as u32;
        state.size[i as usize] = 0;
        state.volume[t as usize] += state.volume[i as usize];
        state.volume[i as usize] = 0;
        let rt = plan.representative[t as usize];
        let richer_source = rt == NO_NODE
            || degree_of(deg, state.richest[rt as usize]) < degree_of(deg, state.richest[r as usize]);
        if richer_source {
            plan.representative[t as usize] = r;
        }
        plan.representative[i as usize] = NO_NODE;
        report.merges += 1;
        queue.push(Reverse((merged as u32, t)));
    }
    state.resolve();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionAssignment {
    part: Vec<u32>,
    loads: Vec<u64>,
}

impl PartitionAssignment {
    /// Builds an assignment from an explicit owner table.
    pub fn from_parts(part: Vec<u32>, partitions: usize) -> Result<Self> {
        let mut loads = vec![0u64; partitions];
        for &p in &part {
            *loads
                .get_mut(p as usize)
                .ok_or_else(|| Error::InvalidParameter(format!("partition {p} out of range")))? += 1;
        }
        Ok(PartitionAssignment { part, loads })
    }

    pub fn partitions(&self) -> usize {
        self.loads.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.part.len()
    }

    #[inline]
    pub fn partition_of(&self, v: NodeId) -> u32 {
        self.part[v.index()]
    }

    pub fn owners(&self) -> &[u32] {
        &self.part
    }

    /// Owned-node count per partition.
    pub fn loads(&self) -> &[u64] {
        &self.loads
    }

    pub fn heap_bytes(&self) -> usize {
        4 * self.part.capacity() + 8 * self.loads.capacity()
    }
}

/// Least-loaded-first list scheduling of whole clusters (largest first), then
/// of unclustered nodes one at a time. Ties go to the lower partition index.
pub fn assign_partitions(state: &ClusterState, partitions: usize) -> Result<PartitionAssignment> {
    if partitions == 0 {
        return Err(Error::InvalidParameter("partition count must be at least 1".into()));
    }
    let mut clusters: Vec<(u32, u32)> = (1..state.next_cluster)
        .filter(|&c| state.is_live(c))
        .map(|c| (state.size[c as usize], c))
        .collect();
    clusters.sort_unstable_by_key(|&(size, c)| (Reverse(size), c));

    let mut heap: BinaryHeap<Reverse<(u64, u32)>> = (0..partitions as u32).map(|s| Reverse((0, s))).collect();
    let mut place = |weight: u64| -> u32 {
        let Reverse((load, s)) = heap.pop().expect("at least one partition");
        heap.push(Reverse((load + weight, s)));
        s
    };
    let mut cluster_part = vec![u32::MAX; state.size.len()];
    for &(size, c) in &clusters {
        cluster_part[c as usize] = place(size as u64);
    }
    let mut part = vec![0u32; state.num_nodes()];
    for (v, slot) in part.iter_mut().enumerate() {
        *slot = match state.cluster_of[v] {
            UNCLUSTERED => place(1),
            c => cluster_part[state.find(c) as usize],
        };
    }
    PartitionAssignment::from_parts(part, partitions)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringConfig {
    pub partitions: usize,
    pub beta: f64,
    /// `None` selects [`default_tau_vol`].
    pub tau_vol: Option<u64>,
}

impl SpringConfig {
    pub fn new(partitions: usize) -> Self {
        SpringConfig {
            partitions,
            beta: DEFAULT_BETA,
            tau_vol: None,
        }
    }

    pub fn resolved_tau_vol(&self, degrees: &DegreeTable) -> u64 {
        self.tau_vol
            .unwrap_or_else(|| default_tau_vol(degrees.num_edges(), self.partitions))
    }
}

#[derive(Debug, Clone)]
pub struct SpringOutcome {
    pub assignment: PartitionAssignment,
    pub clusters: ClusterState,
    pub before_merge: ClusterStats,
    pub after_merge: ClusterStats,
    pub merge: MergeReport,
    pub tau_vol: u64,
    /// Largest cluster size before merging began.
    pub largest_before_merge: u32,
}

/// Full pipeline: clustering, representative selection, merging, assignment.
pub fn spring_partition(src: &dyn EdgeSource, degrees: &DegreeTable, config: &SpringConfig) -> Result<SpringOutcome> {
    let tau_vol = config.resolved_tau_vol(degrees);
    let mut clusters = cluster_stream(src, degrees, tau_vol)?;
    let before_merge = cluster_stats(&clusters);
    let largest_before_merge = clusters.size.iter().copied().max().unwrap_or(0);
    let mut plan = select_representatives(&clusters, degrees);
    let merge = merge_clusters(&mut clusters, &mut plan, degrees, config.partitions, config.beta)?;
    let after_merge = cluster_stats(&clusters);
    let assignment = assign_partitions(&clusters, config.partitions)?;
    Ok(SpringOutcome {
        assignment,
        clusters,
        before_merge,
        after_merge,
        merge,
        tau_vol,
        largest_before_merge,
    })
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

    fn groups(st: &ClusterState) -> BTreeSet<Vec<u32>> {
        st.live_clusters()
            .into_iter()
            .map(|c| st.members(c).into_iter().map(|v| v.0).collect())
            .collect()
    }

    /// Hand-built state: `assign[v]` is the cluster id (0 = unclustered).
    fn state_from(assign: &[u32], richest: &[u32], degrees: &[u32]) -> ClusterState {
        let mut st = ClusterState::with_nodes(assign.len());
        st.next_cluster = assign.iter().copied().max().unwrap_or(0) + 1;
        for (v, &c) in assign.iter().enumerate() {
            st.cluster_of[v] = c;
            if c != UNCLUSTERED {
                st.size[c as usize] += 1;
                st.volume[c as usize] += degrees[v] as u64;
            }
        }
        st.richest = richest.to_vec();
        st
    }

    #[test]
    fn clustering_trace_on_path_and_pair() {
        let g = MemoryEdges::from_pairs(&[(0, 1), (1, 2), (3, 4)]);
        let d = DegreeTable::from_dense_degrees(vec![1, 2, 1, 1, 1], 3, 0);
        let st = cluster_stream(&g, &d, 100).unwrap();
        assert_eq!(groups(&st), BTreeSet::from([vec![0, 1, 2], vec![3, 4]]));
        assert_eq!(st.richest_neighbor(NodeId(0)), Some(NodeId(1)));
        assert_eq!(st.richest_neighbor(NodeId(2)), Some(NodeId(1)));
        assert_eq!(st.richest_neighbor(NodeId(3)), Some(NodeId(4)));
        // node 1 saw 0 first; 2 has the same degree so it is not an improvement
        assert_eq!(st.richest_neighbor(NodeId(1)), Some(NodeId(0)));
    }

    #[test]
    fn tie_moves_u_into_v_cluster() {
        let (g, d) = dense(&[(0, 1)], 2);
        let st = cluster_stream(&g, &d, 10).unwrap();
        assert_eq!(groups(&st), BTreeSet::from([vec![0, 1]]));
        // u left its own cluster (id 1); v's cluster (id 2) survives
        assert_eq!(st.cluster(NodeId(0)), Some(2));
        assert_eq!(st.num_live_clusters(), 1);
    }

    #[test]
    fn tiny_threshold_blocks_every_move() {
        let (g, d) = dense(&[(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)], 4);
        assert!(d.degrees().iter().all(|&x| x >= 2));
        let st = cluster_stream(&g, &d, 1).unwrap();
        assert_eq!(st.num_live_clusters(), 4);
    }

    #[test]
    fn zero_threshold_rejected_and_unknown_nodes_propagate() {
        let (g, d) = dense(&[(0, 1)], 2);
        assert!(matches!(cluster_stream(&g, &d, 0), Err(Error::InvalidParameter(_))));
        let other = MemoryEdges::from_pairs(&[(0, 5)]);
        assert!(matches!(cluster_stream(&other, &d, 5), Err(Error::UnknownNode(5))));
    }

    #[test]
    fn self_loops_register_but_never_move() {
        let (g, d) = dense(&[(0, 0), (1, 2), (1, 1)], 3);
        let st = cluster_stream(&g, &d, 100).unwrap();
        assert!(st.cluster(NodeId(0)).is_some());
        assert_eq!(st.richest_neighbor(NodeId(0)), None);
        assert_eq!(st.richest_neighbor(NodeId(1)), Some(NodeId(2)));
        assert_eq!(groups(&st), BTreeSet::from([vec![0], vec![1, 2]]));
    }

    #[test]
    fn representative_first_maximal_member() {
        // degrees: 0 -> 1, 1 -> 2, 2 -> 1 ; richest: n0=1, n1=0, n2=1
        let degrees = [1, 2, 1, 1];
        let st = state_from(&[1, 1, 1, 2], &[1, 0, 1, 2], &degrees);
        let d = DegreeTable::from_dense_degrees(degrees.to_vec(), 0, 0);
        let plan = select_representatives(&st, &d);
        assert_eq!(plan.representative(1), Some(NodeId(0)));
        // singleton whose node has a richest neighbor represents itself
        assert_eq!(plan.representative(2), Some(NodeId(3)));
    }

    #[test]
    fn isolated_only_cluster_has_no_representative() {
        let st = state_from(&[1, 2], &[NO_NODE, NO_NODE], &[0, 0]);
        let d = DegreeTable::from_dense_degrees(vec![0, 0], 0, 0);
        let plan = select_representatives(&st, &d);
        assert_eq!(plan.representative(1), None);
        assert_eq!(plan.representative(2), None);
    }

    #[test]
    fn merge_trace_sizes_one_one_eight() {
        // cluster 1 = {0}, cluster 2 = {1}, cluster 3 = {2..=9}
        // node 0 -> richest 1; node 1 -> richest 2; big cluster points inside
        let mut assign = vec![3u32; 10];
        assign[0] = 1;
        assign[1] = 2;
        let mut richest = vec![3u32; 10];
        richest[0] = 1;
        richest[1] = 2;
        richest[3] = 2;
        let degrees = [1, 2, 9, 2, 2, 2, 2, 2, 2, 2];
        let mut st = state_from(&assign, &richest, &degrees);
        let d = DegreeTable::from_dense_degrees(degrees.to_vec(), 0, 0);
        let mut plan = select_representatives(&st, &d);
        let before = st.num_live_clusters();
        let report = merge_clusters(&mut st, &mut plan, &d, 2, 1.05).unwrap();
        assert_eq!(before, 3);
        assert_eq!(report.merges, 1);
        assert_eq!(report.declined, 1);
        let mut sizes: Vec<u32> = st.live_clusters().iter().map(|&c| st.size(c)).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 8]);
        assert!((report.bound - 5.25).abs() < 1e-12);
        // both small nodes now resolve to cluster 2
        assert_eq!(st.cluster(NodeId(0)), st.cluster(NodeId(1)));
    }

    #[test]
    fn tight_bound_forbids_all_merges() {
        let (g, d) = dense(&[(0, 1), (2, 3), (1, 2), (4, 5), (5, 0)], 6);
        let mut st = cluster_stream(&g, &d, 1).unwrap();
        let snapshot = st.clone();
        let mut plan = select_representatives(&st, &d);
        // beta * |V| / p = 1.0 * 6 / 4 = 1.5 < 2
        let report = merge_clusters(&mut st, &mut plan, &d, 4, 1.0).unwrap();
        assert_eq!(report.merges, 0);
        assert_eq!(groups(&st), groups(&snapshot));
    }

    #[test]
    fn internal_target_is_a_noop() {
        let (g, d) = dense(&[(0, 1)], 2);
        let mut st = cluster_stream(&g, &d, 10).unwrap();
        let mut plan = select_representatives(&st, &d);
        let report = merge_clusters(&mut st, &mut plan, &d, 1, 1.05).unwrap();
        assert_eq!(report.internal_targets, 1);
        assert_eq!(report.merges, 0);
        assert_eq!(st.num_live_clusters(), 1);
    }

    #[test]
    fn merge_rejects_bad_parameters() {
        let (g, d) = dense(&[(0, 1)], 2);
        let mut st = cluster_stream(&g, &d, 10).unwrap();
        let mut plan = select_representatives(&st, &d);
        assert!(merge_clusters(&mut st, &mut plan, &d, 0, 1.05).is_err());
        assert!(merge_clusters(&mut st, &mut plan, &d, 2, 0.5).is_err());
        assert!(merge_clusters(&mut st, &mut plan, &d, 2, f64::NAN).is_err());
    }

    #[test]
    fn list_scheduling_trace() {
        // sizes 5, 3, 3, 1 in clusters 1..=4
        let mut assign = Vec::new();
        for (c, n) in [(1u32, 5), (2, 3), (3, 3), (4, 1)] {
            assign.extend(std::iter::repeat_n(c, n));
        }
        let n = assign.len();
        let st = state_from(&assign, &vec![NO_NODE; n], &vec![1; n]);
        let a = assign_partitions(&st, 2).unwrap();
        assert_eq!(a.loads(), &[6, 6]);
        assert_eq!(a.partition_of(NodeId(0)), 0);
        assert_eq!(a.partition_of(NodeId(5)), 1);
        assert_eq!(a.partition_of(NodeId(8)), 1);
        assert_eq!(a.partition_of(NodeId(11)), 0);
    }

    #[test]
    fn one_cluster_many_partitions() {
        let st = state_from(&[1, 1, 1], &[NO_NODE; 3], &[1; 3]);
        let a = assign_partitions(&st, 4).unwrap();
        assert_eq!(a.loads(), &[3, 0, 0, 0]);
    }

    #[test]
    fn singletons_round_robin() {
        let assign: Vec<u32> = (1..=7).collect();
        let st = state_from(&assign, &[NO_NODE; 7], &[1; 7]);
        let a = assign_partitions(&st, 2).unwrap();
        assert_eq!(a.loads(), &[4, 3]);
        let unclustered = state_from(&[0; 5], &[NO_NODE; 5], &[0; 5]);
        let a = assign_partitions(&unclustered, 2).unwrap();
        assert_eq!(a.loads(), &[3, 2]);
    }

    #[test]
    fn two_triangles_split_cleanly() {
        let (g, d) = dense(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], 6);
        let cfg = SpringConfig { partitions: 2, beta: 1.05, tau_vol: Some(1000) };
        let out = spring_partition(&g, &d, &cfg).unwrap();
        let a = &out.assignment;
        assert_eq!(a.loads(), &[3, 3]);
        assert_eq!(a.partition_of(NodeId(0)), a.partition_of(NodeId(2)));
        assert_eq!(a.partition_of(NodeId(3)), a.partition_of(NodeId(5)));
        assert_ne!(a.partition_of(NodeId(0)), a.partition_of(NodeId(3)));
    }

    #[test]
    fn one_partition_owns_everything() {
        let (g, d) = dense(&[(0, 1), (1, 2), (3, 4)], 6);
        let out = spring_partition(&g, &d, &SpringConfig::new(1)).unwrap();
        assert!(out.assignment.owners().iter().all(|&p| p == 0));
        assert_eq!(out.assignment.loads(), &[6]);
    }

    #[test]
    fn default_threshold() {
        assert_eq!(default_tau_vol(10, 4), 5);
        assert_eq!(default_tau_vol(0, 4), 1);
        assert_eq!(default_tau_vol(5278, 4), 2639);
    }

    fn arb_graph() -> impl Strategy<Value = (u64, Vec<(u64, u64)>)> {
        (2u64..40).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..120)))
    }

    fn adjacency(n: u64, edges: &[(u64, u64)]) -> Vec<BTreeSet<u32>> {
        let mut adj = vec![BTreeSet::new(); n as usize];
        for &(u, v) in edges {
            if u != v {
                adj[u as usize].insert(v as u32);
                adj[v as usize].insert(u as u32);
            }
        }
        adj
    }

    proptest! {
        #[test]
        fn volumes_match_member_degrees((n, edges) in arb_graph(), tau in 1u64..50) {
            let (g, d) = dense(&edges, n);
            let st = cluster_stream(&g, &d, tau).unwrap();
            let mut seen = 0u32;
            for c in st.live_clusters() {
                let members = st.members(c);
                let vol: u64 = members.iter().map(|&v| d.degree(v) as u64).sum();
                prop_assert_eq!(vol, st.volume(c));
                prop_assert_eq!(members.len() as u32, st.size(c));
                seen += members.len() as u32;
            }
            let touched = (0..n as u32).filter(|&v| d.degree(NodeId(v)) > 0).count() as u32;
            prop_assert_eq!(seen, touched);
        }

        #[test]
        fn richest_neighbor_is_a_max_degree_neighbor((n, edges) in arb_graph()) {
            let (g, d) = dense(&edges, n);
            let st = cluster_stream(&g, &d, 1_000).unwrap();
            let adj = adjacency(n, &edges);
            for v in 0..n as u32 {
                let best = adj[v as usize].iter().map(|&u| d.degree(NodeId(u))).max();
                match st.richest_neighbor(NodeId(v)) {
                    None => prop_assert!(best.is_none()),
                    Some(r) => {
                        prop_assert!(adj[v as usize].contains(&r.0));
                        prop_assert_eq!(Some(d.degree(r)), best);
                    }
                }
            }
        }

        #[test]
        fn merging_is_safe_and_balanced((n, edges) in arb_graph(), p in 1usize..6, tau in 1u64..60) {
            let (g, d) = dense(&edges, n);
            let cfg = SpringConfig { partitions: p, beta: 1.05, tau_vol: Some(tau) };
            let out = spring_partition(&g, &d, &cfg).unwrap();
            prop_assert!(out.after_merge.count <= out.before_merge.count);
            let bound = 1.05 * n as f64 / p as f64;
            let largest = out.clusters.live_clusters().iter().map(|&c| out.clusters.size(c)).max().unwrap_or(0);
            prop_assert!(largest as f64 <= bound || largest <= out.largest_before_merge);
            let loads = out.assignment.loads();
            prop_assert_eq!(loads.iter().sum::<u64>(), n);
            let max_unit = largest.max(1) as u64;
            let max_load = *loads.iter().max().unwrap();
            prop_assert!((max_load as f64) <= n as f64 / p as f64 + max_unit as f64);
            let again = spring_partition(&g, &d, &cfg).unwrap();
            prop_assert_eq!(again.assignment, out.assignment);
        }
    }
}

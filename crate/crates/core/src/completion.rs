//! Home resolution and the second streaming pass that materialises each
//! node's neighborhood in its home partition.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::ReplicaAssignment;
use crate::bitset::PartitionSets;
use crate::error::{Error, Result};
use crate::graph_stream::{DegreeTable, EdgeSource, NodeId};
use crate::spring::PartitionAssignment;

/// Training role of a node. Only owner records carry one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Train,
    Val,
    Test,
    #[default]
    None,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Train => "train",
            Role::Val => "val",
            Role::Test => "test",
            Role::None => "none",
        }
    }
}

impl std::str::FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Role::Train),
            "val" | "valid" => Ok(Role::Val),
            "test" => Ok(Role::Test),
            "none" | "-" => Ok(Role::None),
            other => Err(Error::InvalidParameter(format!("unknown role {other:?}"))),
        }
    }
}

/// Unique home partition per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homes {
    home: Vec<u32>,
    partitions: usize,
}

impl Homes {
    pub fn new(home: Vec<u32>, partitions: usize) -> Result<Self> {
        if let Some(&bad) = home.iter().find(|&&h| h as usize >= partitions) {
            return Err(Error::InvalidParameter(format!(
                "home partition {bad} out of range for {partitions} partitions"
            )));
        }
        Ok(Homes { home, partitions })
    }

    #[inline]
    pub fn home(&self, v: NodeId) -> u32 {
        self.home[v.index()]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.home
    }

    pub fn partitions(&self) -> usize {
        self.partitions
    }

    pub fn num_nodes(&self) -> usize {
        self.home.len()
    }
}

impl From<&PartitionAssignment> for Homes {
    fn from(a: &PartitionAssignment) -> Self {
        Homes {
            home: a.owners().to_vec(),
            partitions: a.partitions(),
        }
    }
}

/// Picks a home for every node of an edge-partitioned graph: uniformly among
/// its replicas (seeded), or, for nodes without edges, the partition with the
/// fewest homes so far.
pub fn resolve_replica_homes(assignment: &ReplicaAssignment, seed: u64) -> Homes {
    let p = assignment.partitions();
    let n = assignment.num_nodes();
    let reps = assignment.replicas();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut home = vec![u32::MAX; n];
    let mut counts = vec![0u64; p];
    let mut scratch = Vec::with_capacity(p.min(64));
    for (v, slot) in home.iter_mut().enumerate() {
        scratch.clear();
        scratch.extend(reps.iter(v));
        if scratch.is_empty() {
            continue;
        }
        let s = scratch[rng.random_range(0..scratch.len())];
        *slot = s as u32;
        counts[s] += 1;
    }
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
        counts.iter().enumerate().map(|(s, &c)| Reverse((c, s))).collect();
    for slot in home.iter_mut().filter(|h| **h == u32::MAX) {
        let Reverse((c, s)) = heap.pop().expect("at least one partition");
        *slot = s as u32;
        heap.push(Reverse((c + 1, s)));
    }
    Homes { home, partitions: p }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub owner: bool,
    pub role: Role,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    /// Node table sorted by id.
    pub nodes: Vec<NodeRecord>,
    /// Dense-id edges in stream order.
    pub edges: Vec<(NodeId, NodeId)>,
}

impl Partition {
    pub fn owned(&self) -> impl Iterator<Item = &NodeRecord> {
        self.nodes.iter().filter(|r| r.owner)
    }

    pub fn num_owned(&self) -> usize {
        self.owned().count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedGraph {
    num_nodes: usize,
    parts: Vec<Partition>,
}

impl PartitionedGraph {
    /// Checks that every node is owned exactly once and ids are in range.
    pub fn new(num_nodes: usize, parts: Vec<Partition>) -> Result<Self> {
        let mut owned = vec![false; num_nodes];
        for part in &parts {
            for r in &part.nodes {
                let slot = owned.get_mut(r.id.index()).ok_or_else(|| {
                    Error::CorruptArtifact(format!("node {} outside 0..{num_nodes}", r.id.0))
                })?;
                if r.owner {
                    if *slot {
                        return Err(Error::CorruptArtifact(format!("node {} owned twice", r.id.0)));
                    }
                    *slot = true;
                } else if r.role != Role::None {
                    return Err(Error::CorruptArtifact(format!("replica of node {} carries a role", r.id.0)));
                }
            }
            for &(u, v) in &part.edges {
                if u.index() >= num_nodes || v.index() >= num_nodes {
                    return Err(Error::CorruptArtifact("edge endpoint out of range".into()));
                }
            }
        }
        if let Some(v) = owned.iter().position(|o| !o) {
            return Err(Error::CorruptArtifact(format!("node {v} has no owner")));
        }
        Ok(PartitionedGraph { num_nodes, parts })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.parts
    }

    pub fn partition(&self, i: usize) -> &Partition {
        &self.parts[i]
    }

    /// Attaches roles to owner records; replicas stay `Role::None`.
    pub fn apply_roles(&mut self, roles: &[Role]) -> Result<()> {
        if roles.len() != self.num_nodes {
            return Err(Error::ShapeMismatch(format!(
                "{} roles for {} nodes",
                roles.len(),
                self.num_nodes
            )));
        }
        for part in &mut self.parts {
            for r in part.nodes.iter_mut() {
                r.role = if r.owner { roles[r.id.index()] } else { Role::None };
            }
        }
        Ok(())
    }

    /// Home partition of every node.
    pub fn homes(&self) -> Homes {
        let mut home = vec![0u32; self.num_nodes];
        for (i, part) in self.parts.iter().enumerate() {
            for r in part.owned() {
                home[r.id.index()] = i as u32;
            }
        }
        Homes {
            home,
            partitions: self.parts.len(),
        }
    }
}

fn check_homes(homes: &Homes, degrees: &DegreeTable) -> Result<()> {
    if homes.num_nodes() != degrees.num_nodes() {
        return Err(Error::ShapeMismatch(format!(
            "{} homes for {} nodes",
            homes.num_nodes(),
            degrees.num_nodes()
        )));
    }
    if homes.partitions == 0 {
        return Err(Error::InvalidParameter("partition count must be at least 1".into()));
    }
    Ok(())
}

fn build(presence: PartitionSets, homes: &Homes, edges: Vec<Vec<(NodeId, NodeId)>>) -> PartitionedGraph {
    let mut parts: Vec<Partition> = edges
        .into_iter()
        .map(|edges| Partition { nodes: Vec::new(), edges })
        .collect();
    for v in 0..presence.nodes() {
        for s in presence.iter(v) {
            parts[s].nodes.push(NodeRecord {
                id: NodeId(v as u32),
                owner: homes.home[v] as usize == s,
                role: Role::None,
            });
        }
    }
    PartitionedGraph {
        num_nodes: homes.num_nodes(),
        parts,
    }
}

fn home_sets(homes: &Homes) -> PartitionSets {
    let mut sets = PartitionSets::new(homes.num_nodes(), homes.partitions);
    for (v, &h) in homes.home.iter().enumerate() {
        sets.insert(v, h as usize);
    }
    sets
}

/// Materialises `hops`-hop neighborhoods around owned nodes.
///
/// A partition receives every edge with an endpoint within `hops - 1` hops of
/// one of its owned nodes; for `hops = 1` that is each edge in the homes of
/// both endpoints. Needs `hops - 1` extra stream passes, each holding one
/// `p`-bit set per node.
pub fn complete_edges(
    src: &dyn EdgeSource,
    degrees: &DegreeTable,
    homes: &Homes,
    hops: u32,
) -> Result<PartitionedGraph> {
    check_homes(homes, degrees)?;
    if !(1..=3).contains(&hops) {
        return Err(Error::InvalidParameter(format!("hops must be 1, 2 or 3, got {hops}")));
    }
    let mut reach = home_sets(homes);
    for _ in 1..hops {
        let mut next = reach.clone();
        degrees.replay_dense(src, &mut |u, v| {
            next.union_from(v.index(), &reach, u.index());
            next.union_from(u.index(), &reach, v.index());
            Ok(())
        })?;
        reach = next;
    }
    let mut presence = home_sets(homes);
    let mut edges = vec![Vec::new(); homes.partitions];
    degrees.replay_dense(src, &mut |u, v| {
        for s in reach.union_iter(u.index(), v.index()) {
            edges[s].push((u, v));
            presence.insert(u.index(), s);
            presence.insert(v.index(), s);
        }
        Ok(())
    })?;
    Ok(build(presence, homes, edges))
}

/// Ablation without completion: an edge whose endpoints have different homes
/// goes to exactly one of the two, chosen by a fair seeded coin.
pub fn random_edge_assign(
    src: &dyn EdgeSource,
    degrees: &DegreeTable,
    homes: &Homes,
    seed: u64,
) -> Result<PartitionedGraph> {
    check_homes(homes, degrees)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut presence = home_sets(homes);
    let mut edges = vec![Vec::new(); homes.partitions];
    degrees.replay_dense(src, &mut |u, v| {
        let (hu, hv) = (homes.home(u) as usize, homes.home(v) as usize);
        let s = if hu == hv || rng.random_bool(0.5) { hu } else { hv };
        edges[s].push((u, v));
        presence.insert(u.index(), s);
        presence.insert(v.index(), s);
        Ok(())
    })?;
    Ok(build(presence, homes, edges))
}

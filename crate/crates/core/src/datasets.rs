//! Seeded synthetic graphs.
//!
//! [`CitationPreset`] describes a labelled citation-style graph (node,
//! edge, class and feature counts plus split ratios); [`generate`] builds one
//! with a degree-corrected planted-community model: classes are split into
//! small topical communities, node propensities are Pareto distributed and
//! each edge endpoint is drawn from the same community, the same class or the
//! whole graph. Features are sparse binary bags of words with a class-topic
//! bias. [`GeneratedStream`] is a large replayable stream that is regenerated
//! on every pass instead of being stored.

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Pareto, Poisson};
use serde::{Deserialize, Serialize};

use crate::completion::Role;
use crate::error::{Error, Result};
use crate::graph_stream::{write_text_edges, Edge, EdgeSource, MemoryEdges, ReplayStats};
use crate::store::write_features;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationPreset {
    pub name: String,
    pub nodes: usize,
    /// Undirected edges, each emitted once.
    pub edges: usize,
    pub classes: usize,
    pub features: usize,
    /// Nodes left without any edge.
    pub isolated: usize,
    /// Train / validation / test fractions.
    pub split: [f64; 3],
    pub mean_community: f64,
    pub p_community: f64,
    pub p_class: f64,
    pub pareto_shape: f64,
    pub words_per_node: f64,
    /// Fraction of a node's words drawn from its class topic.
    pub topic_bias: f64,
}

impl CitationPreset {
    /// Cora-sized: 2,708 nodes, 5,278 edges, 7 classes, 1,433 features.
    pub fn cora() -> Self {
        CitationPreset {
            name: "cora".into(),
            nodes: 2708,
            edges: 5278,
            classes: 7,
            features: 1433,
            isolated: 0,
            split: [0.45, 0.18, 0.37],
            mean_community: 80.0,
            p_community: 0.5,
            p_class: 0.3,
            pareto_shape: 2.1,
            words_per_node: 18.0,
            topic_bias: 0.25,
        }
    }

    /// Citeseer-sized: 3,327 nodes, 4,614 edges, 6 classes, 3,703 features.
    pub fn citeseer() -> Self {
        CitationPreset {
            name: "citeseer".into(),
            nodes: 3327,
            edges: 4614,
            classes: 6,
            features: 3703,
            isolated: 48,
            split: [0.55, 0.15, 0.30],
            mean_community: 40.0,
            p_community: 0.45,
            p_class: 0.3,
            pareto_shape: 2.3,
            words_per_node: 32.0,
            topic_bias: 0.2,
        }
    }

    /// Pubmed-sized: 19,717 nodes, 44,324 edges, 3 classes, 500 features.
    pub fn pubmed() -> Self {
        CitationPreset {
            name: "pubmed".into(),
            nodes: 19717,
            edges: 44324,
            classes: 3,
            features: 500,
            isolated: 0,
            split: [0.92, 0.03, 0.05],
            mean_community: 150.0,
            p_community: 0.5,
            p_class: 0.3,
            pareto_shape: 1.9,
            words_per_node: 50.0,
            topic_bias: 0.1,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "cora" => Some(Self::cora()),
            "citeseer" => Some(Self::citeseer()),
            "pubmed" => Some(Self::pubmed()),
            _ => None,
        }
    }
}

/// A generated labelled graph. Node ids are dense `0..nodes`.
#[derive(Debug, Clone)]
pub struct CitationGraph {
    pub preset: CitationPreset,
    pub seed: u64,
    pub edges: MemoryEdges,
    pub labels: Vec<u32>,
    pub roles: Vec<Role>,
    community: Vec<u32>,
}

/// Weighted sampler over a fixed index set (cumulative weights + bisection).
struct Weighted {
    items: Vec<u32>,
    cumulative: Vec<f64>,
}

impl Weighted {
    fn new(items: Vec<u32>, weight: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = items
            .iter()
            .map(|&i| {
                acc += weight[i as usize];
                acc
            })
            .collect();
        Weighted { items, cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u32 {
        let total = *self.cumulative.last().expect("non-empty sampler");
        let x = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= x);
        self.items[i.min(self.items.len() - 1)]
    }
}

pub fn generate(preset: &CitationPreset, seed: u64) -> CitationGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = preset.nodes;
    let k = preset.classes;

    // uneven class sizes
    let class_weight: Vec<f64> = (0..k).map(|c| 1.0 / ((c % 4) as f64 + 1.5)).collect();
    let class_sampler = Weighted::new((0..k as u32).collect(), &class_weight);
    let mut labels: Vec<u32> = (0..n).map(|_| class_sampler.sample(&mut rng)).collect();
    labels.sort_unstable();

    // consecutive runs of each class form communities of random size
    let mut community = vec![0u32; n];
    let mut next = 0u32;
    let mut i = 0;
    while i < n {
        let size = 1 + Poisson::new(preset.mean_community - 1.0).unwrap().sample(&mut rng) as usize;
        let class = labels[i];
        let mut j = i;
        while j < n && j - i < size && labels[j] == class {
            community[j] = next;
            j += 1;
        }
        next += 1;
        i = j;
    }

    // shuffle ids so that neither class nor community correlates with id
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut shuffled_labels = vec![0u32; n];
    let mut shuffled_comm = vec![0u32; n];
    for (old, &new) in perm.iter().enumerate() {
        shuffled_labels[new] = labels[old];
        shuffled_comm[new] = community[old];
    }
    let labels = shuffled_labels;
    let community = shuffled_comm;

    let pareto = Pareto::new(1.0, preset.pareto_shape).unwrap();
    let mut weight: Vec<f64> = (0..n).map(|_| pareto.sample(&mut rng).min(60.0)).collect();
    let mut ids: Vec<u32> = (0..n as u32).collect();
    ids.shuffle(&mut rng);
    for &v in ids.iter().take(preset.isolated) {
        weight[v as usize] = 0.0;
    }
    let connected: Vec<u32> = ids[preset.isolated..].to_vec();

    let mut by_comm: Vec<Vec<u32>> = vec![Vec::new(); next as usize];
    let mut by_class: Vec<Vec<u32>> = vec![Vec::new(); k];
    for &v in &connected {
        by_comm[community[v as usize] as usize].push(v);
        by_class[labels[v as usize] as usize].push(v);
    }
    let comm_samplers: Vec<Option<Weighted>> = by_comm
        .into_iter()
        .map(|m| (m.len() > 1).then(|| Weighted::new(m, &weight)))
        .collect();
    let class_samplers: Vec<Option<Weighted>> = by_class
        .into_iter()
        .map(|m| (m.len() > 1).then(|| Weighted::new(m, &weight)))
        .collect();
    let global = Weighted::new(connected.clone(), &weight);

    let pick_partner = |u: u32, rng: &mut ChaCha8Rng| -> u32 {
        let x = rng.random::<f64>();
        let c = community[u as usize] as usize;
        let l = labels[u as usize] as usize;
        if x < preset.p_community {
            if let Some(s) = &comm_samplers[c] {
                return s.sample(rng);
            }
        }
        if x < preset.p_community + preset.p_class {
            if let Some(s) = &class_samplers[l] {
                return s.sample(rng);
            }
        }
        global.sample(rng)
    };

    let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(preset.edges * 2);
    let mut edges = Vec::with_capacity(preset.edges);
    let mut try_add = |u: u32, v: u32, edges: &mut Vec<(u64, u64)>| -> bool {
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            return false;
        }
        edges.push((u as u64, v as u64));
        true
    };
    // every connected node cites at least one other
    let mut order = connected.clone();
    order.shuffle(&mut rng);
    for &u in &order {
        if edges.len() >= preset.edges {
            break;
        }
        for _ in 0..32 {
            let v = pick_partner(u, &mut rng);
            if try_add(u, v, &mut edges) {
                break;
            }
        }
    }
    while edges.len() < preset.edges {
        let u = global.sample(&mut rng);
        let v = pick_partner(u, &mut rng);
        try_add(u, v, &mut edges);
    }
    edges.shuffle(&mut rng);

    let mut roles = vec![Role::None; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let n_train = (preset.split[0] * n as f64).round() as usize;
    let n_val = (preset.split[1] * n as f64).round() as usize;
    let n_test = ((preset.split[2] * n as f64).round() as usize).min(n - n_train - n_val);
    for (rank, &v) in order.iter().enumerate() {
        roles[v] = if rank < n_train {
            Role::Train
        } else if rank < n_train + n_val {
            Role::Val
        } else if rank < n_train + n_val + n_test {
            Role::Test
        } else {
            Role::None
        };
    }

    CitationGraph {
        preset: preset.clone(),
        seed,
        edges: MemoryEdges::from_pairs(&edges),
        labels,
        roles,
        community,
    }
}

impl CitationGraph {
    pub fn num_nodes(&self) -> usize {
        self.preset.nodes
    }

    /// Fraction of edges joining two nodes of the same class.
    pub fn edge_homophily(&self) -> f64 {
        let same = self
            .edges
            .0
            .iter()
            .filter(|e| self.labels[e.u as usize] == self.labels[e.v as usize])
            .count();
        same as f64 / self.edges.0.len().max(1) as f64
    }

    pub fn community(&self, v: usize) -> u32 {
        self.community[v]
    }

    /// Row-major `nodes x features` binary bag-of-words matrix.
    pub fn features(&self) -> Vec<f32> {
        let p = &self.preset;
        let d = p.features;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed_fea7_0000_0001);
        let topic_len = (d / p.classes).max(4);
        let topics: Vec<Vec<usize>> = (0..p.classes)
            .map(|_| (0..topic_len).map(|_| rng.random_range(0..d)).collect())
            .collect();
        let words = Poisson::new(p.words_per_node).unwrap();
        let mut out = vec![0f32; p.nodes * d];
        for v in 0..p.nodes {
            let row = &mut out[v * d..(v + 1) * d];
            let count = (words.sample(&mut rng) as usize).max(1);
            let topic = &topics[self.labels[v] as usize];
            for _ in 0..count {
                let w = if rng.random::<f64>() < p.topic_bias {
                    topic[rng.random_range(0..topic.len())]
                } else {
                    rng.random_range(0..d)
                };
                row[w] = 1.0;
            }
        }
        out
    }
}

/// Writes `node_id <TAB> label <TAB> role` lines for dense ids `0..n`.
pub fn write_labels(path: &Path, labels: &[u32], roles: &[Role]) -> Result<()> {
    if labels.len() != roles.len() {
        return Err(Error::ShapeMismatch(format!("{} labels, {} roles", labels.len(), roles.len())));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (v, (l, r)) in labels.iter().zip(roles).enumerate() {
        writeln!(out, "{v}\t{l}\t{}", r.as_str()).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a label file for `nodes` dense ids. A missing role column means
/// `none`; nodes absent from the file get label 0 and role `none`.
pub fn read_labels(path: &Path, nodes: usize) -> Result<(Vec<u32>, Vec<Role>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut labels = vec![0u32; nodes];
    let mut roles = vec![Role::None; nodes];
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::Parse { path: path.to_path_buf(), line: i as u64 + 1, msg: msg.into() };
        let mut f = line.split_whitespace();
        let v: usize = f.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad("bad node id"))?;
        let l: u32 = f.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad("bad label"))?;
        let r: Role = match f.next() {
            Some(x) => x.parse().map_err(|_| bad("unknown role"))?,
            None => Role::None,
        };
        if v >= nodes {
            return Err(bad("node id out of range"));
        }
        labels[v] = l;
        roles[v] = r;
    }
    Ok((labels, roles))
}

/// Paths written by [`write_dataset`].
#[derive(Debug, Clone)]
pub struct DatasetFiles {
    pub edges: PathBuf,
    pub features: PathBuf,
    pub labels: PathBuf,
}

/// Writes `edges.tsv`, `features.bin` and `labels.tsv` into `dir`.
pub fn write_dataset(dir: &Path, g: &CitationGraph) -> Result<DatasetFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = DatasetFiles {
        edges: dir.join("edges.tsv"),
        features: dir.join("features.bin"),
        labels: dir.join("labels.tsv"),
    };
    write_text_edges(&files.edges, &g.edges)?;
    write_features(&files.features, g.preset.features as u32, &g.features())?;
    write_labels(&files.labels, &g.labels, &g.roles)?;
    Ok(files)
}

/// Large synthetic edge stream regenerated on every replay.
///
/// Nodes are grouped into blocks of `block` consecutive ids; each edge picks a
/// skewed source and, with probability `locality`, a skewed target in the
/// same block, otherwise anywhere.
#[derive(Debug, Clone, Copy)]
pub struct GeneratedStream {
    pub nodes: u64,
    pub edges: u64,
    pub block: u64,
    pub locality: f64,
    pub seed: u64,
}

impl GeneratedStream {
    pub fn new(nodes: u64, edges: u64, seed: u64) -> Self {
        GeneratedStream {
            nodes,
            edges,
            block: 64,
            locality: 0.85,
            seed,
        }
    }
}

impl EdgeSource for GeneratedStream {
    fn replay(&self, visit: &mut dyn FnMut(Edge) -> Result<()>) -> Result<ReplayStats> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut stats = ReplayStats::default();
        let skew = |x: f64, n: u64| ((x * x * x) * n as f64) as u64 % n.max(1);
        for _ in 0..self.edges {
            let u = skew(rng.random(), self.nodes);
            let u = (u.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 7) % self.nodes;
            let v = if rng.random::<f64>() < self.locality {
                let base = u - u % self.block;
                let width = self.block.min(self.nodes - base);
                base + skew(rng.random(), width)
            } else {
                rng.random_range(0..self.nodes)
            };
            let e = Edge::new(u, v);
            stats.edges += 1;
            stats.self_loops += e.is_self_loop() as u64;
            visit(e)?;
        }
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_stream::{compute_degrees, IdMode};

    #[test]
    fn presets_match_requested_sizes() {
        for preset in [CitationPreset::cora(), CitationPreset::citeseer()] {
            let g = generate(&preset, 1);
            assert_eq!(g.edges.0.len(), preset.edges);
            assert_eq!(g.labels.len(), preset.nodes);
            let d = compute_degrees(&g.edges, IdMode::Dense(preset.nodes as u64)).unwrap();
            let isolated = d.degrees().iter().filter(|&&x| x == 0).count();
            assert_eq!(isolated, preset.isolated);
            assert_eq!(d.num_self_loops(), 0);
            let h = g.edge_homophily();
            assert!((0.7..0.92).contains(&h), "homophily {h}");
            let train = g.roles.iter().filter(|&&r| r == Role::Train).count();
            assert_eq!(train, (preset.split[0] * preset.nodes as f64).round() as usize);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(&CitationPreset::cora(), 5);
        let b = generate(&CitationPreset::cora(), 5);
        assert_eq!(a.edges, b.edges);
        assert_eq!(a.labels, b.labels);
        let c = generate(&CitationPreset::cora(), 6);
        assert_ne!(a.edges, c.edges);
    }

    #[test]
    fn features_are_binary_and_nonempty() {
        let mut preset = CitationPreset::cora();
        preset.nodes = 200;
        preset.edges = 300;
        let g = generate(&preset, 3);
        let f = g.features();
        assert_eq!(f.len(), 200 * preset.features);
        for row in f.chunks(preset.features) {
            assert!(row.iter().all(|&x| x == 0.0 || x == 1.0));
            assert!(row.contains(&1.0));
        }
    }

    #[test]
    fn dataset_files_round_trip() {
        let mut preset = CitationPreset::citeseer();
        preset.nodes = 120;
        preset.edges = 200;
        preset.isolated = 5;
        let g = generate(&preset, 2);
        let tmp = tempfile::tempdir().unwrap();
        let files = write_dataset(tmp.path(), &g).unwrap();
        let (labels, roles) = read_labels(&files.labels, 120).unwrap();
        assert_eq!(labels, g.labels);
        assert_eq!(roles, g.roles);
        let f = crate::store::FeatureFile::open(&files.features).unwrap();
        assert_eq!(f.to_vec(), g.features());
        let e = crate::graph_stream::open_edge_stream(&files.edges, crate::graph_stream::EdgeFormat::TextTsv).unwrap();
        assert_eq!(e.edge_count(), None);
        let mut n = 0;
        e.replay(&mut |_| { n += 1; Ok(()) }).unwrap();
        assert_eq!(n, 200);
        assert!(read_labels(&files.labels, 10).is_err());
    }

    #[test]
    fn generated_stream_replays_identically() {
        let s = GeneratedStream::new(1000, 5000, 9);
        let mut a = Vec::new();
        let mut b = Vec::new();
        s.replay(&mut |e| { a.push(e); Ok(()) }).unwrap();
        s.replay(&mut |e| { b.push(e); Ok(()) }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5000);
        assert!(a.iter().all(|e| e.u < 1000 && e.v < 1000));
    }
}

//! On-disk artifacts: feature matrices, partition directories and the
//! partition-count planner.
//!
//! Layout of a partition directory:
//!
//! ```text
//! manifest.json
//! part-<i>/edges.bin      binary edge file of dense ids
//! part-<i>/nodes.tsv      node_id <TAB> owner_flag <TAB> role
//! part-<i>/features.bin   feature rows in node-table order (optional)
//! ```
//!
//! The manifest is written last; a directory without one is incomplete.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use memmap2::Mmap;
use serde::{Deserialize, Serialize};

use crate::completion::{NodeRecord, Partition, PartitionedGraph, Role};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph_stream::{open_edge_stream, write_binary_edges, EdgeFormat, EdgeSource, NodeId};
use crate::metrics::{balance_stats, replication_factor, BalanceStats};

pub const FEATURE_MAGIC: &[u8; 4] = b"FEA1";
pub const FEATURE_HEADER_LEN: u64 = 20;
pub const DTYPE_F32_LE: u32 = 1;
pub const MANIFEST_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureHeader {
    pub rows: u64,
    pub dim: u32,
}

impl FeatureHeader {
    fn encode(&self) -> [u8; FEATURE_HEADER_LEN as usize] {
        let mut b = [0u8; FEATURE_HEADER_LEN as usize];
        b[..4].copy_from_slice(FEATURE_MAGIC);
        b[4..12].copy_from_slice(&self.rows.to_le_bytes());
        b[12..16].copy_from_slice(&self.dim.to_le_bytes());
        b[16..20].copy_from_slice(&DTYPE_F32_LE.to_le_bytes());
        b
    }

    fn row_bytes(&self) -> usize {
        self.dim as usize * 4
    }
}

/// Streaming feature writer; the row count in the header is patched on
/// [`FeatureWriter::finish`].
pub struct FeatureWriter {
    out: BufWriter<File>,
    path: PathBuf,
    dim: u32,
    rows: u64,
}

impl FeatureWriter {
    pub fn create(path: impl AsRef<Path>, dim: u32) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = BufWriter::new(file);
        out.write_all(&FeatureHeader { rows: 0, dim }.encode())
            .map_err(|e| Error::io(&path, e))?;
        Ok(FeatureWriter { out, path, dim, rows: 0 })
    }

    pub fn push_row(&mut self, row: &[f32]) -> Result<()> {
        if row.len() != self.dim as usize {
            return Err(Error::ShapeMismatch(format!("row of {} values, dim {}", row.len(), self.dim)));
        }
        for x in row {
            self.out.write_all(&x.to_le_bytes()).map_err(|e| Error::io(&self.path, e))?;
        }
        self.rows += 1;
        Ok(())
    }

    /// Appends a row already encoded as little-endian f32 bytes.
    pub fn push_raw_row(&mut self, bytes: &[u8]) -> Result<()> {
        if bytes.len() != self.dim as usize * 4 {
            return Err(Error::ShapeMismatch(format!("raw row of {} bytes, dim {}", bytes.len(), self.dim)));
        }
        self.out.write_all(bytes).map_err(|e| Error::io(&self.path, e))?;
        self.rows += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<FeatureHeader> {
        let path = self.path;
        let mut file = self.out.into_inner().map_err(|e| Error::io(&path, e.into_error()))?;
        file.seek(SeekFrom::Start(4)).map_err(|e| Error::io(&path, e))?;
        file.write_all(&self.rows.to_le_bytes()).map_err(|e| Error::io(&path, e))?;
        file.sync_all().map_err(|e| Error::io(&path, e))?;
        Ok(FeatureHeader { rows: self.rows, dim: self.dim })
    }
}

/// Writes a whole row-major matrix.
pub fn write_features(path: impl AsRef<Path>, dim: u32, data: &[f32]) -> Result<FeatureHeader> {
    if dim == 0 || !data.len().is_multiple_of(dim as usize) {
        return Err(Error::ShapeMismatch(format!("{} values do not form rows of {dim}", data.len())));
    }
    let mut w = FeatureWriter::create(path, dim)?;
    for row in data.chunks(dim as usize) {
        w.push_row(row)?;
    }
    w.finish()
}

/// Memory-mapped, read-only feature matrix.
pub struct FeatureFile {
    map: Mmap,
    header: FeatureHeader,
    path: PathBuf,
}

impl std::fmt::Debug for FeatureFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FeatureFile").field("path", &self.path).field("header", &self.header).finish()
    }
}

impl FeatureFile {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        // SAFETY: the map is read-only and artifacts are not modified while open.
        let map = unsafe { Mmap::map(&file) }.map_err(|e| Error::io(&path, e))?;
        let bad = |msg: String| Error::Parse { path: path.clone(), line: 0, msg };
        if map.len() < FEATURE_HEADER_LEN as usize || &map[..4] != FEATURE_MAGIC {
            return Err(bad("missing FEA1 header".into()));
        }
        let rows = u64::from_le_bytes(map[4..12].try_into().unwrap());
        let dim = u32::from_le_bytes(map[12..16].try_into().unwrap());
        let dtype = u32::from_le_bytes(map[16..20].try_into().unwrap());
        if dtype != DTYPE_F32_LE {
            return Err(bad(format!("unsupported dtype tag {dtype}")));
        }
        let header = FeatureHeader { rows, dim };
        let expected = FEATURE_HEADER_LEN + rows * dim as u64 * 4;
        if map.len() as u64 != expected {
            return Err(bad(format!("{} bytes, header implies {expected}", map.len())));
        }
        Ok(FeatureFile { map, header, path })
    }

    pub fn header(&self) -> FeatureHeader {
        self.header
    }

    pub fn rows(&self) -> u64 {
        self.header.rows
    }

    pub fn dim(&self) -> usize {
        self.header.dim as usize
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Raw little-endian bytes of row `i`.
    pub fn row_bytes(&self, i: u64) -> Result<&[u8]> {
        if i >= self.header.rows {
            return Err(Error::UnknownNode(i));
        }
        let w = self.header.row_bytes();
        let start = FEATURE_HEADER_LEN as usize + i as usize * w;
        Ok(&self.map[start..start + w])
    }

    pub fn row(&self, i: u64) -> Result<Vec<f32>> {
        Ok(self
            .row_bytes(i)?
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect())
    }

    /// Loads the whole matrix; meant for small inputs and training.
    pub fn to_vec(&self) -> Vec<f32> {
        self.map[FEATURE_HEADER_LEN as usize..]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect()
    }
}

fn part_dir(dir: &Path, i: usize) -> PathBuf {
    dir.join(format!("part-{i}"))
}

/// Copies, for each partition, the feature rows of its node table (owners
/// and replicas, in table order) into `out_dir/part-<i>/features.bin`.
/// Rows are copied one at a time from the mapped source.
pub fn split_features(features: &FeatureFile, g: &PartitionedGraph, out_dir: &Path, exec: Exec) -> Result<Vec<PathBuf>> {
    if features.rows() != g.num_nodes() as u64 {
        return Err(Error::ShapeMismatch(format!(
            "feature file has {} rows, graph has {} nodes",
            features.rows(),
            g.num_nodes()
        )));
    }
    let results = exec.map_range(g.partitions().len(), |i| -> Result<PathBuf> {
        let dir = part_dir(out_dir, i);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join("features.bin");
        let mut w = FeatureWriter::create(&path, features.header().dim)?;
        for r in &g.partition(i).nodes {
            w.push_raw_row(features.row_bytes(r.id.0 as u64)?)?;
        }
        w.finish()?;
        Ok(path)
    });
    results.into_iter().collect()
}

/// Outcome of [`plan_partition_count`], all sizes in GB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub partitions: usize,
    pub reserved: f64,
    /// Usable memory per worker, `M - T`.
    pub usable: f64,
    /// `q * (M - T)`.
    pub capacity: f64,
}

/// Chooses the partition count for `workers` machines with `memory` GB each,
/// `reserved` GB held back (two thirds of `memory` when `None`), for a graph
/// of `data_size` GB. The result is `workers` when the graph fits, otherwise
/// the smallest multiple of `workers` whose per-partition share fits.
pub fn plan_partition_count(workers: usize, memory: f64, reserved: Option<f64>, data_size: f64) -> Result<Plan> {
    if workers == 0 {
        return Err(Error::InvalidParameter("worker count must be at least 1".into()));
    }
    let reserved = reserved.unwrap_or(memory * 2.0 / 3.0);
    if !(memory.is_finite() && reserved.is_finite() && data_size.is_finite()) || reserved < 0.0 || data_size < 0.0 {
        return Err(Error::InvalidParameter("sizes must be finite and non-negative".into()));
    }
    if memory <= reserved {
        return Err(Error::InvalidParameter(format!(
            "no usable memory: M = {memory} GB, T = {reserved} GB"
        )));
    }
    let usable = memory - reserved;
    let capacity = workers as f64 * usable;
    let mut k = (data_size / capacity).ceil().max(1.0) as usize;
    // guard against rounding in the division
    while data_size / (k * workers) as f64 > usable {
        k += 1;
    }
    while k > 1 && data_size / ((k - 1) * workers) as f64 <= usable {
        k -= 1;
    }
    Ok(Plan {
        partitions: k * workers,
        reserved,
        usable,
        capacity,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartManifest {
    pub edges_file: String,
    pub nodes_file: String,
    pub features_file: Option<String>,
    pub nodes: u64,
    pub owned: u64,
    pub edges: u64,
}

/// Self-description of a partition directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub partitions: usize,
    pub nodes: u64,
    /// Edges in the source stream.
    pub edges: u64,
    pub feature_dim: Option<u32>,
    pub algorithm: String,
    pub seed: u64,
    /// Free-form run configuration, recorded verbatim.
    pub parameters: serde_json::Value,
    pub replication_factor: f64,
    pub balance: BalanceStats,
    pub parts: Vec<PartManifest>,
}

/// Run metadata stored alongside the partitions.
#[derive(Debug, Clone, PartialEq)]
pub struct RunInfo {
    pub algorithm: String,
    pub seed: u64,
    pub source_edges: u64,
    pub parameters: serde_json::Value,
}

fn write_nodes(path: &Path, nodes: &[NodeRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in nodes {
        writeln!(out, "{}\t{}\t{}", r.id.0, r.owner as u8, r.role.as_str()).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

fn read_nodes(path: &Path) -> Result<Vec<NodeRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut nodes = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let bad = |msg: &str| Error::Parse { path: path.to_path_buf(), line: i as u64 + 1, msg: msg.into() };
        let mut f = line.split('\t');
        let (Some(id), Some(owner), Some(role), None) = (f.next(), f.next(), f.next(), f.next()) else {
            return Err(bad("expected node_id, owner_flag, role"));
        };
        let id: u32 = id.parse().map_err(|_| bad("bad node id"))?;
        let owner = match owner {
            "0" => false,
            "1" => true,
            _ => return Err(bad("owner flag must be 0 or 1")),
        };
        let role: Role = role.parse().map_err(|_| bad("unknown role"))?;
        nodes.push(NodeRecord { id: NodeId(id), owner, role });
    }
    Ok(nodes)
}

/// Writes every partition, then the manifest. When `features` is given the
/// rows are split alongside.
pub fn write_partitions(
    dir: &Path,
    g: &PartitionedGraph,
    features: Option<&FeatureFile>,
    info: &RunInfo,
    exec: Exec,
) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest_path = dir.join("manifest.json");
    if manifest_path.exists() {
        fs::remove_file(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    }
    let parts = exec.map_range(g.partitions().len(), |i| -> Result<PartManifest> {
        let part = g.partition(i);
        let pdir = part_dir(dir, i);
        fs::create_dir_all(&pdir).map_err(|e| Error::io(&pdir, e))?;
        let edges = write_binary_edges(
            pdir.join("edges.bin"),
            part.edges.iter().map(|&(u, v)| (u.0 as u64, v.0 as u64)),
        )?;
        write_nodes(&pdir.join("nodes.tsv"), &part.nodes)?;
        Ok(PartManifest {
            edges_file: format!("part-{i}/edges.bin"),
            nodes_file: format!("part-{i}/nodes.tsv"),
            features_file: features.map(|_| format!("part-{i}/features.bin")),
            nodes: part.nodes.len() as u64,
            owned: part.num_owned() as u64,
            edges,
        })
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(f) = features {
        split_features(f, g, dir, exec)?;
    }
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA,
        partitions: g.partitions().len(),
        nodes: g.num_nodes() as u64,
        edges: info.source_edges,
        feature_dim: features.map(|f| f.header().dim),
        algorithm: info.algorithm.clone(),
        seed: info.seed,
        parameters: info.parameters.clone(),
        replication_factor: replication_factor(g)?.value(),
        balance: balance_stats(g),
        parts,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(&manifest_path, json + "\n").map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest)
}

/// Splits `features` into an existing partition directory and records the
/// feature files in its manifest.
pub fn attach_features(dir: &Path, features: &FeatureFile, exec: Exec) -> Result<Manifest> {
    let (g, mut m) = read_partitions(dir)?;
    split_features(features, &g, dir, exec)?;
    m.feature_dim = Some(features.header().dim);
    for (i, part) in m.parts.iter_mut().enumerate() {
        part.features_file = Some(format!("part-{i}/features.bin"));
    }
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&m)? + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(m)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join("manifest.json");
    if !path.exists() {
        return Err(Error::CorruptArtifact(format!("{}: no manifest (incomplete artifact)", dir.display())));
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let m: Manifest = serde_json::from_str(&text)?;
    if m.schema != MANIFEST_SCHEMA {
        return Err(Error::CorruptArtifact(format!("unknown manifest schema {}", m.schema)));
    }
    if m.parts.len() != m.partitions {
        return Err(Error::CorruptArtifact(format!("{} part entries for {} partitions", m.parts.len(), m.partitions)));
    }
    Ok(m)
}

/// Reads a partition directory back, checking every count in the manifest.
pub fn read_partitions(dir: &Path) -> Result<(PartitionedGraph, Manifest)> {
    let m = read_manifest(dir)?;
    let mut parts = Vec::with_capacity(m.partitions);
    for (i, pm) in m.parts.iter().enumerate() {
        let nodes = read_nodes(&dir.join(&pm.nodes_file))?;
        let mut edges = Vec::with_capacity(pm.edges as usize);
        let src = open_edge_stream(dir.join(&pm.edges_file), EdgeFormat::BinaryU64Pairs)?;
        src.replay(&mut |e| {
            match (u32::try_from(e.u), u32::try_from(e.v)) {
                (Ok(u), Ok(v)) => edges.push((NodeId(u), NodeId(v))),
                _ => return Err(Error::CorruptArtifact(format!("part {i}: edge id beyond u32"))),
            }
            Ok(())
        })?;
        let owned = nodes.iter().filter(|r| r.owner).count() as u64;
        if nodes.len() as u64 != pm.nodes || owned != pm.owned || edges.len() as u64 != pm.edges {
            return Err(Error::CorruptArtifact(format!(
                "part {i}: manifest says {}/{}/{} nodes/owned/edges, files hold {}/{}/{}",
                pm.nodes,
                pm.owned,
                pm.edges,
                nodes.len(),
                owned,
                edges.len()
            )));
        }
        if nodes.windows(2).any(|w| w[0].id >= w[1].id) {
            return Err(Error::CorruptArtifact(format!("part {i}: node table not strictly sorted")));
        }
        for &(u, v) in &edges {
            for x in [u, v] {
                if nodes.binary_search_by_key(&x, |r| r.id).is_err() {
                    return Err(Error::CorruptArtifact(format!("part {i}: edge endpoint {} not in node table", x.0)));
                }
            }
        }
        if let (Some(f), Some(dim)) = (&pm.features_file, m.feature_dim) {
            let ff = FeatureFile::open(dir.join(f))?;
            if ff.rows() != pm.nodes || ff.header().dim != dim {
                return Err(Error::CorruptArtifact(format!("part {i}: feature file shape mismatch")));
            }
        }
        parts.push(Partition { nodes, edges });
    }
    let g = PartitionedGraph::new(m.nodes as usize, parts)?;
    Ok((g, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{complete_edges, Homes};
    use crate::graph_stream::{compute_degrees, IdMode, MemoryEdges};
    use proptest::prelude::*;

    fn small_graph() -> PartitionedGraph {
        let g = MemoryEdges::from_pairs(&[(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)]);
        let d = compute_degrees(&g, IdMode::Dense(5)).unwrap();
        let homes = Homes::new(vec![0, 0, 1, 1, 2], 3).unwrap();
        let mut pg = complete_edges(&g, &d, &homes, 1).unwrap();
        pg.apply_roles(&[Role::Train, Role::Val, Role::Test, Role::None, Role::Train]).unwrap();
        pg
    }

    fn info() -> RunInfo {
        RunInfo {
            algorithm: "spring".into(),
            seed: 3,
            source_edges: 5,
            parameters: serde_json::json!({"p": 3}),
        }
    }

    #[test]
    fn plan_examples() {
        assert_eq!(plan_partition_count(4, 48.0, Some(32.0), 50.0).unwrap().partitions, 4);
        assert_eq!(plan_partition_count(4, 48.0, Some(32.0), 100.0).unwrap().partitions, 8);
        let p = plan_partition_count(2, 10.0, None, 1.0).unwrap();
        assert!((p.reserved - 20.0 / 3.0).abs() < 1e-12);
        assert!((p.capacity - 20.0 / 3.0).abs() < 1e-12);
        assert!(plan_partition_count(2, 10.0, Some(10.0), 1.0).is_err());
        assert!(plan_partition_count(0, 10.0, Some(1.0), 1.0).is_err());
    }

    #[test]
    fn feature_rows_split_byte_exact() {
        let tmp = tempfile::tempdir().unwrap();
        let src = tmp.path().join("f.bin");
        let data: Vec<f32> = (0..8).map(|x| x as f32 * 1.5 - 2.0).collect();
        write_features(&src, 2, &data).unwrap();
        let ff = FeatureFile::open(&src).unwrap();
        assert_eq!(ff.header(), FeatureHeader { rows: 4, dim: 2 });
        let whole = fs::read(&src).unwrap();

        let parts = vec![
            Partition {
                nodes: vec![
                    NodeRecord { id: NodeId(0), owner: true, role: Role::None },
                    NodeRecord { id: NodeId(2), owner: true, role: Role::None },
                ],
                edges: vec![],
            },
            Partition {
                nodes: vec![
                    NodeRecord { id: NodeId(1), owner: true, role: Role::None },
                    NodeRecord { id: NodeId(3), owner: true, role: Role::None },
                ],
                edges: vec![],
            },
            Partition::default(),
        ];
        let g = PartitionedGraph::new(4, parts).unwrap();
        let out = tmp.path().join("out");
        let paths = split_features(&ff, &g, &out, Exec::default()).unwrap();
        let p0 = fs::read(&paths[0]).unwrap();
        let row = |i: usize| &whole[20 + i * 8..20 + (i + 1) * 8];
        assert_eq!(p0.len(), 20 + 16);
        assert_eq!(&p0[20..28], row(0));
        assert_eq!(&p0[28..36], row(2));
        let empty = FeatureFile::open(&paths[2]).unwrap();
        assert_eq!(empty.rows(), 0);
        assert_eq!(fs::metadata(&paths[2]).unwrap().len(), 20);
    }

    #[test]
    fn full_partition_copies_the_payload() {
        let tmp = tempfile::tempdir().unwrap();
        let src = tmp.path().join("f.bin");
        write_features(&src, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let ff = FeatureFile::open(&src).unwrap();
        let g = PartitionedGraph::new(
            2,
            vec![Partition {
                nodes: (0..2).map(|i| NodeRecord { id: NodeId(i), owner: true, role: Role::None }).collect(),
                edges: vec![],
            }],
        )
        .unwrap();
        let paths = split_features(&ff, &g, tmp.path(), Exec::Sequential).unwrap();
        assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&src).unwrap());
    }

    #[test]
    fn header_mismatch_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let src = tmp.path().join("f.bin");
        write_features(&src, 2, &[0.0; 6]).unwrap();
        let ff = FeatureFile::open(&src).unwrap();
        let g = small_graph();
        assert!(split_features(&ff, &g, tmp.path(), Exec::Sequential).is_err());
        let mut bytes = fs::read(&src).unwrap();
        bytes.pop();
        fs::write(&src, bytes).unwrap();
        assert!(FeatureFile::open(&src).is_err());
    }

    #[test]
    fn write_read_round_trip_and_corruption() {
        let tmp = tempfile::tempdir().unwrap();
        let g = small_graph();
        let feats = tmp.path().join("f.bin");
        write_features(&feats, 1, &[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let ff = FeatureFile::open(&feats).unwrap();
        let dir = tmp.path().join("parts");
        let m = write_partitions(&dir, &g, Some(&ff), &info(), Exec::default()).unwrap();
        let (back, m2) = read_partitions(&dir).unwrap();
        assert_eq!(back, g);
        assert_eq!(m, m2);
        let f1 = FeatureFile::open(dir.join("part-1/features.bin")).unwrap();
        let ids: Vec<f32> = g.partition(1).nodes.iter().map(|r| r.id.0 as f32).collect();
        assert_eq!(f1.to_vec(), ids);

        let bare = tmp.path().join("bare");
        write_partitions(&bare, &g, None, &info(), Exec::default()).unwrap();
        let attached = attach_features(&bare, &ff, Exec::default()).unwrap();
        assert_eq!(attached.feature_dim, Some(1));
        assert_eq!(fs::read(bare.join("part-2/features.bin")).unwrap(), fs::read(dir.join("part-2/features.bin")).unwrap());

        // byte-identical manifests for identical runs
        let dir2 = tmp.path().join("parts2");
        write_partitions(&dir2, &g, Some(&ff), &info(), Exec::Sequential).unwrap();
        assert_eq!(
            fs::read(dir.join("manifest.json")).unwrap(),
            fs::read(dir2.join("manifest.json")).unwrap()
        );

        let mut bad = m.clone();
        bad.parts[0].edges += 1;
        fs::write(dir.join("manifest.json"), serde_json::to_string(&bad).unwrap()).unwrap();
        assert!(matches!(read_partitions(&dir), Err(Error::CorruptArtifact(_))));

        fs::remove_file(dir.join("manifest.json")).unwrap();
        assert!(matches!(read_partitions(&dir), Err(Error::CorruptArtifact(_))));
    }

    proptest! {
        #[test]
        fn plan_always_fits(q in 1usize..16, m in 1.0f64..256.0, frac in 0.0f64..0.99, data in 0.0f64..10_000.0) {
            let t = m * frac;
            let plan = plan_partition_count(q, m, Some(t), data).unwrap();
            prop_assert_eq!(plan.partitions % q, 0);
            prop_assert!(data / plan.partitions as f64 <= m - t);
            if plan.partitions > q {
                prop_assert!(data / (plan.partitions - q) as f64 > m - t);
            }
        }

        #[test]
        fn random_graphs_round_trip(
            pairs in prop::collection::vec((0u64..30, 0u64..30), 0..80),
            homes in prop::collection::vec(0u32..4, 30),
        ) {
            let g = MemoryEdges::from_pairs(&pairs);
            let d = compute_degrees(&g, IdMode::Dense(30)).unwrap();
            let pg = complete_edges(&g, &d, &Homes::new(homes, 4).unwrap(), 1).unwrap();
            let tmp = tempfile::tempdir().unwrap();
            write_partitions(tmp.path(), &pg, None, &info(), Exec::default()).unwrap();
            let (back, _) = read_partitions(tmp.path()).unwrap();
            prop_assert_eq!(back, pg);
        }
    }
}

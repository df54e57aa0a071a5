//! Edge-list ingestion.
//!
//! Edges are never materialised: every consumer replays the source through a
//! visitor. The only per-graph state kept here is the id dictionary and the
//! degree array built by [`compute_degrees`].

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magic prefix of the binary edge format.
pub const EDGE_MAGIC: &[u8; 4] = b"EDG1";

/// Dense node index in `0..|V|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Undirected edge between two external node ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: u64,
    pub v: u64,
}

impl Edge {
    pub fn new(u: u64, v: u64) -> Self {
        Edge { u, v }
    }

    pub fn is_self_loop(&self) -> bool {
        self.u == self.v
    }

    /// Endpoints ordered so that `(u, v)` and `(v, u)` compare equal.
    pub fn canonical(&self) -> (u64, u64) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayStats {
    pub edges: u64,
    pub self_loops: u64,
    /// Lines skipped in lenient text mode.
    pub malformed: u64,
}

/// A replayable, deterministic sequence of edges.
pub trait EdgeSource: Sync {
    /// Feeds every edge, in order, to `visit`. Stops at the first error.
    fn replay(&self, visit: &mut dyn FnMut(Edge) -> Result<()>) -> Result<ReplayStats>;
}

impl<S: EdgeSource + ?Sized> EdgeSource for &S {
    fn replay(&self, visit: &mut dyn FnMut(Edge) -> Result<()>) -> Result<ReplayStats> {
        (**self).replay(visit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeFormat {
    /// `u<TAB>v` per line, `#` comments.
    TextTsv,
    /// Optional `EDG1` magic followed by little-endian u64 pairs.
    BinaryU64Pairs,
}

impl EdgeFormat {
    /// Guesses from the file extension: `.bin` is binary, anything else text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") => EdgeFormat::BinaryU64Pairs,
            _ => EdgeFormat::TextTsv,
        }
    }
}

/// Edge list on disk.
#[derive(Debug)]
pub struct EdgeFile {
    path: PathBuf,
    format: EdgeFormat,
    strict: bool,
    payload_offset: u64,
    edge_count: OnceLock<u64>,
}

/// Opens an edge file without reading its body.
///
/// Binary files are accepted with the `EDG1` header (length ≡ 4 mod 16) or as
/// bare pairs (length ≡ 0 mod 16); any other length is rejected up front.
pub fn open_edge_stream(path: impl AsRef<Path>, format: EdgeFormat) -> Result<EdgeFile> {
    let path = path.as_ref().to_path_buf();
    let meta = std::fs::metadata(&path).map_err(|e| Error::io(&path, e))?;
    let file = EdgeFile {
        path,
        format,
        strict: true,
        payload_offset: 0,
        edge_count: OnceLock::new(),
    };
    match format {
        EdgeFormat::TextTsv => Ok(file),
        EdgeFormat::BinaryU64Pairs => {
            let len = meta.len();
            let offset = match len % 16 {
                0 => 0,
                4 => {
                    let mut magic = [0u8; 4];
                    File::open(&file.path)
                        .and_then(|mut f| f.read_exact(&mut magic))
                        .map_err(|e| Error::io(&file.path, e))?;
                    if &magic != EDGE_MAGIC {
                        return Err(Error::OddByteCount {
                            path: file.path,
                            len,
                        });
                    }
                    4
                }
                _ => {
                    return Err(Error::OddByteCount {
                        path: file.path,
                        len,
                    })
                }
            };
            let count = (len - offset) / 16;
            let file = EdgeFile {
                payload_offset: offset,
                ..file
            };
            let _ = file.edge_count.set(count);
            Ok(file)
        }
    }
}

impl EdgeFile {
    /// Skip (and count) malformed text lines instead of failing.
    pub fn lenient(mut self) -> Self {
        self.strict = false;
        self
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn format(&self) -> EdgeFormat {
        self.format
    }

    /// Number of edges, known once the stream has been replayed in full
    /// (immediately for binary files).
    pub fn edge_count(&self) -> Option<u64> {
        self.edge_count.get().copied()
    }

    fn replay_text(&self, visit: &mut dyn FnMut(Edge) -> Result<()>) -> Result<ReplayStats> {
        let f = File::open(&self.path).map_err(|e| Error::io(&self.path, e))?;
        let mut reader = BufReader::with_capacity(1 << 16, f);
        let mut stats = ReplayStats::default();
        let mut line = String::new();
        let mut lineno = 0u64;
        loop {
            line.clear();
            let n = reader
                .read_line(&mut line)
                .map_err(|e| Error::io(&self.path, e))?;
            if n == 0 {
                break;
            }
            lineno += 1;
            let text = line.trim_end_matches(['\n', '\r']);
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            match parse_tsv_line(text) {
                Ok(edge) => {
                    stats.edges += 1;
                    stats.self_loops += edge.is_self_loop() as u64;
                    visit(edge)?;
                }
                Err(msg) if self.strict => {
                    return Err(Error::Parse {
                        path: self.path.clone(),
                        line: lineno,
                        msg,
                    })
                }
                Err(_) => stats.malformed += 1,
            }
        }
        Ok(stats)
    }

    fn replay_binary(&self, visit: &mut dyn FnMut(Edge) -> Result<()>) -> Result<ReplayStats> {
        let mut f = File::open(&self.path).map_err(|e| Error::io(&self.path, e))?;
        if self.payload_offset > 0 {
            let mut skip = [0u8; 4];
            f.read_exact(&mut skip)
                .map_err(|e| Error::io(&self.path, e))?;
        }
        let mut reader = BufReader::with_capacity(1 << 16, f);
        let mut stats = ReplayStats::default();
        let mut buf = [0u8; 16];
        loop {
            match reader.read_exact(&mut buf) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
                Err(e) => return Err(Error::io(&self.path, e)),
            }
            let u = u64::from_le_bytes(buf[..8].try_into().unwrap());
            let v = u64::from_le_bytes(buf[8..].try_into().unwrap());
            let edge = Edge::new(u, v);
            stats.edges += 1;
            stats.self_loops += edge.is_self_loop() as u64;
            visit(edge)?;
        }
        Ok(stats)
    }
}

fn parse_tsv_line(text: &str) -> std::result::Result<Edge, String> {
    let mut fields = text.split('\t');
    let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(format!("expected two tab-separated fields, got {text:?}"));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| format!("{s:?} is not an unsigned integer"))
    };
    Ok(Edge::new(parse(a)?, parse(b)?))
}

impl EdgeSource for EdgeFile {
    fn replay(&self, visit: &mut dyn FnMut(Edge) -> Result<()>) -> Result<ReplayStats> {
        let stats = match self.format {
            EdgeFormat::TextTsv => self.replay_text(visit)?,
            EdgeFormat::BinaryU64Pairs => self.replay_binary(visit)?,
        };
        let _ = self.edge_count.set(stats.edges);
        Ok(stats)
    }
}

/// Small in-memory edge list, for tests and generated data.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MemoryEdges(pub Vec<Edge>);

impl MemoryEdges {
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Self {
        MemoryEdges(pairs.iter().map(|&(u, v)| Edge::new(u, v)).collect())
    }
}

impl EdgeSource for MemoryEdges {
    fn replay(&self, visit: &mut dyn FnMut(Edge) -> Result<()>) -> Result<ReplayStats> {
        let mut stats = ReplayStats::default();
        for &e in &self.0 {
            stats.edges += 1;
            stats.self_loops += e.is_self_loop() as u64;
            visit(e)?;
        }
        Ok(stats)
    }
}

/// Emits every edge followed by its reverse; turns a directed edge list into
/// an undirected one the way graph libraries do.
#[derive(Debug)]
pub struct WithReverse<S>(pub S);

impl<S: EdgeSource> EdgeSource for WithReverse<S> {
    fn replay(&self, visit: &mut dyn FnMut(Edge) -> Result<()>) -> Result<ReplayStats> {
        let mut stats = self.0.replay(&mut |e| {
            visit(e)?;
            visit(Edge::new(e.v, e.u))
        })?;
        stats.edges *= 2;
        stats.self_loops *= 2;
        Ok(stats)
    }
}

pub fn write_text_edges(path: impl AsRef<Path>, src: &dyn EdgeSource) -> Result<u64> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    let stats = src.replay(&mut |e| {
        writeln!(w, "{}\t{}", e.u, e.v).map_err(|err| Error::io(path, err))
    })?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(stats.edges)
}

/// Writes `EDG1` followed by u64-LE pairs.
pub fn write_binary_edges<I>(path: impl AsRef<Path>, edges: I) -> Result<u64>
where
    I: IntoIterator<Item = (u64, u64)>,
{
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    w.write_all(EDGE_MAGIC).map_err(|e| Error::io(path, e))?;
    let mut n = 0;
    for (u, v) in edges {
        w.write_all(&u.to_le_bytes())
            .and_then(|_| w.write_all(&v.to_le_bytes()))
            .map_err(|e| Error::io(path, e))?;
        n += 1;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(n)
}

/// How external ids become dense indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "nodes")]
pub enum IdMode {
    /// Dense index in order of first appearance in the stream.
    FirstSeen,
    /// Ids are already dense in `0..n`; nodes without edges are isolated.
    Dense(u64),
}

#[derive(Debug, Clone)]
enum IdMap {
    Identity,
    Dictionary {
        to_dense: HashMap<u64, u32>,
        to_external: Vec<u64>,
    },
}

/// Exact node degrees plus the id dictionary, built in one pass.
#[derive(Debug, Clone)]
pub struct DegreeTable {
    degrees: Vec<u32>,
    ids: IdMap,
    edges: u64,
    self_loops: u64,
}

/// First pass over the stream: assigns dense ids and counts degrees.
/// A self-loop adds 2 to its node's degree.
pub fn compute_degrees(src: &dyn EdgeSource, mode: IdMode) -> Result<DegreeTable> {
    match mode {
        IdMode::Dense(n) => {
            if n > u32::MAX as u64 {
                return Err(Error::InvalidParameter(format!(
                    "{n} nodes exceeds the 32-bit dense index space"
                )));
            }
            let mut degrees = vec![0u32; n as usize];
            let stats = src.replay(&mut |e| {
                for id in [e.u, e.v] {
                    if id >= n {
                        return Err(Error::UnknownNode(id));
                    }
                    degrees[id as usize] += 1;
                }
                Ok(())
            })?;
            Ok(DegreeTable {
                degrees,
                ids: IdMap::Identity,
                edges: stats.edges,
                self_loops: stats.self_loops,
            })
        }
        IdMode::FirstSeen => {
            let mut to_dense: HashMap<u64, u32> = HashMap::new();
            let mut to_external = Vec::new();
            let mut degrees: Vec<u32> = Vec::new();
            let stats = src.replay(&mut |e| {
                for id in [e.u, e.v] {
                    let next = to_external.len();
                    let idx = *to_dense.entry(id).or_insert_with(|| {
                        to_external.push(id);
                        degrees.push(0);
                        next as u32
                    });
                    degrees[idx as usize] += 1;
                }
                Ok(())
            })?;
            if to_external.len() > u32::MAX as usize {
                return Err(Error::InvalidParameter(
                    "node count exceeds the 32-bit dense index space".into(),
                ));
            }
            Ok(DegreeTable {
                degrees,
                ids: IdMap::Dictionary {
                    to_dense,
                    to_external,
                },
                edges: stats.edges,
                self_loops: stats.self_loops,
            })
        }
    }
}

impl DegreeTable {
    /// Builds a table directly from dense degrees (identity id map).
    pub fn from_dense_degrees(degrees: Vec<u32>, edges: u64, self_loops: u64) -> Self {
        DegreeTable {
            degrees,
            ids: IdMap::Identity,
            edges,
            self_loops,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.degrees.len()
    }

    /// Number of edges in the stream, duplicates and self-loops included.
    pub fn num_edges(&self) -> u64 {
        self.edges
    }

    pub fn num_self_loops(&self) -> u64 {
        self.self_loops
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> u32 {
        self.degrees[v.index()]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn id_mode(&self) -> IdMode {
        match self.ids {
            IdMap::Identity => IdMode::Dense(self.degrees.len() as u64),
            IdMap::Dictionary { .. } => IdMode::FirstSeen,
        }
    }

    #[inline]
    pub fn dense(&self, external: u64) -> Result<NodeId> {
        match &self.ids {
            IdMap::Identity if external < self.degrees.len() as u64 => Ok(NodeId(external as u32)),
            IdMap::Identity => Err(Error::UnknownNode(external)),
            IdMap::Dictionary { to_dense, .. } => to_dense
                .get(&external)
                .map(|&i| NodeId(i))
                .ok_or(Error::UnknownNode(external)),
        }
    }

    pub fn external(&self, v: NodeId) -> u64 {
        match &self.ids {
            IdMap::Identity => v.0 as u64,
            IdMap::Dictionary { to_external, .. } => to_external[v.index()],
        }
    }

    /// Replays `src` translating both endpoints to dense ids.
    pub fn replay_dense(
        &self,
        src: &dyn EdgeSource,
        visit: &mut dyn FnMut(NodeId, NodeId) -> Result<()>,
    ) -> Result<ReplayStats> {
        src.replay(&mut |e| visit(self.dense(e.u)?, self.dense(e.v)?))
    }

    /// Heap bytes held by the table.
    pub fn heap_bytes(&self) -> usize {
        let ids = match &self.ids {
            IdMap::Identity => 0,
            IdMap::Dictionary {
                to_dense,
                to_external,
            } => to_dense.capacity() * (8 + 4 + 1) + to_external.capacity() * 8,
        };
        self.degrees.capacity() * 4 + ids
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(src: &dyn EdgeSource) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        src.replay(&mut |e| {
            out.push((e.u, e.v));
            Ok(())
        })
        .unwrap();
        out
    }

    #[test]
    fn text_file_decodes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        std::fs::write(&path, "0\t1\n1\t2\n").unwrap();
        let s = open_edge_stream(&path, EdgeFormat::TextTsv).unwrap();
        assert_eq!(s.edge_count(), None);
        assert_eq!(collect(&s), vec![(0, 1), (1, 2)]);
        assert_eq!(s.edge_count(), Some(2));
    }

    #[test]
    fn comments_and_crlf_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        std::fs::write(&path, "# header\n5\t6\r\n\n7\t7\n").unwrap();
        let s = open_edge_stream(&path, EdgeFormat::TextTsv).unwrap();
        let mut n = 0;
        let stats = s.replay(&mut |_| { n += 1; Ok(()) }).unwrap();
        assert_eq!(n, 2);
        assert_eq!(stats.self_loops, 1);
    }

    #[test]
    fn empty_file_is_empty_stream() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        std::fs::write(&path, "").unwrap();
        let s = open_edge_stream(&path, EdgeFormat::TextTsv).unwrap();
        assert!(collect(&s).is_empty());
        let bin = dir.path().join("g.bin");
        std::fs::write(&bin, "").unwrap();
        let s = open_edge_stream(&bin, EdgeFormat::BinaryU64Pairs).unwrap();
        assert!(collect(&s).is_empty());
    }

    #[test]
    fn bad_token_is_an_error_unless_lenient() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        std::fs::write(&path, "0\t1\nx\t2\n3\t-4\n5 6\n").unwrap();
        let s = open_edge_stream(&path, EdgeFormat::TextTsv).unwrap();
        let err = s.replay(&mut |_| Ok(())).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let s = open_edge_stream(&path, EdgeFormat::TextTsv).unwrap().lenient();
        let stats = s.replay(&mut |_| Ok(())).unwrap();
        assert_eq!((stats.edges, stats.malformed), (1, 3));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = open_edge_stream("/nonexistent/edges.tsv", EdgeFormat::TextTsv).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn bare_sixteen_byte_binary_pair() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.bin");
        // reference writer: two u64 little-endian words, no header
        let mut f = File::create(&path).unwrap();
        f.write_all(&7u64.to_le_bytes()).unwrap();
        f.write_all(&9u64.to_le_bytes()).unwrap();
        drop(f);
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 16);
        let s = open_edge_stream(&path, EdgeFormat::BinaryU64Pairs).unwrap();
        assert_eq!(s.edge_count(), Some(1));
        assert_eq!(collect(&s), vec![(7, 9)]);
    }

    #[test]
    fn headered_binary_and_odd_lengths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.bin");
        write_binary_edges(&path, [(1, 2), (3, u64::MAX)]).unwrap();
        let s = open_edge_stream(&path, EdgeFormat::BinaryU64Pairs).unwrap();
        assert_eq!(collect(&s), vec![(1, 2), (3, u64::MAX)]);

        let odd = dir.path().join("odd.bin");
        std::fs::write(&odd, [0u8; 17]).unwrap();
        assert!(matches!(
            open_edge_stream(&odd, EdgeFormat::BinaryU64Pairs),
            Err(Error::OddByteCount { len: 17, .. })
        ));
        let fake = dir.path().join("fake.bin");
        std::fs::write(&fake, [1u8; 20]).unwrap();
        assert!(open_edge_stream(&fake, EdgeFormat::BinaryU64Pairs).is_err());
    }

    #[test]
    fn degrees_of_small_graphs() {
        let tri = MemoryEdges::from_pairs(&[(0, 1), (1, 2), (2, 0)]);
        let d = compute_degrees(&tri, IdMode::FirstSeen).unwrap();
        assert_eq!(d.degrees(), &[2, 2, 2]);

        let one = MemoryEdges::from_pairs(&[(0, 1)]);
        let d = compute_degrees(&one, IdMode::FirstSeen).unwrap();
        assert_eq!(d.degrees(), &[1, 1]);

        let looped = MemoryEdges::from_pairs(&[(4, 4), (4, 9)]);
        let d = compute_degrees(&looped, IdMode::FirstSeen).unwrap();
        assert_eq!(d.degree(d.dense(4).unwrap()), 3);
        assert_eq!(d.external(NodeId(1)), 9);
        assert_eq!(d.num_self_loops(), 1);
    }

    #[test]
    fn dense_mode_keeps_isolated_nodes_and_rejects_out_of_range() {
        let g = MemoryEdges::from_pairs(&[(0, 2)]);
        let d = compute_degrees(&g, IdMode::Dense(4)).unwrap();
        assert_eq!(d.degrees(), &[1, 0, 1, 0]);
        let bad = MemoryEdges::from_pairs(&[(0, 4)]);
        assert!(matches!(
            compute_degrees(&bad, IdMode::Dense(4)),
            Err(Error::UnknownNode(4))
        ));
    }

    #[test]
    fn reverse_adapter_doubles_the_stream() {
        let g = WithReverse(MemoryEdges::from_pairs(&[(0, 1), (2, 3)]));
        assert_eq!(collect(&g), vec![(0, 1), (1, 0), (2, 3), (3, 2)]);
    }

    #[test]
    fn text_writer_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        let g = MemoryEdges::from_pairs(&[(10, 11), (11, 12), (3, 3)]);
        write_text_edges(&path, &g).unwrap();
        let s = open_edge_stream(&path, EdgeFormat::TextTsv).unwrap();
        assert_eq!(collect(&s), vec![(10, 11), (11, 12), (3, 3)]);
    }
}

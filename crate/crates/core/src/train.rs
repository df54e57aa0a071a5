//! Simulated data-parallel training on partitioned graphs.
//!
//! The model is SGC-style: features are propagated `k` times with
//! self-inclusive mean aggregation, then a softmax regression is fitted with
//! Adam. Each partition hosts one local model; every `sync_interval` epochs
//! all local weights are replaced by their average, weighted by training
//! node counts. Optimizer moments stay with their local model.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::completion::{Partition, Role};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph_stream::NodeId;

/// Rows per partial gradient; fixed so both execution modes sum identically.
const GRAD_CHUNK: usize = 64;

/// Symmetric adjacency in compressed sparse row form with sorted, distinct
/// neighbor lists and no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u != v {
                pairs.push((u, v));
                pairs.push((v, u));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Csr {
            offsets,
            targets: pairs.into_iter().map(|(_, v)| v).collect(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// `k` rounds of `h_v <- (h_v + sum of neighbor rows) / (deg(v) + 1)`.
pub fn sgc_propagate(adj: &Csr, features: &[f32], dim: usize, k: usize, exec: Exec) -> Vec<f32> {
    assert_eq!(features.len(), adj.num_nodes() * dim, "feature matrix shape");
    let mut cur = features.to_vec();
    let mut next = vec![0f32; cur.len()];
    for _ in 0..k {
        let src = &cur;
        exec.for_each_chunk_mut(&mut next, dim.max(1), |v, row| {
            let mut acc: Vec<f64> = src[v * dim..(v + 1) * dim].iter().map(|&x| x as f64).collect();
            for &u in adj.neighbors(v) {
                let u = u as usize;
                for (a, &x) in acc.iter_mut().zip(&src[u * dim..(u + 1) * dim]) {
                    *a += x as f64;
                }
            }
            let scale = (adj.degree(v) + 1) as f64;
            for (o, a) in row.iter_mut().zip(acc) {
                *o = (a / scale) as f32;
            }
        });
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// Scales every row to unit L1 norm; zero rows are left as they are.
pub fn normalize_rows(features: &mut [f32], dim: usize) {
    for row in features.chunks_mut(dim.max(1)) {
        let s: f32 = row.iter().map(|x| x.abs()).sum();
        if s > 0.0 {
            row.iter_mut().for_each(|x| *x /= s);
        }
    }
}

/// Softmax-regression weights: `w` is `dim x classes`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub dim: usize,
    pub classes: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub epoch: u32,
}

impl ModelParams {
    pub fn zeros(dim: usize, classes: usize) -> Self {
        ModelParams {
            dim,
            classes,
            w: vec![0.0; dim * classes],
            b: vec![0.0; classes],
            epoch: 0,
        }
    }

    /// Uniform in `±1/sqrt(dim)`, zero bias.
    pub fn init(dim: usize, classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = 1.0 / (dim.max(1) as f64).sqrt();
        let mut p = Self::zeros(dim, classes);
        p.w.iter_mut().for_each(|x| *x = rng.random_range(-a..a));
        p
    }

    fn logits(&self, row: &[f32], out: &mut [f64]) {
        out.copy_from_slice(&self.b);
        for (j, &x) in row.iter().enumerate() {
            if x != 0.0 {
                let x = x as f64;
                for (o, &w) in out.iter_mut().zip(&self.w[j * self.classes..(j + 1) * self.classes]) {
                    *o += x * w;
                }
            }
        }
    }

    pub fn predict(&self, row: &[f32]) -> u32 {
        let mut z = vec![0.0; self.classes];
        self.logits(row, &mut z);
        argmax(&z) as u32
    }

    fn same_shape(&self, other: &ModelParams) -> bool {
        self.dim == other.dim && self.classes == other.classes
    }
}

fn argmax(z: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in z.iter().enumerate() {
        if v > z[best] {
            best = i;
        }
    }
    best
}

fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        s += *v;
    }
    z.iter_mut().for_each(|v| *v /= s);
}

/// Gradient of [`loss_and_grad`], same layout as [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

/// Mean cross-entropy over `rows` plus `weight_decay / 2 * |W|^2`, and its
/// gradient.
pub fn loss_and_grad(
    params: &ModelParams,
    x: &[f32],
    labels: &[u32],
    rows: &[u32],
    weight_decay: f64,
    exec: Exec,
) -> (f64, Gradient) {
    let (d, c) = (params.dim, params.classes);
    let chunks: Vec<&[u32]> = rows.chunks(GRAD_CHUNK).collect();
    let partial = exec.map_slice(&chunks, |chunk| {
        let mut gw = vec![0.0; d * c];
        let mut gb = vec![0.0; c];
        let mut loss = 0.0;
        let mut z = vec![0.0; c];
        for &r in chunk.iter() {
            let r = r as usize;
            let row = &x[r * d..(r + 1) * d];
            params.logits(row, &mut z);
            softmax_in_place(&mut z);
            let y = labels[r] as usize;
            loss -= z[y].max(f64::MIN_POSITIVE).ln();
            z[y] -= 1.0;
            for (g, &e) in gb.iter_mut().zip(&z) {
                *g += e;
            }
            for (j, &xj) in row.iter().enumerate() {
                if xj != 0.0 {
                    let xj = xj as f64;
                    for (g, &e) in gw[j * c..(j + 1) * c].iter_mut().zip(&z) {
                        *g += xj * e;
                    }
                }
            }
        }
        (loss, gw, gb)
    });
    let n = rows.len().max(1) as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; d * c];
    let mut gb = vec![0.0; c];
    for (l, pw, pb) in partial {
        loss += l;
        gw.iter_mut().zip(&pw).for_each(|(a, b)| *a += b);
        gb.iter_mut().zip(&pb).for_each(|(a, b)| *a += b);
    }
    loss /= n;
    gw.iter_mut().for_each(|g| *g /= n);
    gb.iter_mut().for_each(|g| *g /= n);
    if weight_decay != 0.0 {
        loss += 0.5 * weight_decay * params.w.iter().map(|w| w * w).sum::<f64>();
        gw.iter_mut().zip(&params.w).for_each(|(g, w)| *g += weight_decay * w);
    }
    (loss, Gradient { w: gw, b: gb })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub epochs: u32,
    pub lr: f64,
    pub batch: usize,
    pub weight_decay: f64,
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            epochs: 100,
            lr: 0.01,
            batch: 512,
            weight_decay: 5e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
struct Adam {
    mw: Vec<f64>,
    vw: Vec<f64>,
    mb: Vec<f64>,
    vb: Vec<f64>,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(p: &ModelParams) -> Self {
        Adam {
            mw: vec![0.0; p.w.len()],
            vw: vec![0.0; p.w.len()],
            mb: vec![0.0; p.b.len()],
            vb: vec![0.0; p.b.len()],
            t: 0,
        }
    }

    fn step(&mut self, p: &mut ModelParams, g: &Gradient, lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        let update = |x: &mut [f64], m: &mut [f64], v: &mut [f64], g: &[f64]| {
            for i in 0..x.len() {
                m[i] = Self::B1 * m[i] + (1.0 - Self::B1) * g[i];
                v[i] = Self::B2 * v[i] + (1.0 - Self::B2) * g[i] * g[i];
                x[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + Self::EPS);
            }
        };
        update(&mut p.w, &mut self.mw, &mut self.vw, &g.w);
        update(&mut p.b, &mut self.mb, &mut self.vb, &g.b);
    }
}

/// Training state of one local model: weights, optimizer moments and the
/// shuffling stream.
#[derive(Debug, Clone)]
pub struct LocalTrainer {
    pub params: ModelParams,
    adam: Adam,
    rng: ChaCha8Rng,
    order: Vec<u32>,
}

impl LocalTrainer {
    pub fn new(params: ModelParams, train_rows: &[u32], seed: u64) -> Self {
        LocalTrainer {
            adam: Adam::new(&params),
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            order: train_rows.to_vec(),
        }
    }

    pub fn num_train(&self) -> usize {
        self.order.len()
    }

    /// One pass of shuffled mini-batch updates. A model without training rows
    /// is left unchanged.
    pub fn epoch(&mut self, x: &[f32], labels: &[u32], hyper: &Hyper, exec: Exec) {
        self.params.epoch += 1;
        if self.order.is_empty() {
            return;
        }
        self.order.shuffle(&mut self.rng);
        for batch in self.order.chunks(hyper.batch.max(1)) {
            let (_, g) = loss_and_grad(&self.params, x, labels, batch, hyper.weight_decay, exec);
            self.adam.step(&mut self.params, &g, hyper.lr);
        }
    }
}

/// Trains from `init` on `train_rows` for `hyper.epochs` epochs.
pub fn train_local(
    init: ModelParams,
    x: &[f32],
    labels: &[u32],
    train_rows: &[u32],
    hyper: &Hyper,
    exec: Exec,
) -> ModelParams {
    let mut t = LocalTrainer::new(init, train_rows, hyper.seed);
    for _ in 0..hyper.epochs {
        t.epoch(x, labels, hyper, exec);
    }
    t.params
}

/// Per-model weights `alpha_i = n_i / sum(n)`, kept as integer counts so
/// that the weights sum to one exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncWeights {
    counts: Vec<u64>,
    total: u64,
}

impl SyncWeights {
    pub fn new(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidParameter("all training counts are zero".into()));
        }
        Ok(SyncWeights { counts: counts.to_vec(), total })
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total as f64
    }

    /// Numerator and denominator of `alpha_i`.
    pub fn ratio(&self, i: usize) -> (u64, u64) {
        (self.counts[i], self.total)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Element-wise `sum_i alpha_i * p_i`, computed as offsets from the first
/// model and clamped to the input range so that identical inputs and
/// zero-weight models are reproduced exactly.
pub fn model_average(params: &[&ModelParams], counts: &[u64]) -> Result<ModelParams> {
    let first = *params
        .first()
        .ok_or_else(|| Error::InvalidParameter("no models to average".into()))?;
    if params.len() != counts.len() {
        return Err(Error::ShapeMismatch(format!("{} models, {} counts", params.len(), counts.len())));
    }
    if let Some(p) = params.iter().find(|p| !p.same_shape(first)) {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            first.dim, first.classes, p.dim, p.classes
        )));
    }
    let alpha = SyncWeights::new(counts)?;
    let mix = |get: &dyn Fn(&ModelParams) -> &Vec<f64>| -> Vec<f64> {
        let base = get(first);
        (0..base.len())
            .map(|j| {
                let x0 = base[j];
                let (mut lo, mut hi, mut acc) = (x0, x0, 0.0);
                for (i, p) in params.iter().enumerate().skip(1) {
                    let x = get(p)[j];
                    lo = lo.min(x);
                    hi = hi.max(x);
                    if counts[i] > 0 {
                        acc += alpha.alpha(i) * (x - x0);
                    }
                }
                (x0 + acc).clamp(lo, hi)
            })
            .collect()
    };
    Ok(ModelParams {
        dim: first.dim,
        classes: first.classes,
        w: mix(&|p| &p.w),
        b: mix(&|p| &p.b),
        epoch: params.iter().map(|p| p.epoch).max().unwrap_or(0),
    })
}

/// Pooled micro-F1 over all classes: `2TP / (2TP + FP + FN)`.
pub fn micro_f1(pred: &[u32], truth: &[u32]) -> Result<f64> {
    if pred.is_empty() {
        return Err(Error::Empty("micro-F1 over an empty mask".into()));
    }
    if pred.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!("{} predictions, {} labels", pred.len(), truth.len())));
    }
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for (&p, &t) in pred.iter().zip(truth) {
        if p == t {
            tp += 1;
        } else {
            // a wrong label is a false positive for `p` and a false negative for `t`
            fp += 1;
            fn_ += 1;
        }
    }
    Ok(2.0 * tp as f64 / (2 * tp + fp + fn_) as f64)
}

/// Correct / total counts, for pooling across partitions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Score {
    pub correct: u64,
    pub total: u64,
}

impl Score {
    pub fn f1(&self) -> Result<f64> {
        if self.total == 0 {
            return Err(Error::Empty("micro-F1 over an empty mask".into()));
        }
        Ok(self.correct as f64 / self.total as f64)
    }

    fn add(self, o: Score) -> Score {
        Score {
            correct: self.correct + o.correct,
            total: self.total + o.total,
        }
    }
}

pub fn score(params: &ModelParams, x: &[f32], labels: &[u32], rows: &[u32]) -> Score {
    let d = params.dim;
    let correct = rows
        .iter()
        .filter(|&&r| {
            let r = r as usize;
            params.predict(&x[r * d..(r + 1) * d]) == labels[r]
        })
        .count();
    Score {
        correct: correct as u64,
        total: rows.len() as u64,
    }
}

/// Micro-F1 of `params` on `rows`.
pub fn evaluate(params: &ModelParams, x: &[f32], labels: &[u32], rows: &[u32]) -> Result<f64> {
    let d = params.dim;
    let pred: Vec<u32> = rows.iter().map(|&r| params.predict(&x[r as usize * d..(r as usize + 1) * d])).collect();
    let truth: Vec<u32> = rows.iter().map(|&r| labels[r as usize]).collect();
    micro_f1(&pred, &truth)
}

/// Propagated features and targets of one partition, in local row order
/// (the partition's node table).
#[derive(Debug, Clone)]
pub struct LocalData {
    pub dim: usize,
    pub x: Vec<f32>,
    pub labels: Vec<u32>,
    pub train: Vec<u32>,
    pub val: Vec<u32>,
    pub test: Vec<u32>,
}

impl LocalData {
    /// `rows` holds the partition's raw feature rows in node-table order;
    /// they are propagated `hops` times over the partition's own edges. Only owners become training or evaluation
    /// targets.
    pub fn build(
        part: &Partition,
        rows: Vec<f32>,
        dim: usize,
        labels: &[u32],
        hops: usize,
        exec: Exec,
    ) -> Result<Self> {
        let n = part.nodes.len();
        if rows.len() != n * dim {
            return Err(Error::ShapeMismatch(format!("{} feature values for {n} rows of {dim}", rows.len())));
        }
        let local = |v: NodeId| -> Result<u32> {
            part.nodes
                .binary_search_by_key(&v, |r| r.id)
                .map(|i| i as u32)
                .map_err(|_| Error::CorruptArtifact(format!("edge endpoint {} missing from node table", v.0)))
        };
        let mut edges = Vec::with_capacity(part.edges.len());
        for &(u, v) in &part.edges {
            edges.push((local(u)?, local(v)?));
        }
        let adj = Csr::from_edges(n, edges);
        let x = sgc_propagate(&adj, &rows, dim, hops, exec);
        let mut out = LocalData {
            dim,
            x,
            labels: Vec::with_capacity(n),
            train: Vec::new(),
            val: Vec::new(),
            test: Vec::new(),
        };
        for (i, r) in part.nodes.iter().enumerate() {
            let label = *labels
                .get(r.id.index())
                .ok_or_else(|| Error::ShapeMismatch(format!("no label for node {}", r.id.0)))?;
            out.labels.push(label);
            if !r.owner {
                continue;
            }
            match r.role {
                Role::Train => out.train.push(i as u32),
                Role::Val => out.val.push(i as u32),
                Role::Test => out.test.push(i as u32),
                Role::None => {}
            }
        }
        Ok(out)
    }

    /// Like [`LocalData::build`], gathering rows from a global row-major matrix.
    pub fn from_global(
        part: &Partition,
        features: &[f32],
        dim: usize,
        labels: &[u32],
        hops: usize,
        exec: Exec,
    ) -> Result<Self> {
        let mut rows = Vec::with_capacity(part.nodes.len() * dim);
        for r in &part.nodes {
            let i = r.id.index();
            let row = features
                .get(i * dim..(i + 1) * dim)
                .ok_or_else(|| Error::ShapeMismatch(format!("no feature row for node {}", r.id.0)))?;
            rows.extend_from_slice(row);
        }
        Self::build(part, rows, dim, labels, hops, exec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryPoint {
    pub epoch: u32,
    pub sync_count: u32,
    pub val_f1: f64,
    pub test_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub history: Vec<HistoryPoint>,
    pub syncs: u32,
    pub final_val_f1: f64,
    pub final_test_f1: f64,
    /// Test score at the sync with the highest validation score (first on ties).
    pub best_val_f1: f64,
    pub test_at_best_val: f64,
    /// Partition indices run by each worker.
    pub workers: Vec<Vec<usize>>,
    pub warnings: Vec<String>,
}

/// Number of averaging rounds for `epochs` epochs at `interval`.
pub fn sync_count(epochs: u32, interval: u32) -> u32 {
    epochs.div_ceil(interval.max(1))
}

/// Trains one local model per partition on `workers` logical workers
/// (partition `i` runs on worker `i mod workers`), averaging all models every
/// `sync_interval` epochs and once more after the last epoch if needed.
pub fn distributed_train(
    parts: &[LocalData],
    classes: usize,
    workers: usize,
    sync_interval: u32,
    hyper: &Hyper,
    exec: Exec,
) -> Result<TrainOutcome> {
    let p = parts.len();
    if p == 0 || workers == 0 || !p.is_multiple_of(workers) {
        return Err(Error::InvalidParameter(format!(
            "{p} partitions cannot be spread evenly over {workers} workers"
        )));
    }
    if sync_interval == 0 || hyper.epochs == 0 {
        return Err(Error::InvalidParameter("sync interval and epochs must be positive".into()));
    }
    let dim = parts[0].dim;
    if parts.iter().any(|d| d.dim != dim) {
        return Err(Error::ShapeMismatch("partitions disagree on feature dimension".into()));
    }
    let counts: Vec<u64> = parts.iter().map(|d| d.train.len() as u64).collect();
    SyncWeights::new(&counts)?;

    let init = ModelParams::init(dim, classes, hyper.seed);
    let mut trainers: Vec<LocalTrainer> = parts
        .iter()
        .enumerate()
        .map(|(i, d)| {
            LocalTrainer::new(
                init.clone(),
                &d.train,
                hyper.seed.wrapping_add((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            )
        })
        .collect();
    let warnings = parts
        .iter()
        .enumerate()
        .filter(|(_, d)| d.train.is_empty())
        .map(|(i, _)| format!("partition {i} has no training nodes; its model is never updated"))
        .collect();
    let assignment: Vec<Vec<usize>> = (0..workers).map(|w| (w..p).step_by(workers).collect()).collect();

    let mut history = Vec::new();
    let mut epoch = 0u32;
    let mut syncs = 0u32;
    let mut avg = init;
    while epoch < hyper.epochs {
        let run = sync_interval.min(hyper.epochs - epoch);
        // each worker advances its own models; models never interact between syncs
        let mut slots: Vec<Option<LocalTrainer>> = trainers.drain(..).map(Some).collect();
        let mut per_worker: Vec<Vec<(usize, LocalTrainer)>> = assignment
            .iter()
            .map(|ids| ids.iter().map(|&i| (i, slots[i].take().unwrap())).collect())
            .collect();
        exec.for_each_mut(&mut per_worker, |_, models| {
            for (i, t) in models.iter_mut() {
                for _ in 0..run {
                    t.epoch(&parts[*i].x, &parts[*i].labels, hyper, Exec::Sequential);
                }
            }
        });
        for (i, t) in per_worker.into_iter().flatten() {
            slots[i] = Some(t);
        }
        trainers = slots.into_iter().map(|t| t.unwrap()).collect();
        epoch += run;

        let refs: Vec<&ModelParams> = trainers.iter().map(|t| &t.params).collect();
        avg = model_average(&refs, &counts)?;
        for t in trainers.iter_mut() {
            t.params.w.copy_from_slice(&avg.w);
            t.params.b.copy_from_slice(&avg.b);
        }
        syncs += 1;

        let scores = exec.map_slice(parts, |d| {
            (score(&avg, &d.x, &d.labels, &d.val), score(&avg, &d.x, &d.labels, &d.test))
        });
        let (val, test) = scores
            .into_iter()
            .fold((Score::default(), Score::default()), |(a, b), (v, t)| (a.add(v), b.add(t)));
        history.push(HistoryPoint {
            epoch,
            sync_count: syncs,
            val_f1: val.f1().unwrap_or(f64::NAN),
            test_f1: test.f1().unwrap_or(f64::NAN),
        });
    }
    let last = *history.last().expect("at least one sync");
    let best = history
        .iter()
        .fold(history[0], |b, h| if h.val_f1 > b.val_f1 { *h } else { b });
    Ok(TrainOutcome {
        params: avg,
        syncs,
        final_val_f1: last.val_f1,
        final_test_f1: last.test_f1,
        best_val_f1: best.val_f1,
        test_at_best_val: best.test_f1,
        history,
        workers: assignment,
        warnings,
    })
}

/// Centralized baseline: a single model trained on `data` with the same
/// initialization and shuffling seed as partition 0 of a distributed run.
pub fn centralized_train(data: &LocalData, classes: usize, hyper: &Hyper, exec: Exec) -> Result<TrainOutcome> {
    distributed_train(std::slice::from_ref(data), classes, 1, hyper.epochs, hyper, exec)
}

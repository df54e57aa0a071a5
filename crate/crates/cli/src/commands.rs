use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spring_partition::baselines::{Algorithm, HdrfDegrees, DEFAULT_HDRF_LAMBDA};
use spring_partition::completion::Role;
use spring_partition::datasets::{generate, read_labels, write_dataset, CitationPreset};
use spring_partition::graph_stream::{
    compute_degrees, open_edge_stream, write_binary_edges, DegreeTable, EdgeFile, EdgeFormat, EdgeSource, IdMode,
    WithReverse,
};
use spring_partition::metrics::PartitionReport;
use spring_partition::pipeline::{partition_graph, sweep, sweep_table, PartitionConfig};
use spring_partition::spring::DEFAULT_BETA;
use spring_partition::store::{attach_features, plan_partition_count, read_partitions, write_partitions, FeatureFile, RunInfo};
use spring_partition::train::{distributed_train, Hyper, LocalData};
use spring_partition::Exec;

/// A problem with the command line itself rather than with the data.
#[derive(Debug)]
pub struct ConfigError(String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Parser, Debug)]
#[command(name = "spring", version, about = "Streaming graph partitioning for distributed GNN training")]
pub struct Cli {
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partition an edge list and write a partition directory.
    Partition(PartitionCmd),
    /// Report replication factor and balance of a partitioning.
    Stats(StatsCmd),
    /// Split a feature matrix into an existing partition directory.
    SplitFeatures(SplitCmd),
    /// Simulate model-averaging training over a partition directory.
    TrainSim(TrainCmd),
    /// Choose a partition count from memory limits.
    Plan(PlanCmd),
    /// Sweep algorithms and partition counts and print an RF matrix.
    Bench(BenchCmd),
    /// Write a synthetic labelled citation-style dataset.
    Generate(GenerateCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum InputFormat {
    Text,
    Binary,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DegreeMode {
    Partial,
    Exact,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse::<Algorithm>().map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone, Serialize)]
struct InputArgs {
    /// Edge list: `u<TAB>v` text, or binary u64 pairs (`.bin`).
    #[arg(long, short = 'i')]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    /// Node ids are dense `0..N`; otherwise ids are numbered in order of
    /// first appearance.
    #[arg(long)]
    nodes: Option<u64>,
    /// Also stream every edge reversed.
    #[arg(long)]
    add_reverse: bool,
    /// Skip malformed text lines instead of failing.
    #[arg(long)]
    lenient: bool,
}

/// Which algorithm and how many partitions.
#[derive(Args, Debug, Clone, Serialize)]
struct Target {
    /// spring, dbh, greedy, hdrf or 2ps.
    #[arg(long, default_value = "spring", value_parser = parse_algorithm)]
    algo: Algorithm,
    #[arg(long, short = 'p', default_value_t = 4)]
    partitions: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
struct AlgoArgs {
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    #[arg(long)]
    tau_vol: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// HDRF balance weight.
    #[arg(long, default_value_t = DEFAULT_HDRF_LAMBDA)]
    lambda: f64,
    #[arg(long, value_enum, default_value = "partial")]
    hdrf_degrees: DegreeMode,
    /// Load slack for the PowerGraph greedy baseline.
    #[arg(long, default_value_t = 0.1)]
    greedy_slack: f64,
    /// Neighborhood completion depth.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=3))]
    hops: u32,
    /// Place each cut edge in one endpoint's home at random instead.
    #[arg(long)]
    no_completion: bool,
}

impl AlgoArgs {
    fn config(&self, algorithm: Algorithm, partitions: usize) -> PartitionConfig {
        PartitionConfig {
            beta: self.beta,
            tau_vol: self.tau_vol,
            seed: self.seed,
            lambda: self.lambda,
            hdrf_degrees: match self.hdrf_degrees {
                DegreeMode::Partial => HdrfDegrees::Partial,
                DegreeMode::Exact => HdrfDegrees::Exact,
            },
            greedy_slack: self.greedy_slack,
            hops: if self.no_completion { 0 } else { self.hops },
            ..PartitionConfig::new(algorithm, partitions)
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct PartitionCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    target: Target,
    #[command(flatten)]
    algo: AlgoArgs,
    /// Output directory.
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Feature matrix (FEA1) split alongside the partitions.
    #[arg(long)]
    features: Option<PathBuf>,
    /// `node label role` lines; roles are attached to owner records.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct StatsCmd {
    /// Partition directory to report on.
    #[arg(long, conflicts_with = "input")]
    dir: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    target: Target,
    #[command(flatten)]
    algo: AlgoArgs,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct SplitCmd {
    #[arg(long)]
    dir: PathBuf,
    #[arg(long)]
    features: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct TrainCmd {
    /// Partition directory with features.
    #[arg(long)]
    dir: PathBuf,
    /// `node label [role]` lines; roles, when present, replace stored ones.
    #[arg(long)]
    labels: PathBuf,
    /// Simulated workers; defaults to the partition count.
    #[arg(long, short = 'q')]
    workers: Option<usize>,
    #[arg(long, default_value_t = 1)]
    sync_interval: u32,
    #[arg(long, default_value_t = 100)]
    epochs: u32,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value_t = 512)]
    batch: usize,
    #[arg(long, default_value_t = 5e-4)]
    weight_decay: f64,
    /// Feature propagation rounds.
    #[arg(long, default_value_t = 2)]
    prop_depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of classes; defaults to the largest label plus one.
    #[arg(long)]
    classes: Option<usize>,
    /// CSV history (default `<dir>/history.csv`).
    #[arg(long)]
    history: Option<PathBuf>,
    /// Final metrics JSON (default `<dir>/train_metrics.json`).
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct PlanCmd {
    /// Worker count.
    #[arg(short = 'q', long)]
    workers: usize,
    /// Memory per worker, GB.
    #[arg(short = 'M', long)]
    memory: f64,
    /// Reserved memory per worker, GB (two thirds of M by default).
    #[arg(short = 'T', long)]
    reserved: Option<f64>,
    /// Graph size, GB.
    #[arg(long)]
    data_size: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct BenchCmd {
    #[command(flatten)]
    input: InputArgs,
    /// Use a generated dataset instead of --input.
    #[arg(long, conflicts_with = "input")]
    preset: Option<String>,
    #[arg(long, default_value_t = 0)]
    dataset_seed: u64,
    #[arg(short = 'p', long = "partitions", value_delimiter = ',', default_value = "4,8,16")]
    partitions: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "spring,dbh,greedy,hdrf,2ps", value_parser = parse_algorithm)]
    algos: Vec<Algorithm>,
    #[command(flatten)]
    algo: AlgoArgs,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct GenerateCmd {
    /// cora, citeseer or pubmed.
    #[arg(long, default_value = "cora")]
    preset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Also write the edges as a binary `edges.bin`.
    #[arg(long)]
    binary: bool,
}

pub fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match cli.command {
        Command::Partition(c) => partition(c, exec),
        Command::Stats(c) => stats(c),
        Command::SplitFeatures(c) => split(c, exec),
        Command::TrainSim(c) => train(c, exec),
        Command::Plan(c) => plan(c),
        Command::Bench(c) => bench(c, exec),
        Command::Generate(c) => generate_cmd(c),
    }
}

fn open_input(args: &InputArgs) -> Result<EdgeFile> {
    let path = args.input.as_ref().ok_or_else(|| config_err("--input is required"))?;
    let format = match args.input_format {
        Some(InputFormat::Text) => EdgeFormat::TextTsv,
        Some(InputFormat::Binary) => EdgeFormat::BinaryU64Pairs,
        None => EdgeFormat::from_path(path),
    };
    let file = open_edge_stream(path, format)?;
    Ok(if args.lenient { file.lenient() } else { file })
}

/// Runs `f` with the input stream, reversed copies included if requested.
fn with_source<R>(args: &InputArgs, f: impl FnOnce(&dyn EdgeSource) -> Result<R>) -> Result<R> {
    let file = open_input(args)?;
    if args.add_reverse {
        f(&WithReverse(&file))
    } else {
        f(&file)
    }
}

fn degrees_for(src: &dyn EdgeSource, nodes: Option<u64>) -> Result<DegreeTable> {
    let mode = nodes.map_or(IdMode::FirstSeen, IdMode::Dense);
    Ok(compute_degrees(src, mode)?)
}

fn print_report(report: &PartitionReport, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => println!("{}", report.to_json()?),
        OutputFormat::Table => print!("{}", report.to_table()),
    }
    Ok(())
}

fn partition(cmd: PartitionCmd, exec: Exec) -> Result<()> {
    let features = cmd.features.as_ref().map(FeatureFile::open).transpose()?;
    let nodes = match (cmd.input.nodes, &features) {
        (Some(n), _) => Some(n),
        (None, Some(f)) => Some(f.rows()),
        (None, None) if cmd.labels.is_some() => {
            return Err(config_err("--labels needs dense node ids: pass --nodes or --features"))
        }
        (None, None) => None,
    };
    let parameters = serde_json::to_value(&cmd)?;
    with_source(&cmd.input, |src| {
        let degrees = degrees_for(src, nodes)?;
        let cfg = cmd.algo.config(cmd.target.algo, cmd.target.partitions);
        let mut run = partition_graph(src, &degrees, &cfg)?;
        if let Some(path) = &cmd.labels {
            let (_, roles) = read_labels(path, degrees.num_nodes())?;
            run.graph.apply_roles(&roles)?;
        }
        let info = RunInfo {
            algorithm: cmd.target.algo.name().to_string(),
            seed: cmd.algo.seed,
            source_edges: degrees.num_edges(),
            parameters,
        };
        write_partitions(&cmd.out, &run.graph, features.as_ref(), &info, exec)
            .with_context(|| format!("writing {}", cmd.out.display()))?;
        print_report(&run.report(cmd.target.algo)?, cmd.format)
    })
}

fn stats(cmd: StatsCmd) -> Result<()> {
    let report = match &cmd.dir {
        Some(dir) => {
            let (g, m) = read_partitions(dir)?;
            PartitionReport::new(&m.algorithm, &g)?
        }
        None => with_source(&cmd.input, |src| {
            let degrees = degrees_for(src, cmd.input.nodes)?;
            let run = partition_graph(src, &degrees, &cmd.algo.config(cmd.target.algo, cmd.target.partitions))?;
            Ok(run.report(cmd.target.algo)?)
        })?,
    };
    print_report(&report, cmd.format)
}

fn split(cmd: SplitCmd, exec: Exec) -> Result<()> {
    let features = FeatureFile::open(&cmd.features)?;
    let m = attach_features(&cmd.dir, &features, exec)?;
    for (i, p) in m.parts.iter().enumerate() {
        println!("part-{i}\t{} rows", p.nodes);
    }
    Ok(())
}

#[derive(Serialize)]
struct TrainMetrics<'a> {
    schema: u32,
    partitions: usize,
    workers: usize,
    sync_interval: u32,
    syncs: u32,
    epochs: u32,
    train_nodes: usize,
    final_val_f1: f64,
    final_test_f1: f64,
    best_val_f1: f64,
    test_at_best_val: f64,
    hyper: Hyper,
    prop_depth: usize,
    warnings: &'a [String],
}

fn train(cmd: TrainCmd, exec: Exec) -> Result<()> {
    let (mut g, manifest) = read_partitions(&cmd.dir)?;
    if manifest.feature_dim.is_none() {
        return Err(config_err(format!(
            "{} has no features; run split-features first",
            cmd.dir.display()
        )));
    }
    let (labels, roles) = read_labels(&cmd.labels, g.num_nodes())?;
    if roles.iter().any(|&r| r != Role::None) {
        g.apply_roles(&roles)?;
    }
    let classes = cmd.classes.unwrap_or_else(|| labels.iter().max().map_or(1, |&l| l as usize + 1));
    let workers = cmd.workers.unwrap_or(manifest.partitions);
    let hyper = Hyper {
        epochs: cmd.epochs,
        lr: cmd.lr,
        batch: cmd.batch,
        weight_decay: cmd.weight_decay,
        seed: cmd.seed,
    };
    let mut parts = Vec::with_capacity(manifest.partitions);
    for (i, pm) in manifest.parts.iter().enumerate() {
        let file = pm.features_file.as_ref().expect("feature files recorded with feature_dim");
        let rows = FeatureFile::open(cmd.dir.join(file))?;
        parts.push(LocalData::build(g.partition(i), rows.to_vec(), rows.dim(), &labels, cmd.prop_depth, exec)?);
    }
    let out = distributed_train(&parts, classes, workers, cmd.sync_interval, &hyper, exec)?;

    let history_path = cmd.history.clone().unwrap_or_else(|| cmd.dir.join("history.csv"));
    let mut csv = String::from("epoch,sync_count,val_f1,test_f1\n");
    for h in &out.history {
        csv.push_str(&format!("{},{},{:.6},{:.6}\n", h.epoch, h.sync_count, h.val_f1, h.test_f1));
    }
    write_file(&history_path, csv.as_bytes())?;
    let metrics = TrainMetrics {
        schema: 1,
        partitions: manifest.partitions,
        workers,
        sync_interval: cmd.sync_interval,
        syncs: out.syncs,
        epochs: cmd.epochs,
        train_nodes: parts.iter().map(|p| p.train.len()).sum(),
        final_val_f1: out.final_val_f1,
        final_test_f1: out.final_test_f1,
        best_val_f1: out.best_val_f1,
        test_at_best_val: out.test_at_best_val,
        hyper,
        prop_depth: cmd.prop_depth,
        warnings: &out.warnings,
    };
    let json = serde_json::to_string_pretty(&metrics)?;
    let metrics_path = cmd.metrics.clone().unwrap_or_else(|| cmd.dir.join("train_metrics.json"));
    write_file(&metrics_path, (json.clone() + "\n").as_bytes())?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match cmd.format {
        OutputFormat::Json => println!("{json}"),
        OutputFormat::Table => {
            println!("partitions      {}", manifest.partitions);
            println!("workers         {workers}");
            println!("syncs           {}", out.syncs);
            println!("final val F1    {:.4}", out.final_val_f1);
            println!("final test F1   {:.4}", out.final_test_f1);
            println!("test @ best val {:.4}", out.test_at_best_val);
        }
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn plan(cmd: PlanCmd) -> Result<()> {
    let plan = plan_partition_count(cmd.workers, cmd.memory, cmd.reserved, cmd.data_size)?;
    match cmd.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&plan)?),
        OutputFormat::Table => println!("{}", plan.partitions),
    }
    Ok(())
}

fn bench(cmd: BenchCmd, exec: Exec) -> Result<()> {
    if cmd.partitions.contains(&0) {
        return Err(config_err("partition counts must be at least 1"));
    }
    let base = cmd.algo.config(Algorithm::Spring, 1);
    let cells = match &cmd.preset {
        Some(name) => {
            let preset = CitationPreset::by_name(name).ok_or_else(|| config_err(format!("unknown preset {name:?}")))?;
            let g = generate(&preset, cmd.dataset_seed);
            let degrees = compute_degrees(&g.edges, IdMode::Dense(preset.nodes as u64))?;
            sweep(&g.edges, &degrees, &cmd.algos, &cmd.partitions, &base, exec)?
        }
        None => with_source(&cmd.input, |src| {
            let degrees = degrees_for(src, cmd.input.nodes)?;
            Ok(sweep(src, &degrees, &cmd.algos, &cmd.partitions, &base, exec)?)
        })?,
    };
    match cmd.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&cells)?),
        OutputFormat::Table => print!("{}", sweep_table(&cells)),
    }
    Ok(())
}

fn generate_cmd(cmd: GenerateCmd) -> Result<()> {
    let preset =
        CitationPreset::by_name(&cmd.preset).ok_or_else(|| config_err(format!("unknown preset {:?}", cmd.preset)))?;
    let g = generate(&preset, cmd.seed);
    let files = write_dataset(&cmd.out, &g)?;
    if cmd.binary {
        let pairs = g.edges.0.iter().map(|e| (e.u, e.v));
        write_binary_edges(cmd.out.join("edges.bin"), pairs)?;
    }
    println!(
        "{}: {} nodes, {} edges, {} classes, {} features -> {}",
        preset.name,
        preset.nodes,
        preset.edges,
        preset.classes,
        preset.features,
        files.edges.parent().unwrap_or(Path::new(".")).display()
    );
    Ok(())
}

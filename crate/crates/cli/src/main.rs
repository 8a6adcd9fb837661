//! `padded`: partition graphs, estimate padding, verify traces.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use padded_core::sampling::DEFAULT_SEED;
use padded_core::Scheme;

#[derive(Debug, Parser)]
#[command(name = "padded", version, about = "Randomized padded decompositions of weighted graphs")]
struct Cli {
    /// Worker threads for Monte Carlo trials; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Partition a graph once and summarize the clusters.
    Partition(PartitionArgs),
    /// Monte Carlo estimates over many independent partitions.
    Estimate(EstimateArgs),
    /// Replay a trace and check its structural invariants.
    Verify(VerifyArgs),
    /// Write a generated graph with its tree decomposition and rotation system.
    Generate(GenerateArgs),
    /// Check the potential drift inequality by simulation.
    Drift(DriftArgs),
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Scheme,
    /// Diameter bound Δ.
    #[arg(long)]
    pub delta: f64,
    /// Excluded minor size (weak, strong).
    #[arg(long)]
    pub r: Option<usize>,
    /// Genus bound (genus).
    #[arg(long)]
    pub g: Option<usize>,
    /// Tree decomposition in PACE `.td` format (treewidth).
    #[arg(long)]
    pub td: Option<PathBuf>,
    /// Rotation system as JSON (genus).
    #[arg(long)]
    pub rotation: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Graph in edge-list format.
    pub graph: PathBuf,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Where to write the `vertex,cluster` CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Where to write the decomposition trace (JSON).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SummaryFormat::Text)]
    pub format: SummaryFormat,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    pub graph: PathBuf,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, value_enum, default_value_t = Metric::Padding)]
    pub metric: Metric,
    /// Ball radius as a fraction of Δ; repeatable.
    #[arg(long = "gamma", default_values_t = [0.0])]
    pub gammas: Vec<f64>,
    /// Center vertices; repeatable. Defaults to ten evenly spaced vertices.
    #[arg(long = "z")]
    pub z: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Skeleton reach `u` for threatener counts; defaults to the scheme's law.
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub graph: PathBuf,
    /// Trace written by `partition --trace`.
    #[arg(long)]
    pub trace: PathBuf,
    /// Adjacency bound; defaults to the parameter stored in the trace.
    #[arg(long)]
    pub r: Option<usize>,
    /// Also check a partition CSV against the trace's Δ.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SummaryFormat::Json)]
    pub format: SummaryFormat,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value_t = WeightArg::Unit)]
    pub weights: WeightArg,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output prefix: writes `<prefix>.gr`, `<prefix>.td` and `<prefix>.rot.json`.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    /// Visibility bound s.
    #[arg(long, default_value_t = 3)]
    pub s: usize,
    #[arg(long, default_value_t = 0.5)]
    pub h: f64,
    /// Starting coordinates, nondecreasing.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<f64>,
    /// Run every s in {1,2,3,5} and h in {0,0.25,0.5,1} with random x.
    #[arg(long)]
    pub grid: bool,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Padding,
    CutFraction,
    Threateners,
    CuttingThreateners,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SummaryFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Grid,
    Path,
    Cycle,
    KTree,
    ToroidalGrid,
    Complete,
    DoubleTorus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    Unit,
    Uniform,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: padded_core::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let outcome = match cli.command {
        Command::Partition(a) => commands::partition(&a),
        Command::Estimate(a) => commands::estimate(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Generate(a) => commands::generate(&a),
        Command::Drift(a) => commands::drift(&a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e
                .chain()
                .any(|c| matches!(c.downcast_ref(), Some(padded_core::Error::Argument(_))));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

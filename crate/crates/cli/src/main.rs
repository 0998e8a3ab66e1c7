//! `rulelab` command-line entry point.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error,
//! 3 inconsistent observations during inference.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rulelab_core::dataset::{Level, Split};
use rulelab_core::predictors::PredictorKind;
use rulelab_core::Boundary;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "RULELAB_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "rulelab",
    version,
    about = "Generate, simulate, infer and score Born/Stay cellular automata",
    after_help = "The default worker count comes from RULELAB_WORKERS when set, \
                  otherwise from the number of available CPUs."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample random non-trivial rules and write them as a rules file
    GenRules(GenRulesArgs),
    /// Run one rule from a random initial grid and store the trajectory
    Simulate(SimulateArgs),
    /// Build the train/val/test splits of a generalization level
    BuildDataset(BuildDatasetArgs),
    /// Score a predictor or a prediction file on one split
    Eval(EvalArgs),
    /// Recover the rule behind a trajectory file
    Infer(InferArgs),
    /// Write one frame of a trajectory, dataset or prediction file as PBM
    Render(RenderArgs),
    /// Time the stepping engines
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenRulesArgs {
    /// Number of rules
    #[arg(long)]
    pub count: usize,
    /// Neighborhood side length (3, 5, 7, ...)
    #[arg(long, value_parser = parse_side)]
    pub neighborhood: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output rules file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Rule notation, e.g. "B3/S23 n=3"
    #[arg(long)]
    pub rule: String,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    /// Number of steps, 1 to 255
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..=255))]
    pub steps: u16,
    /// Initial live-cell probability
    #[arg(long, default_value_t = 0.5, value_parser = parse_density)]
    pub density: f64,
    #[arg(long, default_value_t = Boundary::Dead)]
    pub boundary: Boundary,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output trajectory file (CADS)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildDatasetArgs {
    /// simple, l1, l2, l3x or l3i; overrides the config file
    #[arg(long)]
    pub level: Option<Level>,
    /// key=value dataset spec
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for rule sampling; defaults to the spec's master_seed
    #[arg(long)]
    pub rule_seed: Option<u64>,
    /// Seed for initial configurations; defaults to the spec's master_seed
    #[arg(long)]
    pub config_seed: Option<u64>,
    /// Output directory (spec.cfg, train.cads, val.cads, test.cads)
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Dataset directory or a single split file
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = Split::Test)]
    pub split: Split,
    /// oracle, copy-last, flip-all, constant or convnet
    #[arg(long, conflicts_with = "predictions", required_unless_present = "predictions")]
    pub predictor: Option<PredictorKind>,
    /// Prediction file (CAPR) in split sample order
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Include per-rule rows
    #[arg(long)]
    pub per_rule: bool,
    /// Write one PBM error map per sample into this directory
    #[arg(long)]
    pub error_maps: Option<PathBuf>,
    /// key=value report file; a `.csv` path gets the per-rule table instead
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// Trajectory file (CADS); every sample is read as a state sequence
    #[arg(long)]
    pub trajectory: PathBuf,
    /// Neighborhood radius; the largest radius tried with --auto-radius
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub radius: u32,
    /// Return the smallest consistent radius up to --radius
    #[arg(long)]
    pub auto_radius: bool,
    /// Output rules file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// CADS trajectory/split file or CAPR prediction file
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Frame index; inputs then target for CADS, prediction index for CAPR
    #[arg(long, default_value_t = 0)]
    pub frame: usize,
    /// Sample index within a CADS file
    #[arg(long, default_value_t = 0)]
    pub sample: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Write plain P1 instead of binary P4
    #[arg(long)]
    pub ascii: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EngineKind {
    Naive,
    Packed,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub engine: EngineKind,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub radius: u32,
    /// Grid size as HxW
    #[arg(long, default_value = "256x256", value_parser = parse_size)]
    pub size: (usize, usize),
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Timed repetitions after one warm-up run
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(5..))]
    pub reps: u32,
    #[arg(long, default_value_t = Boundary::Toroidal)]
    pub boundary: Boundary,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_side(s: &str) -> Result<u32, String> {
    let n: u32 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if n < 3 || n.is_multiple_of(2) {
        return Err(format!("neighborhood side must be odd and at least 3, got {n}"));
    }
    Ok(n)
}

fn parse_density(s: &str) -> Result<f64, String> {
    let d: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(0.0..=1.0).contains(&d) {
        return Err(format!("density must lie in [0, 1], got {d}"));
    }
    Ok(d)
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got `{s}`"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height in `{s}`"))?;
    let w: usize = w.parse().map_err(|_| format!("bad width in `{s}`"))?;
    if h == 0 || w == 0 {
        return Err(format!("grid size must be positive, got {s}"));
    }
    Ok((h, w))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

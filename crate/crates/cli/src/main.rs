//! `loadbal`: generate workloads, formulate and solve Ising load-balancing
//! problems, and run the Lagrange-sweep and chain-strength experiments.
//!
//! Exit codes: 0 success, 1 usage, 2 validation, 3 solver failure, 4 I/O.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loadbal_core::{AnnealParams, ErrorClass, Solver, SqaParams};

#[derive(Parser)]
#[command(
    name = "loadbal",
    version,
    about = "Ising-model load balancing for HPC workloads"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic workload file.
    Generate(GenerateArgs),
    /// Dump the Ising model of a workload as JSON.
    Formulate(FormulateArgs),
    /// Recursively bipartition a workload into a power-of-two number of parts.
    Solve(SolveArgs),
    /// Sample a graph workload over evenly spaced Lagrange parameters and extract the Pareto front.
    SweepGamma(SweepArgs),
    /// Measure chain breaks and solution quality against chain strength.
    ChainExperiment(ChainArgs),
    /// Evaluate an existing assignment.
    Metrics(MetricsArgs),
    /// Score an externally computed bipartition.
    ImportReference(ImportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorKind {
    /// Grid workload of AMR patch cell counts.
    Blastwave,
    /// Cell graph of a periodic cube of particle cells.
    Cosmo,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: GeneratorKind,
    /// Number of patches (blastwave).
    #[arg(long, default_value_t = 100)]
    patches: usize,
    /// Cells per cube side (cosmo).
    #[arg(long, default_value_t = 3)]
    side: usize,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FormulateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Lagrange parameter for graph workloads.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Scale the model to unit largest coefficient.
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    /// Round robin.
    Rr,
    /// Steepest descent.
    Sd,
    /// Simulated annealing.
    Sa,
    /// Simulated quantum annealing.
    Sqa,
    /// Exhaustive search (at most 26 items per split).
    Bf,
    /// Kernighan-Lin.
    Kl,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "sqa")]
    solver: SolverKind,
    /// Reads per sampler call [default: 500 for solve, 1000 for sweep-gamma, 100 for chain-experiment].
    #[arg(long)]
    reads: Option<usize>,
    /// Sweeps per read (sa, sqa).
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    /// Trotter slices (sqa).
    #[arg(long, default_value_t = 20)]
    trotter_slices: usize,
    /// Temperature in normalised units (sqa).
    #[arg(long, default_value_t = 0.05)]
    temperature: f64,
    /// Initial inverse temperature (sa).
    #[arg(long, default_value_t = 0.1)]
    beta_start: f64,
    /// Final inverse temperature (sa).
    #[arg(long, default_value_t = 5.0)]
    beta_end: f64,
}

impl SolverArgs {
    fn build(&self, default_reads: usize) -> Solver {
        let num_reads = self.reads.unwrap_or(default_reads);
        match self.solver {
            SolverKind::Rr => Solver::RoundRobin,
            SolverKind::Sd => Solver::SteepestDescent { num_reads },
            SolverKind::Sa => Solver::SimulatedAnnealing(AnnealParams {
                num_reads,
                num_sweeps: self.sweeps,
                beta_start: self.beta_start,
                beta_end: self.beta_end,
            }),
            SolverKind::Sqa => Solver::SimulatedQuantumAnnealing(SqaParams {
                num_reads,
                num_sweeps: self.sweeps,
                trotter_slices: self.trotter_slices,
                temperature: self.temperature,
                ..SqaParams::default()
            }),
            SolverKind::Bf => Solver::BruteForce,
            SolverKind::Kl => Solver::KernighanLin,
        }
    }
}

#[derive(Args)]
struct SeedArg {
    /// Master seed; the LB_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Number of parts: 2, 4, 8, 16, ...
    #[arg(long, default_value_t = 2)]
    parts: usize,
    /// Lagrange parameter for graph workloads.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[command(flatten)]
    seed: SeedArg,
    /// Directory for partition.json, samples.json and metrics.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0.0)]
    gamma_min: f64,
    #[arg(long, default_value_t = 50.0)]
    gamma_max: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Reference bipartition to count dominating samples against.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[command(flatten)]
    seed: SeedArg,
    /// Directory for points.csv, front.csv and, with a reference, dominance.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 4)]
    chain_length: usize,
    /// Comma-separated chain strengths, as multiples of the largest logical coefficient.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    multipliers: Vec<f64>,
    /// Also run at the uniform-torque-compensation chain strength.
    #[arg(long)]
    include_utc: bool,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    /// Lagrange parameter for graph workloads.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    seed: SeedArg,
    /// CSV of per-repetition rows.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Assignment file: partition.json from `solve`, a JSON array, or whitespace-separated part indices.
    #[arg(long)]
    assignment: PathBuf,
    /// Baseline bipartition; adds performance ratios baseline/assignment.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Label for the run_id column.
    #[arg(long, default_value = "assignment")]
    run_id: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long)]
    input: PathBuf,
    /// Part index (0 or 1) per node, in any accepted assignment format.
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a run stopped.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(loadbal_core::Error),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(e) => match e.class() {
                ErrorClass::Validation => 2,
                ErrorClass::Solver => 3,
            },
            Failure::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<loadbal_core::Error> for Failure {
    fn from(e: loadbal_core::Error) -> Self {
        Failure::Core(e)
    }
}

fn master_seed(arg: &SeedArg) -> Result<u64, Failure> {
    match std::env::var("LB_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "LB_SEED must be a non-negative integer (got {v:?})"
            ))
        }),
        Err(_) => Ok(arg.seed),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Formulate(a) => commands::formulate(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::SweepGamma(a) => commands::sweep_gamma(&a),
        Command::ChainExperiment(a) => commands::chain_experiment(&a),
        Command::Metrics(a) => commands::metrics(&a),
        Command::ImportReference(a) => commands::import_reference(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("loadbal: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

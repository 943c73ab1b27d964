use std::path::PathBuf;
use std::process::ExitCode;

use capacity_lab::experiment::{
    exit_code, list_models, run_experiment, ExperimentConfig, ModelSpec, OpKind, OutputFormat, SizeList, Task,
};
use capacity_lab::spectral::{CheckpointConfig, IterationConfig};
use capacity_lab::transfer::BoundaryDescriptor;
use capacity_lab::Error;
use clap::{Args, Parser, Subcommand};

/// Spectral radii, entropy bounds and exact counts for multi-dimensional constrained channels.
#[derive(Parser)]
#[command(name = "capacity-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Log progress (state counts, iterations, timings) to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Perron root of one operator.
    Spectrum(RunArgs),
    /// Perron roots over a range of sizes, one result row each.
    Sweep(RunArgs),
    /// Rigorous and heuristic entropy bounds.
    Bounds(RunArgs),
    /// Check operator walk counts against brute-force enumeration.
    OracleCheck(RunArgs),
    /// Built-in constraint systems.
    ListModels,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in model name (see list-models).
    #[arg(long, default_value = "hard-square", conflicts_with = "model_file")]
    model: String,
    /// Constraint system file.
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// standard, periodic or one-vertex.
    #[arg(long, default_value = "standard")]
    op: OpKind,
    /// 2-D width: `14`, `2..12` or `3,5,7`.
    #[arg(long)]
    n: Option<SizeList>,
    /// First 3-D slab side.
    #[arg(long)]
    n1: Option<SizeList>,
    /// Second 3-D slab side.
    #[arg(long)]
    n2: Option<SizeList>,
    /// Transverse boundary per axis, e.g. `open,periodic`.
    #[arg(long)]
    boundary: Option<BoundaryDescriptor>,
    /// Significant decimal digits carried by the iteration.
    #[arg(long, default_value_t = 40)]
    precision: u32,
    /// Relative enclosure width to stop at (default 10^-(precision-8)).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: u64,
    /// Checkpoint file for the iteration vector.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Iterations between checkpoint writes.
    #[arg(long, default_value_t = 1000)]
    checkpoint_interval: u64,
    /// Continue from --checkpoint.
    #[arg(long, requires = "checkpoint")]
    resume: bool,
    /// Largest size used by bounds and oracle-check.
    #[arg(long, default_value_t = 14)]
    max_n: usize,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Fill the seconds column.
    #[arg(long)]
    record_time: bool,
}

impl RunArgs {
    fn into_config(self, task: Task) -> ExperimentConfig {
        let model = match self.model_file {
            Some(p) => ModelSpec::File(p),
            None => ModelSpec::Builtin(self.model),
        };
        let mut cfg = ExperimentConfig::new(model, task);
        cfg.op = self.op;
        cfg.n = self.n;
        cfg.n1 = self.n1;
        cfg.n2 = self.n2;
        cfg.boundary = self.boundary;
        cfg.iteration = IterationConfig {
            tolerance: self.tol,
            max_iterations: self.max_iter,
            checkpoint: self.checkpoint.map(|path| CheckpointConfig {
                path,
                interval: self.checkpoint_interval,
                resume: self.resume,
            }),
            ..IterationConfig::with_precision(self.precision)
        };
        cfg.max_n = self.max_n;
        cfg.format = self.format;
        cfg.out = self.out;
        cfg.record_time = self.record_time;
        cfg
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let (task, args) = match cli.command {
        Command::ListModels => {
            print!("{}", list_models());
            return ExitCode::SUCCESS;
        }
        Command::Spectrum(a) => (Task::Spectrum, a),
        Command::Sweep(a) => (Task::Sweep, a),
        Command::Bounds(a) => (Task::Bounds, a),
        Command::OracleCheck(a) => (Task::OracleCheck, a),
    };
    if let Some(w) = args.workers {
        if w == 0 {
            return fail(&Error::InvalidArgument("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().expect("thread pool is configured once");
    }
    let cfg = args.into_config(task);
    match run_experiment(&cfg) {
        Ok(outcome) => {
            if cfg.out.is_none() {
                print!("{}", outcome.document);
            }
            if !outcome.identities_hold {
                eprintln!("error: some counting identities failed");
                return ExitCode::from(1);
            }
            if !outcome.converged {
                eprintln!("error: the iteration limit was reached before the enclosure met the tolerance");
                return ExitCode::from(4);
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e) as u8)
}

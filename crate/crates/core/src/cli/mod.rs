//! Command-line front end: `run`, `sweep` and `verify`.

mod grid;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::engine::{self, derive_seed, run_batch, BatchSummary, RunConfig, TraceSpec, DEFAULT_MAX_ITERATIONS};
use crate::fitness::FitnessKind;
use crate::model::BorderMode;
use crate::verify::{self, VerifyOptions};

pub use grid::{parse_grid, Grid};

pub const SWEEP_HEADER: &str =
    "n,r,K,fitness,borders,replications,success_rate,mean_iterations,std_iterations,median_iterations";
pub const TRACE_HEADER: &str = "iteration,value,frequency";

#[derive(Debug, Parser)]
#[command(name = "rcga", version, about = "Simulate and verify the r-cGA on multi-valued OneMax functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the algorithm once and print the result as key=value lines.
    Run(RunArgs),
    /// Run replicated batches over a grid of n and K and emit a CSV table.
    Sweep(SweepArgs),
    /// Check the model invariants and analysis bounds; exit 0 iff all pass.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Number of positions.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Number of values per position (at least 2).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..))]
    pub r: u64,
    /// Update granularity K (hypothetical population size).
    #[arg(long, default_value_t = 600.0)]
    pub k: f64,
    /// Objective: r-onemax or g-onemax.
    #[arg(long, default_value = "r-onemax")]
    pub fitness: FitnessKind,
    /// Restrict frequencies to [1/((r-1)n), 1-1/n].
    #[arg(long, default_value_t = false)]
    pub borders: bool,
    /// Seed of the run.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration budget.
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iters: u64,
    /// Position whose frequencies are traced (requires --out).
    #[arg(long)]
    pub trace_pos: Option<usize>,
    /// Record the traced row every this many iterations.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub trace_stride: u64,
    /// Path of the trace CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Grid of n as START[:END[:STEP]].
    #[arg(long, default_value = "100")]
    pub n: String,
    /// Grid of K as START[:END[:STEP]].
    #[arg(long, default_value = "200:1000:100")]
    pub k: String,
    /// Number of values per position (at least 2).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..))]
    pub r: u64,
    /// Objective: r-onemax or g-onemax.
    #[arg(long, default_value = "r-onemax")]
    pub fitness: FitnessKind,
    /// Restrict frequencies to [1/((r-1)n), 1-1/n].
    #[arg(long, default_value_t = false)]
    pub borders: bool,
    /// Replications per grid cell.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub replications: u64,
    /// Base seed; cell and replication seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration budget per run.
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iters: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated n values of the analysis grid.
    #[arg(long, value_delimiter = ',', default_value = "10,50,100")]
    pub n: Vec<usize>,
    /// Comma-separated r values of the analysis grid.
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    pub r: Vec<usize>,
    /// Granularity K of the analysis checks.
    #[arg(long, default_value_t = 1000.0)]
    pub k: f64,
    /// Monte Carlo samples for P[D_i = 0].
    #[arg(long, default_value_t = 100_000)]
    pub zero_samples: u64,
    /// Monte Carlo samples for the single-frequency drift.
    #[arg(long, default_value_t = 10_000)]
    pub drift_samples: u64,
    /// Random matrices per grid point for the P[D_i = 0] floor.
    #[arg(long, default_value_t = 20)]
    pub random_matrices: usize,
    /// Algorithm steps per border mode for the model invariants.
    #[arg(long, default_value_t = 10_000)]
    pub model_steps: usize,
    /// Randomized bordered updates for the winner-increment floor.
    #[arg(long, default_value_t = 100_000)]
    pub floor_updates: usize,
    /// Seed of all Monte Carlo streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path of the report (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true, default_value_t = false)]
    pub corrupt_bound: bool,
}

fn border_mode(on: bool) -> BorderMode {
    if on {
        BorderMode::Bordered
    } else {
        BorderMode::Unbordered
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), |v| v.to_string())
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<()> {
    let r = args.r as usize;
    if let Some(pos) = args.trace_pos {
        if pos >= args.n {
            bail!("--trace-pos {pos} must be below --n {}", args.n);
        }
        if args.out.is_none() {
            bail!("--trace-pos requires --out");
        }
    } else if args.out.is_some() {
        bail!("--out is the trace path and requires --trace-pos");
    }
    let mut config = RunConfig::new(args.n, r, args.k, args.fitness)
        .with_borders(border_mode(args.borders))
        .with_seed(args.seed)
        .with_max_iterations(args.max_iters);
    if let Some(position) = args.trace_pos {
        config = config.with_trace(TraceSpec {
            position,
            stride: args.trace_stride,
        });
    }
    let result = engine::run(&config, args.seed)?;
    if let (Some(records), Some(path)) = (&result.trace, &args.out) {
        let mut w = output(Some(path))?;
        writeln!(w, "{TRACE_HEADER}")?;
        for rec in records {
            for (j, p) in rec.row.iter().enumerate() {
                writeln!(w, "{},{j},{p}", rec.iteration)?;
            }
        }
        w.flush()?;
    }
    let max_fitness = config.fitness_function()?.max_fitness_int();
    writeln!(out, "n={}", args.n)?;
    writeln!(out, "r={r}")?;
    writeln!(out, "K={}", args.k)?;
    writeln!(out, "fitness={}", args.fitness)?;
    writeln!(out, "borders={}", args.borders)?;
    writeln!(out, "seed={}", result.seed)?;
    writeln!(out, "found_optimum={}", result.found_optimum)?;
    writeln!(out, "termination={}", result.termination)?;
    writeln!(out, "iterations={}", result.iterations)?;
    writeln!(out, "evaluations={}", result.evaluations)?;
    writeln!(out, "best_fitness={}", result.best_fitness)?;
    writeln!(out, "max_fitness={max_fitness}")?;
    writeln!(out, "negative_clamps={}", result.diagnostics.negative_clamps)?;
    writeln!(out, "lower_clamps={}", result.diagnostics.lower_clamps)?;
    writeln!(out, "renormalizations={}", result.diagnostics.renormalizations)?;
    Ok(())
}

/// One sweep cell with its batch summary.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub k: f64,
    pub summary: BatchSummary,
}

/// Runs every `(n, K)` cell in lexicographic order.
pub fn sweep(args: &SweepArgs) -> Result<Vec<SweepRow>> {
    let ns = parse_grid(&args.n).context("--n")?;
    let ks = parse_grid(&args.k).context("--k")?;
    let ns = ns.integers().context("--n")?;
    let ks = ks.values();
    if ks.iter().any(|&k| !(k > 0.0)) {
        bail!("--k values must be positive");
    }
    let mut rows = Vec::with_capacity(ns.len() * ks.len());
    for &n in &ns {
        for &k in &ks {
            let seed = derive_seed(args.seed, &[n as u64, k.to_bits()]);
            let config = RunConfig::new(n, args.r as usize, k, args.fitness)
                .with_borders(border_mode(args.borders))
                .with_seed(seed)
                .with_replications(args.replications as usize)
                .with_max_iterations(args.max_iters);
            rows.push(SweepRow {
                n,
                k,
                summary: run_batch(&config)?,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let rows = if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build()?
            .install(|| sweep(args))?
    } else {
        sweep(args)?
    };
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in rows {
        let s = &row.summary;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.n,
            args.r,
            row.k,
            args.fitness,
            args.borders,
            s.replications,
            s.success_rate,
            opt(s.mean_iterations),
            opt(s.std_iterations),
            opt(s.median_iterations)
        )?;
    }
    Ok(())
}

/// Writes the report and returns whether every check passed.
pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let opts = VerifyOptions {
        ns: args.n.clone(),
        rs: args.r.clone(),
        k: args.k,
        zero_samples: args.zero_samples,
        drift_samples: args.drift_samples,
        random_matrices: args.random_matrices,
        model_steps: args.model_steps,
        floor_updates: args.floor_updates,
        seed: args.seed,
        corrupt_bounds: args.corrupt_bound,
    };
    let lines = verify::run_checks(&opts)?;
    writeln!(out, "{}", verify::CSV_HEADER)?;
    for line in &lines {
        writeln!(out, "{line}")?;
    }
    Ok(verify::all_pass(&lines))
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Run(args) => {
            let mut out = output(None)?;
            cmd_run(args, &mut out)?;
            out.flush()?;
            Ok(true)
        }
        Command::Sweep(args) => {
            let mut out = output(args.out.as_deref())?;
            cmd_sweep(args, &mut out)?;
            out.flush()?;
            Ok(true)
        }
        Command::Verify(args) => {
            let mut out = output(args.out.as_deref())?;
            let ok = cmd_verify(args, &mut out)?;
            out.flush()?;
            if !ok {
                eprintln!("verification failed");
            }
            Ok(ok)
        }
    }
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

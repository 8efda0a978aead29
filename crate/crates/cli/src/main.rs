use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use supineq::batch::{emit_report, exit_code, load_config, run_batch, Flags, Format};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

/// Checks explicit criteria for weighted supremal and Hardy-type
/// inequalities against numerical lower bounds for the best constants.
#[derive(Debug, Parser)]
#[command(name = "supineq", version)]
struct Args {
    /// Scenario battery (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format; defaults to json with --out and text otherwise
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Base seed of the random oracle stage
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accepted criterion/oracle ratio band, > 1
    #[arg(long)]
    band: Option<f64>,
    /// Left end of every scenario grid
    #[arg(long)]
    grid_eps: Option<f64>,
    /// Right end of every scenario grid
    #[arg(long)]
    grid_max: Option<f64>,
    /// Knots of every scenario grid (at least 16)
    #[arg(long)]
    grid_n: Option<usize>,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
    /// Evaluate criteria with the terms exactly as printed
    #[arg(long)]
    verbatim_paper: bool,
    /// Record per-scenario wall time
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let flags = Flags {
        seed: args.seed,
        band: args.band,
        grid_eps: args.grid_eps,
        grid_max: args.grid_max,
        grid_n: args.grid_n,
        jobs: args.jobs,
        verbatim_paper: args.verbatim_paper,
        timings: args.timings,
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: reading {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let scenarios = match load_config(&text, &flags) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    match run(&args, &scenarios, &flags) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args, scenarios: &[supineq::batch::Scenario], flags: &Flags) -> anyhow::Result<i32> {
    let rows = run_batch(scenarios, flags)?;
    let format = match (args.format, &args.out) {
        (Some(FormatArg::Json), _) | (None, Some(_)) => Format::Json,
        (Some(FormatArg::Text), _) | (None, None) => Format::Text,
    };
    let report = emit_report(&rows, format);
    match &args.out {
        Some(path) => std::fs::write(path, &report).with_context(|| format!("writing {}", path.display()))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&report)?;
        }
    }
    Ok(exit_code(&rows))
}

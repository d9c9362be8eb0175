use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bv_workbench::commands::{self, Command};
use bv_workbench::config::Config;
use bv_workbench::error::{CliError, CliResult};
use bv_workbench::output::Output;
use clap::Parser;

/// Experiments for primes in progressions and the exponent certificate.
#[derive(Parser)]
#[command(
    name = "bvw",
    version,
    after_help = "Exit codes:\n  0  all hard assertions passed\n  1  a hard assertion failed (outputs are still written)\n  2  invalid config value or argument\n  3  unknown config key or malformed config file\n  4  table cache missing, damaged or too small (run `bvw sieve`)\n  5  I/O error"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Config file (`key = value` with `[section]` headers); defaults apply without one
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Overrides run.output_dir
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides run.table_cache
    #[arg(long)]
    table_cache: Option<PathBuf>,
    /// Overrides run.seed
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides run.workers
    #[arg(long)]
    workers: Option<usize>,
}

fn execute(cli: Cli) -> CliResult<()> {
    let mut cfg = match &cli.config {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    if let Some(d) = cli.output_dir {
        cfg.run.output_dir = d;
    }
    if let Some(t) = cli.table_cache {
        cfg.run.table_cache = t;
    }
    if let Some(s) = cli.seed {
        cfg.run.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.run.workers = w;
    }
    if cfg.run.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.run.workers)
            .build_global()
            .map_err(|e| CliError::invalid("run.workers", e.to_string()))?;
    }
    let out = Output::new(&cfg.run.output_dir)?;
    let start = Instant::now();
    let summaries = commands::run(cli.command, &cfg, &out)?;
    let mut failed = 0;
    for s in &summaries {
        println!("== {}", s.name);
        for l in &s.lines {
            println!("   {l}");
        }
        failed += s.failures.len();
    }
    println!("finished in {:.2}s, outputs in {}", start.elapsed().as_secs_f64(), cfg.run.output_dir.display());
    if failed > 0 {
        return Err(CliError::Assertion(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bvw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

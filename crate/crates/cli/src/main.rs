//! `dsarray`: benchmark and verification tool.

mod bench;
mod oracle;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use dsarray::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bench::{BenchConfig, Operation};
use crate::oracle::Oracle;
use crate::report::Verdict;
use crate::verify::Suite;

#[derive(Parser)]
#[command(name = "dsarray", version, about = "Benchmark and verify blocked distributed arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one operation and report task statistics and an oracle verdict.
    Bench {
        #[arg(value_enum)]
        op: Operation,
        #[arg(long, default_value_t = 1024)]
        rows: usize,
        #[arg(long, default_value_t = 1024)]
        cols: usize,
        /// Defaults to min(128, rows).
        #[arg(long)]
        block_rows: Option<usize>,
        /// Defaults to min(128, cols).
        #[arg(long)]
        block_cols: Option<usize>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long, env = "DSARRAY_WORKERS")]
        workers: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run on the row-partitioned subset dataset instead (subset size = --block-rows).
        #[arg(long)]
        baseline: bool,
        /// Also write the report as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write a random dense text matrix with values in [0, 1).
    Gen {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        path: PathBuf,
    },
    /// Check operators and estimators against the in-memory oracle.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, env = "DSARRAY_WORKERS")]
        workers: Option<usize>,
        /// Perturb every oracle result; the suite must then fail.
        #[arg(long, hide = true)]
        corrupt_oracle: bool,
    },
}

fn workers_or_default(workers: Option<usize>) -> Result<usize> {
    match workers {
        Some(0) => anyhow::bail!("--workers must be at least 1"),
        Some(n) => Ok(n),
        None => Ok(dsarray::runtime::default_workers()),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Bench { op, rows, cols, block_rows, block_cols, workers, seed, baseline, json } => {
            let cfg = BenchConfig {
                op,
                rows,
                cols,
                block: (block_rows.unwrap_or(rows.min(128)), block_cols.unwrap_or(cols.min(128))),
                workers: workers_or_default(workers)?,
                seed,
                baseline,
            };
            let report = bench::run(&cfg)?;
            println!("{report}");
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&report)?;
                std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(report.verification.verdict != Verdict::Fail)
        }
        Command::Gen { rows, cols, seed, path } => {
            anyhow::ensure!(rows > 0 && cols > 0, "--rows and --cols must be positive");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = Matrix::from_fn(rows, cols, |_, _| rng.gen::<f64>());
            dsarray::io::write_dense_text(&m, &path).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {rows}x{cols} to {}", path.display());
            Ok(true)
        }
        Command::Verify { suite, workers, corrupt_oracle } => {
            let results = verify::run(suite, workers_or_default(workers)?, Oracle { corrupt: corrupt_oracle });
            let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
            for r in &results {
                let verdict = if r.passed { "pass" } else { "FAIL" };
                println!("{:<width$}  {verdict}  {}", r.name, r.detail);
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} checks, {failed} failed", results.len());
            Ok(failed == 0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use narrevo::{parse_config, run_experiment, write_outputs, HarnessError};

#[derive(Parser)]
#[command(name = "narrevo", version, about = "Evolution of narrative-selecting learners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every replication of a config and write aggregate.csv, manifest.json
    /// and optionally timeseries.csv.
    Simulate {
        /// Config file, or a manifest.json from an earlier run.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed (overrides `master_seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Replications per cell (overrides `reps`).
        #[arg(long)]
        reps: Option<usize>,
        /// Also write timeseries.csv.
        #[arg(long)]
        timeseries: bool,
        /// Worker threads; defaults to one per core.
        #[arg(long, env = "NARREVO_WORKERS")]
        workers: Option<usize>,
    },
    /// Parse and validate a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = parse_config(&config)?;
            println!(
                "{}: ok ({} cells x {} reps)",
                config.display(),
                cfg.cells()?.len(),
                cfg.reps
            );
        }
        Command::Simulate {
            config,
            out,
            seed,
            reps,
            timeseries,
            workers,
        } => {
            let mut cfg = parse_config(&config)?;
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            if let Some(reps) = reps {
                cfg.reps = reps;
            }
            cfg.emit_timeseries |= timeseries;
            let cfg = cfg.validate()?;

            let started = Instant::now();
            let result = run_experiment(&cfg, workers)?;
            let paths = write_outputs(&result, &cfg, &cfg.output_dir)?;
            eprintln!(
                "{} cells x {} reps in {:.1}s",
                result.aggregate.cells.len(),
                cfg.reps,
                started.elapsed().as_secs_f64()
            );
            println!("{}", paths.aggregate.display());
            if let Some(ts) = paths.timeseries {
                println!("{}", ts.display());
            }
            println!("{}", paths.manifest.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors count as validation errors; --help and --version succeed.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use nanomag::config::parse_delay_range;
use nanomag::experiment::training_trace;
use nanomag::{io, report, run_experiment, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "nanomag",
    version,
    about = "Clocked nanomagnet reservoir experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and test every configured task; write results, trace and weights.
    Run {
        config: PathBuf,
        /// Output directory (default: run.output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the training sequence and write its feature trace.
    Trace {
        config: PathBuf,
        /// Trace file (default: <run.output_dir>/trace.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the experiment over a range of delays and print the error table.
    Sweep {
        config: PathBuf,
        /// Delay range, inclusive at both ends, e.g. 0..6.
        #[arg(long = "n", default_value = "0..6")]
        delays: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the per-stage anisotropy table of the configured schedule.
    ScheduleCheck { config: PathBuf },
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("loading config {}", path.display()))
}

fn prepare_dir(cfg: &ExperimentConfig, out: Option<PathBuf>) -> Result<PathBuf> {
    let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.run.output_dir));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let echo = dir.join("config.txt");
    fs::write(&echo, cfg.to_text()).with_context(|| format!("writing {}", echo.display()))?;
    Ok(dir)
}

fn experiment(cfg: &ExperimentConfig, dir: &Path, results_name: &str) -> Result<()> {
    let out = run_experiment(cfg)?;
    io::emit_results_csv(&dir.join(results_name), &out.results)?;
    io::emit_trace_csv(&dir.join("trace.csv"), &out.train.trace)?;
    for (task, w) in &out.weights {
        io::emit_weights(&dir.join(io::weights_file_name(*task)), *task, w)?;
    }
    print!("{}", report::results_table(&out.results));
    if out.nonconverged > 0 {
        eprintln!(
            "warning: {} stage relaxations hit integrator.max_stage_time",
            out.nonconverged
        );
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            let dir = prepare_dir(&cfg, out)?;
            experiment(&cfg, &dir, "results.csv")
        }
        Command::Trace { config, out } => {
            let cfg = load(&config)?;
            let path = match out {
                Some(p) => p,
                None => prepare_dir(&cfg, None)?.join("trace.csv"),
            };
            let run = training_trace(&cfg)?;
            io::emit_trace_csv(&path, &run.trace)?;
            if run.nonconverged > 0 {
                eprintln!(
                    "warning: {} stage relaxations hit integrator.max_stage_time",
                    run.nonconverged
                );
            }
            Ok(())
        }
        Command::Sweep {
            config,
            delays,
            out,
        } => {
            let mut cfg = load(&config)?;
            cfg.run.delays = parse_delay_range(&delays)
                .with_context(|| format!("invalid delay range `{delays}`"))?;
            let dir = prepare_dir(&cfg, out)?;
            experiment(&cfg, &dir, "sweep.csv")
        }
        Command::ScheduleCheck { config } => {
            let cfg = load(&config)?;
            print!("{}", report::schedule_table(&cfg)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

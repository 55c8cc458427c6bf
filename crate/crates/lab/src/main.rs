use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vrjp_lab::oracle::run_oracle;
use vrjp_lab::{run_experiment, validate, ExperimentConfig, LabError, LabResult, Table};

/// Runs experiments on the H^{2|2} environment and the VRJP.
#[derive(Debug, Parser)]
#[command(name = "vrjp-lab", version)]
struct Cli {
    /// Worker threads; results are identical for any value.
    #[arg(long, global = true, env = "VRJP_LAB_WORKERS", default_value_t = default_workers())]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// CSV destination, overriding `output` in the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a config without sampling.
    Validate { config: PathBuf },
    /// Deterministic checks on a graph file.
    Oracle {
        graph: PathBuf,
        /// Comma-separated field `u`, one value per vertex.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        field: Option<Vec<f64>>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

enum Outcome {
    Clean,
    HardFailure,
}

fn report(table: &Table) -> Outcome {
    let failed = table.failed_rows();
    eprintln!("{}: {} rows, {failed} outside tolerance", table.kind, table.rows.len());
    for msg in &table.hard_failures {
        eprintln!("hard failure: {msg}");
    }
    if table.hard_failures.is_empty() {
        Outcome::Clean
    } else {
        Outcome::HardFailure
    }
}

fn emit(table: &Table, output: Option<&Path>) -> LabResult<()> {
    match output {
        Some(path) => {
            let json = table.save(path)?;
            eprintln!("wrote {} and {}", path.display(), json.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write_csv(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn execute(cli: Cli) -> LabResult<Outcome> {
    match cli.command {
        Command::Run { config, output } => {
            let parsed = ExperimentConfig::load(&config)?;
            validate(&parsed)?;
            let table = run_experiment(&parsed, cli.workers)?;
            let target = output
                .or_else(|| parsed.output.clone())
                .unwrap_or_else(|| PathBuf::from("results").join(format!("{}.csv", table.kind)));
            emit(&table, Some(&target))?;
            Ok(report(&table))
        }
        Command::Validate { config } => {
            let parsed = ExperimentConfig::load(&config)?;
            let sizes = validate(&parsed)?;
            println!(
                "{}: {} instance(s), vertex counts {sizes:?}, {} seed(s)",
                parsed.experiment.kind(),
                sizes.len(),
                parsed.seeds.len()
            );
            Ok(Outcome::Clean)
        }
        Command::Oracle { graph, field, output } => {
            let text = std::fs::read_to_string(&graph)?;
            let g = text.parse().map_err(|e| LabError::Config(format!("{}: {e}", graph.display())))?;
            let table = run_oracle(&g, field.as_deref())?;
            emit(&table, output.as_deref())?;
            Ok(report(&table))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::HardFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}

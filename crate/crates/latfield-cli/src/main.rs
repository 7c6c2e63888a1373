use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use latfield_cli::{inspect, run_path, workers_from_env, CliError};

/// Exact property suites for Abelian gauge field phase spaces on cubical lattices.
#[derive(Parser)]
#[command(name = "latfield", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites of an experiment configuration.
    Run {
        config: PathBuf,
        /// Write reports here instead of the configured directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Summarize an object description.
    Describe {
        object: PathBuf,
        /// Also build the phase spaces and report their dimensions.
        #[arg(long)]
        phase_space: bool,
    },
    /// Print the retarded, advanced and causal propagator of one cell, e.g. `v3,v2`.
    DumpGreen { object: PathBuf, cell: String },
}

/// Print a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, output_dir } => {
            let report = run_path(&config, output_dir.as_deref(), workers_from_env()?)?;
            emit(&format!("{}: {} suites passed", report.config, report.suites.len()));
        }
        Command::Describe { object, phase_space } => {
            let value = inspect::describe(inspect::load_object(&object)?, phase_space)?;
            emit(&serde_json::to_string_pretty(&value)?);
        }
        Command::DumpGreen { object, cell } => {
            let value = inspect::dump_green(&inspect::load_object(&object)?, &cell)?;
            emit(&serde_json::to_string_pretty(&value)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

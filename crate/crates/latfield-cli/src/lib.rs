//! Batch harness: loads an experiment configuration, runs the property suites
//! concurrently and writes one JSON report per suite, a run summary and a CSV
//! table of every reported quantity.

pub mod config;
pub mod error;
pub mod inspect;
pub mod report;
pub mod suites;
pub mod workspace;

use std::path::Path;

use rayon::prelude::*;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use report::{RunReport, SuiteReport};

/// Environment variable holding the number of worker threads.
pub const WORKERS_ENV: &str = "LATFIELD_WORKERS";

/// Worker count from the environment, defaulting to the available parallelism.
pub fn workers_from_env() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Seed of the suite at position `index`.
pub fn suite_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Run every suite, write the reports under `output_dir`, and fail with the
/// first failing suite if any asserted identity does not hold.
pub fn run(config: &ExperimentConfig, output_dir: &Path, workers: usize) -> Result<RunReport, CliError> {
    let ws = workspace::Workspace::new(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
    let reports: Vec<SuiteReport> = pool.install(|| {
        config.suites.par_iter().enumerate().map(|(i, s)| suites::run_suite(&ws, s, suite_seed(config.seed, i))).collect()
    });
    let run = RunReport::new(&config.name, config.seed, &reports);
    report::write_reports(output_dir, &run, &reports)?;
    if let Some(s) = reports.iter().find(|s| s.first_failure.is_some()) {
        return Err(CliError::SuiteFailure { suite: s.suite.clone(), witness: s.first_failure.clone().unwrap_or_default() });
    }
    Ok(run)
}

/// Load a configuration file and run it into its configured directory (or `output_dir` when given).
pub fn run_path(path: &Path, output_dir: Option<&Path>, workers: usize) -> Result<RunReport, CliError> {
    let config = ExperimentConfig::load(path)?;
    let dir = output_dir.map(Path::to_path_buf).unwrap_or_else(|| config.output_dir.clone());
    run(&config, &dir, workers)
}

//! Batch runner for pseudo-Choi Hamiltonian learning experiments.
//!
//! A run is described by one JSON [`ExperimentConfig`]. See `docs/config.md`
//! for the schema.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod sweep;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, Mode};
pub use error::{CliError, ErrorKind};
pub use experiment::{run_single, ResolvedBudget, RunOutcome};
pub use sweep::{run_sweep, SweepRow};

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    ExperimentConfig::from_json(&text)
}

/// Apply command-line overrides and return the output directory.
pub fn resolve(cfg: &mut ExperimentConfig, seed: Option<u64>, out: Option<PathBuf>) -> PathBuf {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    out.or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Run a single experiment and write `report.json` and `summary.csv`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, CliError> {
    let outcome = run_single(cfg, cfg.seed)?;
    output::write_run(out, cfg, &outcome)?;
    Ok(outcome)
}

/// Run a sweep and write `sweep.csv`, `sweep.json` and per-point reports.
pub fn run_sweep_to(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<SweepRow>, CliError> {
    let rows = run_sweep(cfg, Some(out))?;
    sweep::write_sweep(out, cfg, &rows)?;
    Ok(rows)
}

/// Run `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Config("--threads must be positive".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

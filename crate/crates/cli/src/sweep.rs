use std::path::Path;
use std::time::Instant;

use choi_core::rng::{derive_seed, domain};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Mode, RobustnessConfig};
use crate::error::CliError;
use crate::experiment::{run_single, RunOutcome};
use crate::output::{fmt_f64, fmt_opt, fmt_opt_f64, report_json, write_atomic, Stamp};

/// Axis values of one grid point. Unswept axes are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct GridPoint {
    pub samples: Option<usize>,
    pub t: Option<f64>,
    pub epsilon: Option<f64>,
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub point: usize,
    pub repeat: usize,
    pub axes: GridPoint,
    pub l2_error: Option<f64>,
    pub linf_error: Option<f64>,
    /// Snapshots used.
    pub samples: Option<usize>,
    /// Preparation attempts.
    pub queries: Option<u64>,
    pub wall_ms: f64,
    pub seed: u64,
    pub error: Option<String>,
    pub exit_code: Option<i32>,
    #[serde(skip)]
    pub outcome: Option<RunOutcome>,
}

fn axis<T: Copy>(values: &[T]) -> Vec<Option<T>> {
    if values.is_empty() {
        vec![None]
    } else {
        values.iter().copied().map(Some).collect()
    }
}

/// Cartesian product of the axes, in the order samples, t, epsilon, omega
/// with the last axis varying fastest.
pub fn grid(cfg: &ExperimentConfig) -> Result<Vec<GridPoint>, CliError> {
    let s = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("no sweep section".into()))?;
    let mut points = Vec::new();
    for &samples in &axis(&s.samples) {
        for &t in &axis(&s.t) {
            for &epsilon in &axis(&s.epsilon) {
                for &omega in &axis(&s.omega) {
                    points.push(GridPoint {
                        samples,
                        t,
                        epsilon,
                        omega,
                    });
                }
            }
        }
    }
    Ok(points)
}

/// The single-run config for one grid point.
pub fn point_config(cfg: &ExperimentConfig, p: &GridPoint) -> Result<ExperimentConfig, CliError> {
    let s = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("no sweep section".into()))?;
    let mut c = cfg.clone();
    c.mode = s.base;
    c.sweep = None;
    if let Some(n) = p.samples {
        c.budget.samples = Some(n);
    }
    if let Some(t) = p.t {
        c.budget.t = Some(t);
    }
    if let Some(e) = p.epsilon {
        c.budget.epsilon = e;
    }
    if let Some(w) = p.omega {
        c.robustness
            .get_or_insert_with(RobustnessConfig::default)
            .omega = w;
    }
    c.validate()?;
    Ok(c)
}

fn run_point(
    cfg: &ExperimentConfig,
    p: &GridPoint,
    seed: u64,
) -> Result<(ExperimentConfig, RunOutcome), CliError> {
    let mut c = point_config(cfg, p)?;
    c.seed = seed;
    let outcome = run_single(&c, seed)?;
    Ok((c, outcome))
}

/// Run every grid point `repeats` times on the current rayon pool. Failures
/// are recorded in their row and do not stop the sweep. When `out` is given
/// each successful point's report is written to `points/`.
pub fn run_sweep(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Vec<SweepRow>, CliError> {
    if cfg.mode != Mode::Sweep {
        return Err(CliError::Config("the sweep runner needs sweep mode".into()));
    }
    let repeats = cfg.sweep.as_ref().map_or(1, |s| s.repeats);
    let points = grid(cfg)?;
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..repeats).map(move |r| (p, r)))
        .collect();
    jobs.into_par_iter()
        .map(|(p, r)| {
            let seed = derive_seed(cfg.seed, domain::SWEEP_POINT, (p * repeats + r) as u64);
            let start = Instant::now();
            let result = run_point(cfg, &points[p], seed);
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let mut row = SweepRow {
                point: p,
                repeat: r,
                axes: points[p],
                l2_error: None,
                linf_error: None,
                samples: None,
                queries: None,
                wall_ms,
                seed,
                error: None,
                exit_code: None,
                outcome: None,
            };
            match result {
                Ok((point_cfg, outcome)) => {
                    if let Some(dir) = out {
                        let path = dir.join("points").join(format!("point-{p:04}-{r:04}.json"));
                        write_atomic(&path, report_json(&point_cfg, &outcome).as_bytes())?;
                    }
                    row.l2_error = outcome.report.l2_error;
                    row.linf_error = outcome.report.linf_error;
                    row.samples = outcome.report.samples_used;
                    row.queries = outcome.report.queries_used;
                    row.outcome = Some(outcome);
                }
                Err(e) => {
                    row.exit_code = Some(e.exit_code());
                    row.error = Some(e.to_string());
                }
            }
            Ok(row)
        })
        .collect()
}

const SWEEP_HEADER: [&str; 17] = [
    "point",
    "repeat",
    "samples_axis",
    "t",
    "epsilon",
    "omega",
    "l2_error",
    "linf_error",
    "N",
    "N_tilde",
    "wall_ms",
    "seed",
    "error",
    "tool_version",
    "config_hash",
    "root_seed",
    "exit_code",
];

pub fn sweep_csv(cfg: &ExperimentConfig, rows: &[SweepRow]) -> Result<Vec<u8>, CliError> {
    let stamp = Stamp::new(cfg);
    let csv_err = |e: csv::Error| CliError::io("sweep.csv", std::io::Error::other(e));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record([
            row.point.to_string(),
            row.repeat.to_string(),
            fmt_opt(row.axes.samples),
            fmt_opt_f64(row.axes.t),
            fmt_opt_f64(row.axes.epsilon),
            fmt_opt_f64(row.axes.omega),
            fmt_opt_f64(row.l2_error),
            fmt_opt_f64(row.linf_error),
            fmt_opt(row.samples),
            fmt_opt(row.queries),
            fmt_f64(row.wall_ms),
            row.seed.to_string(),
            row.error.clone().unwrap_or_default(),
            stamp.version.to_string(),
            stamp.config_hash.clone(),
            stamp.seed.to_string(),
            fmt_opt(row.exit_code),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::io("sweep.csv", e.into_error()))
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    #[serde(flatten)]
    stamp: Stamp,
    config: &'a ExperimentConfig,
    points: Vec<GridPoint>,
    failures: usize,
}

pub fn write_sweep(dir: &Path, cfg: &ExperimentConfig, rows: &[SweepRow]) -> Result<(), CliError> {
    let doc = SweepDocument {
        stamp: Stamp::new(cfg),
        config: cfg,
        points: grid(cfg)?,
        failures: rows.iter().filter(|r| r.error.is_some()).count(),
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("sweep document serializes");
    json.push('\n');
    write_atomic(&dir.join("sweep.json"), json.as_bytes())?;
    write_atomic(&dir.join("sweep.csv"), &sweep_csv(cfg, rows)?)
}

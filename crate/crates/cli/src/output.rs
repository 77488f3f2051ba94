use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiment::RunOutcome;

pub const TOOL: &str = "choi-learn";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamped on every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stamp {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

impl Stamp {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Stamp {
            tool: TOOL,
            version: VERSION,
            config_hash: cfg.hash(),
            seed: cfg.seed,
        }
    }
}

/// Full-precision float for CSV cells.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Write through a temporary file and rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e| CliError::io(path.display().to_string(), e);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    #[serde(flatten)]
    stamp: &'a Stamp,
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    outcome: &'a RunOutcome,
}

pub fn report_json(cfg: &ExperimentConfig, outcome: &RunOutcome) -> String {
    let stamp = Stamp::new(cfg);
    let mut s = serde_json::to_string_pretty(&ReportDocument {
        stamp: &stamp,
        config: cfg,
        outcome,
    })
    .expect("report serializes");
    s.push('\n');
    s
}

const SUMMARY_HEADER: [&str; 17] = [
    "tool",
    "version",
    "config_hash",
    "seed",
    "mode",
    "flavor",
    "n",
    "m",
    "samples",
    "groups",
    "queries",
    "l2_error",
    "linf_error",
    "norm_estimate",
    "residual_chi",
    "chi_sq_hat",
    "chi_flagged",
];

pub fn summary_csv(cfg: &ExperimentConfig, outcome: &RunOutcome) -> Result<Vec<u8>, CliError> {
    let stamp = Stamp::new(cfg);
    let r = &outcome.report;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::io("summary.csv", std::io::Error::other(e));
    w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
    let mode = serde_json::to_value(outcome.mode).expect("mode serializes");
    let flavor = serde_json::to_value(r.flavor).expect("flavor serializes");
    w.write_record([
        stamp.tool.to_string(),
        stamp.version.to_string(),
        stamp.config_hash,
        stamp.seed.to_string(),
        mode.as_str().unwrap_or_default().to_string(),
        flavor.as_str().unwrap_or_default().to_string(),
        outcome.num_qubits.to_string(),
        r.terms.len().to_string(),
        fmt_opt(r.samples_used),
        fmt_opt(outcome.budget.groups),
        fmt_opt(r.queries_used),
        fmt_opt_f64(r.l2_error),
        fmt_opt_f64(r.linf_error),
        fmt_f64(r.norm_estimate),
        fmt_opt_f64(r.residual_chi),
        fmt_opt_f64(r.chi_sq_hat),
        fmt_opt(r.chi_flagged),
    ])
    .map_err(csv_err)?;
    w.into_inner()
        .map_err(|e| CliError::io("summary.csv", e.into_error()))
}

pub fn write_run(dir: &Path, cfg: &ExperimentConfig, outcome: &RunOutcome) -> Result<(), CliError> {
    write_atomic(
        &dir.join("report.json"),
        report_json(cfg, outcome).as_bytes(),
    )?;
    write_atomic(&dir.join("summary.csv"), &summary_csv(cfg, outcome)?)
}

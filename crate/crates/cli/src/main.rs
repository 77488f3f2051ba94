use std::path::PathBuf;
use std::process::ExitCode;

use choi_learn::{
    load_config, resolve, run_experiment, run_sweep_to, with_threads, CliError, Mode,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "choi-learn",
    version,
    about = "Hamiltonian learning experiments from pseudo-Choi states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Root seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment, or a sweep when the config is in sweep mode.
    Run(RunArgs),
    /// Run a sweep.
    Sweep(RunArgs),
    /// Check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            Ok(serde_json::json!({ "valid": true, "config_hash": cfg.hash() }).to_string())
        }
        Command::Run(args) => launch(args, false),
        Command::Sweep(args) => launch(args, true),
    }
}

fn launch(args: RunArgs, sweep_only: bool) -> Result<String, CliError> {
    let mut cfg = load_config(&args.config)?;
    let out = resolve(&mut cfg, args.seed, args.out);
    if sweep_only && cfg.mode != Mode::Sweep {
        return Err(CliError::Config(
            "the sweep command needs a config in sweep mode".into(),
        ));
    }
    with_threads(args.threads, || {
        if cfg.mode == Mode::Sweep {
            let rows = run_sweep_to(&cfg, &out)?;
            let failures = rows.iter().filter(|r| r.error.is_some()).count();
            Ok(serde_json::json!({
                "status": "ok",
                "rows": rows.len(),
                "failures": failures,
                "output": out.join("sweep.csv"),
                "config_hash": cfg.hash(),
                "seed": cfg.seed,
            })
            .to_string())
        } else {
            let outcome = run_experiment(&cfg, &out)?;
            Ok(serde_json::json!({
                "status": "ok",
                "l2_error": outcome.report.l2_error,
                "output": out.join("report.json"),
                "config_hash": cfg.hash(),
                "seed": cfg.seed,
            })
            .to_string())
        }
    })?
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

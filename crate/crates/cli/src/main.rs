//! `fracwave` command-line front end.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracwave::config::RawConfig;
use fracwave::{exec, runner, Error};

#[derive(Parser)]
#[command(
    name = "fracwave",
    version,
    about = "Mixed fractional NLS: ground states, evolution and blow-up diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for a ground state at mass c or multiplier lambda (omit --s2 for
    /// the single-operator profile).
    Groundstate(Flags),
    /// Evolve an initial field.
    Evolve(Flags),
    /// Predict global existence or blow-up for an initial field.
    Classify(Flags),
    /// Ground-state energies along a list of masses.
    GammaSweep(Flags),
    /// Evolve dilations of u_c along its scaling fiber.
    Instability(Flags),
    /// Run the analytic self-check suite.
    Validate(Flags),
}

/// Each flag mirrors the config key of the same name; flags win over the file.
#[derive(Args, Clone, Debug, Default)]
struct Flags {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    s1: Option<f64>,
    #[arg(long)]
    s2: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    /// Grid as "n,L".
    #[arg(long)]
    grid: Option<String>,
    /// Per-λ grid as "widths_per_box,points_per_width".
    #[arg(long)]
    scaled_grid: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Time horizon.
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    adapt: bool,
    #[arg(long)]
    blowup_factor: Option<f64>,
    #[arg(long)]
    monitor_every: Option<usize>,
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    tau_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    c_list: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the solved field (groundstate).
    #[arg(long)]
    field: Option<PathBuf>,
    /// Initial field (.frw).
    #[arg(long)]
    init: Option<PathBuf>,
    /// Single-operator ground state φ (.frw).
    #[arg(long)]
    phi: Option<PathBuf>,
    /// Directory for trajectory snapshots.
    #[arg(long)]
    snapshots: Option<PathBuf>,
}

impl Flags {
    fn into_raw(self, task: &str) -> RawConfig {
        RawConfig {
            task: Some(task.to_string()),
            s1: self.s1,
            s2: self.s2,
            p: self.p,
            dim: self.dim,
            grid: self.grid,
            scaled_grid: self.scaled_grid,
            c: self.c,
            lambda: self.lambda,
            t_final: self.t_final,
            dt: self.dt,
            adapt: self.adapt.then_some(true),
            blowup_factor: self.blowup_factor,
            monitor_every: self.monitor_every,
            snapshot_every: self.snapshot_every,
            tau_list: self.tau_list,
            c_list: self.c_list,
            seed: self.seed,
            out: self.out,
            field: self.field,
            init: self.init,
            phi: self.phi,
            snapshots: self.snapshots,
        }
    }
}

fn fail(err: &Error) -> ExitCode {
    let body = serde_json::json!({ "error": err.kind(), "message": err.to_string() });
    eprintln!("{body}");
    ExitCode::from(if matches!(err, Error::Config(_)) {
        2
    } else {
        1
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("FRACWAVE_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = exec::init_threads(n) {
                    log::warn!("FRACWAVE_THREADS ignored: {e}");
                }
            }
            _ => {
                return fail(&Error::Config(format!(
                    "FRACWAVE_THREADS: expected a positive integer, got '{v}'"
                )))
            }
        }
    }
    let (task, flags) = match cli.command {
        Command::Groundstate(f) => ("groundstate", f),
        Command::Evolve(f) => ("evolve", f),
        Command::Classify(f) => ("classify", f),
        Command::GammaSweep(f) => ("gamma-sweep", f),
        Command::Instability(f) => ("instability", f),
        Command::Validate(f) => ("validate", f),
    };
    let file = match &flags.config {
        Some(path) => match RawConfig::load(path) {
            Ok(raw) => raw,
            Err(e) => return fail(&e),
        },
        None => RawConfig::default(),
    };
    let resolved = file.overlay(flags.into_raw(task)).resolve();
    let cfg = match resolved {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match runner::run(&cfg) {
        Ok(outcome) => {
            let body = match &outcome.table {
                Some(table) => table.clone(),
                None => serde_json::to_string_pretty(&outcome.report).unwrap_or_default() + "\n",
            };
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}

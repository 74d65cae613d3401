//! Task dispatch and artifact persistence. Every run writes `manifest.json`
//! listing each output with its SHA-256, the resolved config and the crate
//! version. Outputs contain no timestamps, so equal configs give
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, Task};
use crate::diagnostics;
use crate::error::{Error, Result};
use crate::evolution::{self, StepPolicy};
use crate::exec::{self, Execution};
use crate::field::Field;
use crate::groundstate::{self, GroundStateRecord, PetviashviliOptions, ShootOptions};
use crate::validation;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub version: String,
    pub config: RunConfig,
    pub files: Vec<ManifestEntry>,
}

/// What a run produced. `report` is the task's JSON summary, also printed by
/// the CLI.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub report: serde_json::Value,
    /// Validation table text, for the `validate` task.
    pub table: Option<String>,
    /// False when a check of the `validate` task failed.
    pub success: bool,
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let probe = dir.join(".fracwave-write-test");
        fs::write(&probe, b"").map_err(|e| {
            Error::Config(format!(
                "out: directory {} not writable: {e}",
                dir.display()
            ))
        })?;
        fs::remove_file(&probe)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body)?;
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }

    fn field(&mut self, path: PathBuf, u: &Field) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        u.save(&path)?;
        self.files.push(path);
        Ok(())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn manifest_path(dir: &Path, file: &Path) -> String {
    file.strip_prefix(dir)
        .unwrap_or(file)
        .to_string_lossy()
        .replace('\\', "/")
}

fn write_manifest(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let mut files = Vec::with_capacity(w.files.len());
    for f in &w.files {
        let bytes = fs::read(f)?;
        files.push(ManifestEntry {
            path: manifest_path(&w.dir, f),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
    }
    let manifest = Manifest {
        version: VERSION.into(),
        config: cfg.clone(),
        files,
    };
    let mut body = serde_json::to_string_pretty(&manifest)?;
    body.push('\n');
    let path = w.dir.join("manifest.json");
    fs::write(&path, body)?;
    w.files.push(path);
    Ok(())
}

fn record_summary(r: &GroundStateRecord) -> serde_json::Value {
    json!({
        "lambda": r.lambda,
        "mass": r.mass,
        "energy": r.energy,
        "q_residual": r.q_residual,
        "el_residual": r.el_residual,
        "converged": r.converged,
        "iterations": r.iterations,
    })
}

fn policy(cfg: &RunConfig, snapshots: bool) -> StepPolicy {
    StepPolicy {
        dt0: cfg.dt,
        adapt: cfg.adapt,
        dt_floor: (1e-6 * cfg.dt).min(1e-9),
        blowup_gradient_factor: cfg.blowup_factor,
        monitor_every: cfg.monitor_every,
        snapshot_every: if snapshots { cfg.snapshot_every } else { 0 },
        virial_radius: None,
    }
}

fn load_field(path: &Option<PathBuf>, key: &str) -> Result<Field> {
    let path = path
        .as_ref()
        .ok_or_else(|| Error::Config(format!("{key}: missing")))?;
    Field::load(path)
}

/// The mixed solution a run starts from: mass shooting when `c` is set,
/// otherwise a fixed-λ solve.
fn mixed_state(cfg: &RunConfig) -> Result<GroundStateRecord> {
    let model = cfg.model()?;
    match (cfg.c, cfg.lambda) {
        (Some(c), _) => {
            groundstate::mass_shoot(&model, c, cfg.grid_choice(), &ShootOptions::default())
        }
        (None, Some(lambda)) => {
            let grid = cfg.grid_choice().grid_for(&model, lambda)?;
            groundstate::solve_mixed_fixed_lambda(
                &model,
                lambda,
                grid,
                None,
                &PetviashviliOptions::default(),
            )
        }
        (None, None) => Err(Error::Config("c: missing (or give lambda)".into())),
    }
}

/// Dispatch `cfg.task` and persist its artifacts under `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let mut w = Writer::new(&cfg.out)?;
    let mut table = None;
    let mut success = true;
    let report = match cfg.task {
        Task::Groundstate => {
            let rec = if cfg.model.is_some() {
                mixed_state(cfg)?
            } else {
                groundstate::solve_single_fractional(
                    cfg.s1,
                    cfg.p,
                    cfg.grid,
                    None,
                    &PetviashviliOptions::default(),
                )?
            };
            w.json("record.json", &rec)?;
            let field_path = cfg
                .field
                .clone()
                .unwrap_or_else(|| cfg.out.join("field.frw"));
            w.field(field_path, &rec.field)?;
            record_summary(&rec)
        }
        Task::Evolve => {
            let model = cfg.model()?;
            let psi0 = load_field(&cfg.init, "init")?;
            let pol = policy(cfg, cfg.snapshots.is_some());
            let traj = evolution::evolve(&psi0, cfg.t_final, &pol, &model)?;
            w.text("traj.csv", &traj.to_csv())?;
            w.json("trajectory.json", &traj)?;
            if let Some(dir) = &cfg.snapshots {
                for (i, (_, u)) in traj.snapshots.iter().enumerate() {
                    w.field(dir.join(format!("snap_{i:05}.frw")), u)?;
                }
            }
            json!({
                "verdict": traj.verdict,
                "final_time": traj.final_time(),
                "steps": traj.steps,
                "max_mass_drift": traj.max_mass_drift(),
                "energy_drift_per_time": traj.energy_drift_per_time(),
                "max_gradient_growth": traj.max_gradient_growth(),
                "outside_theory": traj.outside_theory,
            })
        }
        Task::Classify => {
            let model = cfg.model()?;
            let psi0 = load_field(&cfg.init, "init")?;
            let phi_field = load_field(&cfg.phi, "phi")?;
            // re-polish φ so its residuals are known
            let phi = groundstate::solve_single_fractional(
                model.s1,
                model.p,
                phi_field.grid(),
                Some(&phi_field),
                &PetviashviliOptions::default(),
            )?;
            let class = diagnostics::classify(&psi0, &phi, &model)?;
            let report = json!({
                "classification": class,
                "phi": record_summary(&phi),
            });
            w.json("verdict.json", &report)?;
            report
        }
        Task::GammaSweep => {
            let model = cfg.model()?;
            let branch = groundstate::gamma_branch(
                &model,
                &cfg.c_list,
                cfg.grid_choice(),
                &ShootOptions::default(),
            )?;
            let mono = branch.monotonicity(1e-6);
            w.text("branch.csv", &branch.to_csv())?;
            let report = json!({
                "samples": branch.samples,
                "skipped": branch.skipped,
                "monotonicity": mono,
                "nonincreasing": mono.nonincreasing(),
            });
            w.json("monotonicity.json", &report)?;
            report
        }
        Task::Instability => {
            let model = cfg.model()?;
            let uc = mixed_state(cfg)?;
            w.json("uc_record.json", &uc)?;
            let pol = policy(cfg, false);
            let runs = exec::map(Execution::default(), &cfg.tau_list, |&tau| {
                diagnostics::instability_experiment(&uc, tau, cfg.t_final, &pol, &model)
            });
            let mut reports = Vec::with_capacity(runs.len());
            for r in runs {
                reports.push(r?);
            }
            let mut csv = String::from(
                "tau,energy_v,energy_uc,q_v,h_s1_distance,max_growth,final_time,verdict\n",
            );
            for (i, r) in reports.iter().enumerate() {
                csv.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:?}\n",
                    r.tau,
                    r.energy_v,
                    r.energy_uc,
                    r.q_v,
                    r.h_s1_distance,
                    r.max_growth,
                    r.final_time,
                    r.verdict
                ));
                w.text(&format!("traj_tau_{i}.csv"), &r.trajectory.to_csv())?;
            }
            w.text("instability.csv", &csv)?;
            let report = json!({ "uc": record_summary(&uc), "runs": reports });
            w.json("instability.json", &report)?;
            report
        }
        Task::Validate => {
            let checks = validation::run_suite(cfg.seed)?;
            success = checks.iter().all(|c| c.passed);
            let text = validation::format_table(&checks);
            w.text("validation.txt", &text)?;
            w.json("validation.json", &checks)?;
            table = Some(text);
            json!({ "passed": success, "checks": checks })
        }
    };
    write_manifest(cfg, &mut w)?;
    Ok(RunOutcome {
        files: w.files,
        report,
        table,
        success,
    })
}

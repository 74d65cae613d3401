//! Run configuration: a flat TOML file whose keys mirror the CLI flags one to
//! one. Flags override file values; unknown keys are errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{self, ModelParams};
use crate::grid::GridSpec;
use crate::groundstate::{GridChoice, ScaledGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Groundstate,
    Evolve,
    Classify,
    GammaSweep,
    Instability,
    Validate,
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "groundstate" => Task::Groundstate,
            "evolve" => Task::Evolve,
            "classify" => Task::Classify,
            "gamma-sweep" => Task::GammaSweep,
            "instability" => Task::Instability,
            "validate" => Task::Validate,
            other => {
                return Err(Error::Config(format!(
                    "task: unknown task '{other}' (expected groundstate, evolve, classify, gamma-sweep, instability or validate)"
                )))
            }
        })
    }
}

/// Every key is optional; [`RawConfig::resolve`] applies defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RawConfig {
    pub task: Option<String>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub p: Option<f64>,
    pub dim: Option<usize>,
    /// "n,L"
    pub grid: Option<String>,
    /// "widths_per_box,points_per_width"; replaces `grid` for mass shooting.
    pub scaled_grid: Option<String>,
    pub c: Option<f64>,
    pub lambda: Option<f64>,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub adapt: Option<bool>,
    pub blowup_factor: Option<f64>,
    pub monitor_every: Option<usize>,
    pub snapshot_every: Option<usize>,
    pub tau_list: Option<Vec<f64>>,
    pub c_list: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub field: Option<PathBuf>,
    pub init: Option<PathBuf>,
    pub phi: Option<PathBuf>,
    pub snapshots: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string() + &span_hint(&e)))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Values set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RawConfig) -> Self {
        overlay!(self, top; task, s1, s2, p, dim, grid, scaled_grid, c, lambda, t_final, dt,
            adapt, blowup_factor, monitor_every, snapshot_every, tau_list, c_list, seed, out,
            field, init, phi, snapshots);
        self
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let task: Task = self
            .task
            .as_deref()
            .ok_or_else(|| Error::Config("task: missing".into()))?
            .parse()?;
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::Config(format!("{key}: missing (required by task {task:?})")))
        };
        let s1 = if task == Task::Validate {
            self.s1.unwrap_or(1.0)
        } else {
            need(self.s1, "s1")?
        };
        let p = if task == Task::Validate {
            self.p.unwrap_or(4.0)
        } else {
            need(self.p, "p")?
        };
        let dim = self.dim.unwrap_or(1);
        let grid = match &self.grid {
            Some(s) => parse_grid(s, dim)?,
            None => GridSpec::desk_default(dim).map_err(|e| Error::Config(format!("dim: {e}")))?,
        };
        let scaled_grid = self
            .scaled_grid
            .as_deref()
            .map(|s| parse_scaled(s, dim))
            .transpose()?;
        // exponent gates
        if !(s1 > 0.0 && s1 <= 1.0) {
            return Err(Error::Config(format!("s1: need 0 < s1 <= 1, got {s1}")));
        }
        functionals::check_exponent(p, s1, dim).map_err(|e| Error::Config(format!("p: {e}")))?;
        let model = match self.s2 {
            Some(s2) => Some(
                ModelParams::new(s1, s2, p, dim).map_err(|e| Error::Config(format!("s2: {e}")))?,
            ),
            None => None,
        };
        let needs_s2 = matches!(
            task,
            Task::Evolve | Task::Classify | Task::GammaSweep | Task::Instability
        );
        if needs_s2 && model.is_none() {
            return Err(Error::Config(format!(
                "s2: missing (required by task {task:?})"
            )));
        }
        let positive = |v: Option<f64>, key: &str| -> Result<Option<f64>> {
            match v {
                Some(x) if !(x > 0.0 && x.is_finite()) => {
                    Err(Error::Config(format!("{key}: must be positive, got {x}")))
                }
                _ => Ok(v),
            }
        };
        let c = positive(self.c, "c")?;
        let lambda = positive(self.lambda, "lambda")?;
        if c.is_some() && lambda.is_some() {
            return Err(Error::Config("c, lambda: give one, not both".into()));
        }
        match task {
            Task::Groundstate if model.is_some() && c.is_none() && lambda.is_none() => {
                return Err(Error::Config("c: missing (or give lambda)".into()))
            }
            Task::Instability if c.is_none() && lambda.is_none() => {
                return Err(Error::Config("c: missing (or give lambda)".into()))
            }
            Task::Evolve | Task::Classify if self.init.is_none() => {
                return Err(Error::Config(format!(
                    "init: missing (required by task {task:?})"
                )))
            }
            Task::Classify if self.phi.is_none() => {
                return Err(Error::Config(
                    "phi: missing (required by task Classify)".into(),
                ))
            }
            Task::GammaSweep if self.c_list.as_ref().is_none_or(|l| l.is_empty()) => {
                return Err(Error::Config("c-list: missing or empty".into()))
            }
            _ => {}
        }
        let t_final = positive(self.t_final, "T")?.unwrap_or(10.0);
        let dt = positive(self.dt, "dt")?.unwrap_or(1e-3);
        let blowup_factor = self.blowup_factor.unwrap_or(50.0);
        if !(blowup_factor > 1.0) {
            return Err(Error::Config(format!(
                "blowup-factor: must exceed 1, got {blowup_factor}"
            )));
        }
        let tau_list = self
            .tau_list
            .clone()
            .unwrap_or_else(|| vec![1.05, 1.1, 1.2]);
        if let Some(t) = tau_list.iter().find(|t| !(**t > 1.0 && **t <= 2.0)) {
            return Err(Error::Config(format!(
                "tau-list: entries must lie in (1, 2], got {t}"
            )));
        }
        if let Some(c) = self.c_list.iter().flatten().find(|c| !(**c > 0.0)) {
            return Err(Error::Config(format!(
                "c-list: entries must be positive, got {c}"
            )));
        }
        Ok(RunConfig {
            task,
            s1,
            s2: self.s2,
            p,
            dim,
            model,
            grid,
            scaled_grid,
            c,
            lambda,
            t_final,
            dt,
            adapt: self.adapt.unwrap_or(false),
            blowup_factor,
            monitor_every: self.monitor_every.unwrap_or(10).max(1),
            snapshot_every: self.snapshot_every.unwrap_or(10),
            tau_list,
            c_list: self.c_list.clone().unwrap_or_default(),
            seed: self.seed.unwrap_or(0),
            out: self.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            field: self.field.clone(),
            init: self.init.clone(),
            phi: self.phi.clone(),
            snapshots: self.snapshots.clone(),
        })
    }
}

fn span_hint(e: &toml::de::Error) -> String {
    e.span()
        .map(|s| format!(" (at byte {})", s.start))
        .unwrap_or_default()
}

/// Fully resolved configuration; echoed verbatim into every manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub task: Task,
    pub s1: f64,
    pub s2: Option<f64>,
    pub p: f64,
    pub dim: usize,
    #[serde(skip)]
    pub model: Option<ModelParams>,
    pub grid: GridSpec,
    pub scaled_grid: Option<ScaledGrid>,
    pub c: Option<f64>,
    pub lambda: Option<f64>,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub dt: f64,
    pub adapt: bool,
    pub blowup_factor: f64,
    pub monitor_every: usize,
    pub snapshot_every: usize,
    pub tau_list: Vec<f64>,
    pub c_list: Vec<f64>,
    pub seed: u64,
    pub out: PathBuf,
    pub field: Option<PathBuf>,
    pub init: Option<PathBuf>,
    pub phi: Option<PathBuf>,
    pub snapshots: Option<PathBuf>,
}

impl RunConfig {
    /// Mixed-model parameters; errors for single-operator configs.
    pub fn model(&self) -> Result<ModelParams> {
        self.model
            .ok_or_else(|| Error::Config("s2: missing".into()))
    }

    /// Grid used for mass shooting: the scaled grid when given.
    pub fn grid_choice(&self) -> GridChoice {
        match self.scaled_grid {
            Some(s) => GridChoice::Scaled(s),
            None => GridChoice::Fixed(self.grid),
        }
    }
}

/// Parse "n,L" into a grid of dimension `dim`.
pub fn parse_grid(s: &str, dim: usize) -> Result<GridSpec> {
    let (n, l) = pair(s, "grid")?;
    let n = n
        .parse::<usize>()
        .map_err(|e| Error::Config(format!("grid: bad point count '{n}': {e}")))?;
    let l = l
        .parse::<f64>()
        .map_err(|e| Error::Config(format!("grid: bad box length '{l}': {e}")))?;
    GridSpec::new(dim, n, l).map_err(|e| Error::Config(format!("grid: {e}")))
}

fn parse_scaled(s: &str, dim: usize) -> Result<ScaledGrid> {
    let (a, b) = pair(s, "scaled-grid")?;
    let parse = |v: &str| {
        v.parse::<f64>()
            .ok()
            .filter(|x| *x > 0.0 && x.is_finite())
            .ok_or_else(|| Error::Config(format!("scaled-grid: bad value '{v}'")))
    };
    Ok(ScaledGrid {
        dim,
        widths_per_box: parse(a)?,
        points_per_width: parse(b)?,
    })
}

fn pair<'a>(s: &'a str, key: &str) -> Result<(&'a str, &'a str)> {
    s.split_once(',')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| Error::Config(format!("{key}: expected 'a,b', got '{s}'")))
}

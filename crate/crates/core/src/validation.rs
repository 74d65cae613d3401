//! Quick self-check suite: analytic solitons and structural invariants.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::evolution::{self, StepPolicy};
use crate::field::Field;
use crate::functionals::{self, ModelParams};
use crate::grid::GridSpec;
use crate::groundstate::{self, PetviashviliOptions};
use crate::sampling;
use crate::spectral;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Run every check; individual failures are reported, not raised.
pub fn run_suite(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let g2 = GridSpec::new(2, 32, 2.0 * PI)?;
    let wave = spectral::plane_wave(g2, [3, -5, 0]);
    let sym = spectral::build_fractional_symbol(g2, 0.6)?;
    let image = spectral::apply_multiplier(&wave, &sym)?;
    let expect = wave.scale(34f64.powf(0.6));
    out.push(Check::at_most(
        "plane-wave eigenvalue |k|^{2s}",
        image.max_abs_diff(&expect)?,
        1e-12,
    ));

    let g = GridSpec::new(1, 512, 40.0)?;
    let gauss = Field::from_real_fn(g, |x| (-x[0] * x[0]).exp())?;
    let lap = spectral::apply_multiplier(&gauss, &spectral::build_fractional_symbol(g, 1.0)?)?;
    let exact = Field::from_real_fn(g, |x| (2.0 - 4.0 * x[0] * x[0]) * (-x[0] * x[0]).exp())?;
    out.push(Check::at_most(
        "Gaussian second derivative (s = 1)",
        lap.max_abs_diff(&exact)?,
        1e-10,
    ));

    let mut rng = sampling::rng(seed);
    let u = sampling::random_field(g2, &sampling::BumpSpec::default(), &mut rng);
    let parseval = rel(
        spectral::spectral_mass(&spectral::forward(&u), g2),
        spectral::mass(&u),
    );
    out.push(Check::at_most("discrete Parseval", parseval, 1e-12));

    let soliton = groundstate::solve_single_fractional(
        1.0,
        4.0,
        GridSpec::new(1, 1024, 80.0)?,
        None,
        &PetviashviliOptions::default(),
    )?;
    let sech = Field::from_real_fn(soliton.grid, |x| 2f64.sqrt() / x[0].cosh())?;
    out.push(Check::at_most(
        "classical soliton sqrt(2) sech",
        soliton.field.max_abs_diff(&sech)?,
        1e-6,
    ));
    out.push(Check::at_most(
        "soliton a1 = 4/3",
        rel(soliton.triple.a1, 4.0 / 3.0),
        1e-5,
    ));
    out.push(Check::at_most(
        "soliton b = 16/3",
        rel(soliton.triple.b, 16.0 / 3.0),
        1e-5,
    ));
    let c = functionals::gn_constant_from_groundstate(&soliton.field, 1.0, 4.0, 1)?;
    out.push(Check::at_most(
        "GN constant 1/sqrt(3)",
        rel(c, 1.0 / 3f64.sqrt()),
        1e-4,
    ));

    let quintic = groundstate::solve_single_fractional(
        1.0,
        6.0,
        GridSpec::new(1, 1024, 80.0)?,
        None,
        &PetviashviliOptions::default(),
    )?;
    let cq = functionals::gn_constant_from_groundstate(&quintic.field, 1.0, 6.0, 1)?;
    let cm = functionals::critical_mass(1, 1.0, cq)?;
    out.push(Check::at_most(
        "quintic critical mass sqrt(3) pi / 2",
        rel(cm, 3f64.sqrt() * PI / 2.0),
        1e-3,
    ));

    let params = ModelParams::new(0.75, 0.6, 6.0, 1)?;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let tri = sampling::random_triple(&mut rng, -1.0, 1.0);
        let t = 10f64.powf(rand::Rng::gen_range(&mut rng, -0.5..0.5));
        let h = 1e-5 * t;
        let fd = (functionals::fibered_energy(&tri, &params, t + h)
            - functionals::fibered_energy(&tri, &params, t - h))
            / (2.0 * h);
        let q = functionals::fibered_q(&tri, &params, t);
        let d = tri.dilated(&params, t);
        worst = worst.max((t * fd - q).abs() / (d.a1 + d.a2 + d.b));
    }
    out.push(Check::at_most("fibration Q = t dE/dt", worst, 1e-6));

    let gm = GridSpec::new(1, 256, 40.0)?;
    let psi0 = Field::from_real_fn(gm, |x| (-0.5 * x[0] * x[0]).exp())?;
    let traj = evolution::evolve(
        &psi0,
        1.0,
        &StepPolicy::default(),
        &ModelParams::new(0.75, 0.6, 4.0, 1)?,
    )?;
    out.push(Check::at_most(
        "mass conservation over t in [0, 1]",
        traj.max_mass_drift(),
        1e-10,
    ));
    out.push(Check::at_most(
        "energy drift per unit time",
        traj.energy_drift_per_time(),
        1e-6,
    ));
    Ok(out)
}

/// Fixed-width text table with one row per check.
pub fn format_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!(
            "{:<width$}  {:>10.3e}  <= {:>8.1e}  {}\n",
            c.name,
            c.value,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" },
        ));
    }
    out
}

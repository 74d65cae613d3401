//! Time integration of `i∂tψ = (−Δ)^{s1}ψ + (−Δ)^{s2}ψ − |ψ|^{p−2}ψ` by Strang
//! splitting.
//!
//! Both sub-flows are exact: the linear group multiplies mode ξ by
//! `e^{−i·dt·(|ξ|^{2s1}+|ξ|^{2s2})}` and the nonlinear flow rotates each sample
//! by `e^{i·dt·|ψ|^{p−2}}`. With these signs `e^{iλt}u` is a standing wave
//! whenever `u` solves the stationary equation with multiplier λ.

use num_complex::Complex64;
use serde::Serialize;

use crate::diagnostics::{self, CutoffProfile};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::functionals::{FunctionalTriple, ModelParams};
use crate::grid::GridSpec;
use crate::spectral;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepPolicy {
    pub dt0: f64,
    pub adapt: bool,
    pub dt_floor: f64,
    /// Blow-up is declared once ‖(−Δ)^{s1/2}ψ‖₂ exceeds this multiple of its
    /// initial value.
    pub blowup_gradient_factor: f64,
    /// Steps between diagnostic samples.
    pub monitor_every: usize,
    /// Keep a field snapshot every this many samples (0 disables).
    pub snapshot_every: usize,
    /// Cut-off radius for the virial series; defaults to L/25.
    pub virial_radius: Option<f64>,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            dt0: 1e-3,
            adapt: false,
            dt_floor: 1e-9,
            blowup_gradient_factor: 50.0,
            monitor_every: 10,
            snapshot_every: 0,
            virial_radius: None,
        }
    }
}

impl StepPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt0 > 0.0 && self.dt0.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "dt0 must be positive, got {}",
                self.dt0
            )));
        }
        if !(self.dt_floor > 0.0 && self.dt_floor < self.dt0) {
            return Err(Error::InvalidParams(format!(
                "need 0 < dt_floor < dt0, got dt_floor = {}, dt0 = {}",
                self.dt_floor, self.dt0
            )));
        }
        if !(self.blowup_gradient_factor > 1.0) {
            return Err(Error::InvalidParams(format!(
                "blowup_gradient_factor must exceed 1, got {}",
                self.blowup_gradient_factor
            )));
        }
        if self.monitor_every == 0 {
            return Err(Error::InvalidParams(
                "monitor_every must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    CompletedHorizon,
    BlowupDetected,
    DtUnderflow,
}

impl Verdict {
    /// Blow-up in the operational sense: gradient growth or step collapse.
    pub fn is_blowup(&self) -> bool {
        !matches!(self, Verdict::CompletedHorizon)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRecord {
    pub params: ModelParams,
    pub grid: GridSpec,
    pub policy: StepPolicy,
    pub horizon: f64,
    pub times: Vec<f64>,
    pub mass_series: Vec<f64>,
    pub energy_series: Vec<f64>,
    /// ‖(−Δ)^{s1/2}ψ‖₂ (a norm, not its square).
    pub grad_s1_series: Vec<f64>,
    pub grad_s2_series: Vec<f64>,
    pub virial_series: Vec<f64>,
    pub linf_series: Vec<f64>,
    pub verdict: Verdict,
    pub steps: usize,
    pub virial_radius: f64,
    /// Set when the run lies outside the hypotheses of the well-posedness
    /// theory (s2 ≤ 1/2 or non-radial data); the run is still carried out.
    pub outside_theory: bool,
    pub outside_theory_reasons: Vec<String>,
    /// Least-squares slope of log grad_s1 against log t over the second half
    /// of the run, for comparison with the t^{s1} growth law.
    pub growth_exponent: Option<f64>,
    #[serde(skip)]
    pub snapshots: Vec<(f64, Field)>,
    #[serde(skip)]
    pub final_field: Field,
}

impl TrajectoryRecord {
    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.mass_series[0];
        self.mass_series
            .iter()
            .fold(0.0, |m, &x| m.max((x - m0).abs() / m0))
    }

    /// max_t |E(t) − E(0)| / |E(0)|, divided by the elapsed time.
    pub fn energy_drift_per_time(&self) -> f64 {
        let e0 = self.energy_series[0];
        let t = self.final_time().max(f64::MIN_POSITIVE);
        self.energy_series
            .iter()
            .fold(0.0_f64, |m, &x| m.max((x - e0).abs() / e0.abs()))
            / t
    }

    /// max_t grad_s1(t) / grad_s1(0).
    pub fn max_gradient_growth(&self) -> f64 {
        let g0 = self.grad_s1_series[0];
        self.grad_s1_series.iter().fold(0.0, |m, &x| m.max(x / g0))
    }

    /// CSV with columns t, mass, energy, grad_s1, grad_s2, virial, linf.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mass,energy,grad_s1,grad_s2,virial,linf\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.times[i],
                self.mass_series[i],
                self.energy_series[i],
                self.grad_s1_series[i],
                self.grad_s2_series[i],
                self.virial_series[i],
                self.linf_series[i]
            ));
        }
        out
    }
}

/// Precomputed symbols for one (grid, params) pair.
struct Propagator {
    grid: GridSpec,
    params: ModelParams,
    /// |ξ|^{2s1} + |ξ|^{2s2}
    dispersion: Vec<f64>,
    sym1: Vec<f64>,
    sym2: Vec<f64>,
    dealias: Option<Vec<bool>>,
}

impl Propagator {
    fn new(grid: GridSpec, params: &ModelParams, dealias: bool) -> Result<Self> {
        let sym1 = spectral::build_fractional_symbol(grid, params.s1)?
            .symbol()
            .to_vec();
        let sym2 = spectral::build_fractional_symbol(grid, params.s2)?
            .symbol()
            .to_vec();
        let dispersion = sym1.iter().zip(&sym2).map(|(a, b)| a + b).collect();
        let dealias = dealias.then(|| {
            let cutoff = (grid.n_per_axis() as f64 / 3.0).floor() as i64;
            (0..grid.len())
                .map(|i| {
                    let m = grid.unravel(i);
                    (0..grid.dim()).all(|a| grid.mode_number(m[a]).abs() <= cutoff)
                })
                .collect()
        });
        Ok(Self {
            grid,
            params: *params,
            dispersion,
            sym1,
            sym2,
            dealias,
        })
    }

    fn linear_phase(&self, spec: &mut [Complex64], dt: f64) {
        for (v, &d) in spec.iter_mut().zip(&self.dispersion) {
            *v *= Complex64::from_polar(1.0, -dt * d);
        }
    }

    fn phase_factors(&self, tau: f64) -> Vec<Complex64> {
        self.dispersion
            .iter()
            .map(|&d| Complex64::from_polar(1.0, -tau * d))
            .collect()
    }

    fn filter(&self, spec: &mut [Complex64]) {
        if let Some(mask) = &self.dealias {
            for (v, &keep) in spec.iter_mut().zip(mask) {
                if !keep {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    fn nonlinear(&self, data: &mut [Complex64], dt: f64) {
        nonlinear_in_place(data, dt, self.params.p);
    }

    /// One Strang step in place; `data` is physical on entry and exit.
    /// Returns a1 = ‖(−Δ)^{s1/2}ψ‖₂² of the result.
    fn step(&self, data: &mut [Complex64], dt: f64, filter: bool) -> f64 {
        spectral::forward_in_place(self.grid, data);
        self.linear_phase(data, 0.5 * dt);
        spectral::inverse_in_place(self.grid, data);
        self.nonlinear(data, dt);
        spectral::forward_in_place(self.grid, data);
        self.linear_phase(data, 0.5 * dt);
        if filter {
            self.filter(data);
        }
        let a1 = self.weighted(data, &self.sym1);
        spectral::inverse_in_place(self.grid, data);
        a1
    }

    fn weighted(&self, spec: &[Complex64], sym: &[f64]) -> f64 {
        let scale = self.grid.cell_volume() / self.grid.len() as f64;
        spec.iter()
            .zip(sym)
            .map(|(v, s)| s * v.norm_sqr())
            .sum::<f64>()
            * scale
    }
}

fn nonlinear_in_place(data: &mut [Complex64], dt: f64, p: f64) {
    let half = 0.5 * (p - 2.0);
    if half.fract() == 0.0 && half <= 8.0 {
        let k = half as i32;
        for v in data.iter_mut() {
            *v *= Complex64::from_polar(1.0, dt * v.norm_sqr().powi(k));
        }
    } else {
        for v in data.iter_mut() {
            *v *= Complex64::from_polar(1.0, dt * v.norm_sqr().powf(half));
        }
    }
}

/// S(dt)ψ: multiply mode ξ by e^{−i·dt·(|ξ|^{2s1}+|ξ|^{2s2})}.
pub fn linear_step(psi: &Field, dt: f64, params: &ModelParams) -> Result<Field> {
    let prop = Propagator::new(psi.grid(), params, false)?;
    let mut spec = spectral::forward(psi);
    prop.linear_phase(&mut spec, dt);
    Ok(spectral::inverse(psi.grid(), spec))
}

/// Pointwise ψ ↦ e^{i·dt·|ψ|^{p−2}}ψ.
pub fn nonlinear_step(psi: &Field, dt: f64, p: f64) -> Field {
    let mut out = psi.clone();
    nonlinear_in_place(out.values_mut(), dt, p);
    out
}

/// linear(dt/2) ∘ nonlinear(dt) ∘ linear(dt/2), without de-aliasing.
pub fn strang_step(psi: &Field, dt: f64, params: &ModelParams) -> Result<Field> {
    let prop = Propagator::new(psi.grid(), params, false)?;
    let mut out = psi.clone();
    prop.step(out.values_mut(), dt, false);
    Ok(out)
}

/// Reasons a run falls outside the hypotheses of the well-posedness theory.
pub fn outside_theory_reasons(psi0: &Field, params: &ModelParams) -> Vec<String> {
    let mut out = Vec::new();
    if params.s2 <= 0.5 {
        out.push(format!("s2 = {} <= 1/2", params.s2));
    }
    if !diagnostics::is_reflection_symmetric(psi0, 1e-8) {
        out.push("initial data not radial about the box center".into());
    }
    out
}

struct Sample {
    mass: f64,
    energy: f64,
    grad_s1: f64,
    grad_s2: f64,
    virial: f64,
    linf: f64,
}

fn sample(
    psi: &Field,
    spec: &[Complex64],
    prop: &Propagator,
    cut: &CutoffProfile,
) -> Result<Sample> {
    let tri = FunctionalTriple {
        a1: prop.weighted(spec, &prop.sym1),
        a2: prop.weighted(spec, &prop.sym2),
        b: spectral::lp_integral(psi, prop.params.p),
    };
    Ok(Sample {
        mass: spectral::spectral_mass(spec, prop.grid),
        energy: tri.energy(&prop.params),
        grad_s1: tri.a1.sqrt(),
        grad_s2: tri.a2.sqrt(),
        virial: diagnostics::virial(psi, cut)?,
        linf: psi.sup_norm(),
    })
}

fn fit_growth_exponent(times: &[f64], grad: &[f64]) -> Option<f64> {
    let t_end = *times.last()?;
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(grad)
        .filter(|(&t, &g)| t >= 0.5 * t_end && t > 0.0 && g > 0.0)
        .map(|(&t, &g)| (t.ln(), g.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Integrate from ψ0 up to `horizon`, a detected blow-up, or dt underflow.
pub fn evolve(
    psi0: &Field,
    horizon: f64,
    policy: &StepPolicy,
    params: &ModelParams,
) -> Result<TrajectoryRecord> {
    policy.validate()?;
    params.validate()?;
    let grid = psi0.grid();
    if grid.dim() != params.dim {
        return Err(Error::InvalidParams(format!(
            "field is {}D but params are {}D",
            grid.dim(),
            params.dim
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if psi0.is_zero() {
        return Err(Error::ZeroField);
    }
    let radius = policy.virial_radius.unwrap_or(grid.box_length() / 25.0);
    let cut = diagnostics::build_cutoff(radius, grid)?;
    let prop = Propagator::new(grid, params, params.p >= 4.0)?;
    let reasons = outside_theory_reasons(psi0, params);

    let mut rec = TrajectoryRecord {
        params: *params,
        grid,
        policy: *policy,
        horizon,
        times: Vec::new(),
        mass_series: Vec::new(),
        energy_series: Vec::new(),
        grad_s1_series: Vec::new(),
        grad_s2_series: Vec::new(),
        virial_series: Vec::new(),
        linf_series: Vec::new(),
        verdict: Verdict::CompletedHorizon,
        steps: 0,
        virial_radius: radius,
        outside_theory: !reasons.is_empty(),
        outside_theory_reasons: reasons,
        growth_exponent: None,
        snapshots: Vec::new(),
        final_field: psi0.clone(),
    };
    let push =
        |rec: &mut TrajectoryRecord, t: f64, psi: &Field, spec: &[Complex64]| -> Result<()> {
            let s = sample(psi, spec, &prop, &cut)?;
            rec.times.push(t);
            rec.mass_series.push(s.mass);
            rec.energy_series.push(s.energy);
            rec.grad_s1_series.push(s.grad_s1);
            rec.grad_s2_series.push(s.grad_s2);
            rec.virial_series.push(s.virial);
            rec.linf_series.push(s.linf);
            if policy.snapshot_every > 0
                && (rec.times.len() - 1).is_multiple_of(policy.snapshot_every)
            {
                rec.snapshots.push((t, psi.clone()));
            }
            Ok(())
        };

    // `spec` holds the spectrum of the state at time t advanced by a pending
    // linear half step `carry`; adjacent half steps are fused.
    let mut spec = spectral::forward(psi0);
    push(&mut rec, 0.0, psi0, &spec)?;
    let grad0 = rec.grad_s1_series[0];
    let linf0 = psi0.sup_norm();
    let mut linf = linf0;
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut carry = 0.0;
    let mut phys = psi0.clone();
    let mut factors: Vec<(f64, Vec<Complex64>)> = Vec::new();
    let threshold = policy.blowup_gradient_factor * grad0;

    let mut advance = |spec: &mut [Complex64], tau: f64| {
        if tau == 0.0 {
            return;
        }
        let pos = match factors.iter().position(|(k, _)| *k == tau) {
            Some(i) => i,
            None => {
                if factors.len() >= 4 {
                    factors.remove(0);
                }
                factors.push((tau, prop.phase_factors(tau)));
                factors.len() - 1
            }
        };
        for (v, f) in spec.iter_mut().zip(&factors[pos].1) {
            *v *= f;
        }
    };

    while t < horizon {
        let mut dt = policy.dt0;
        if policy.adapt {
            dt /= 1.0 + (linf / linf0).powf(params.p - 2.0);
        }
        if dt < policy.dt_floor {
            rec.verdict = Verdict::DtUnderflow;
            break;
        }
        let last = t + dt >= horizon * (1.0 - 1e-14);
        if last {
            dt = horizon - t;
        }
        advance(&mut spec, carry + 0.5 * dt);
        let data = phys.values_mut();
        data.copy_from_slice(&spec);
        spectral::inverse_in_place(grid, data);
        linf = data.iter().fold(0.0_f64, |m, v| m.max(v.norm_sqr())).sqrt();
        prop.nonlinear(data, dt);
        if data.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            rec.verdict = Verdict::BlowupDetected;
            carry = 0.0;
            spec.copy_from_slice(data);
            spectral::forward_in_place(grid, &mut spec);
            steps += 1;
            t += dt;
            break;
        }
        spec.copy_from_slice(data);
        spectral::forward_in_place(grid, &mut spec);
        prop.filter(&mut spec);
        // |û| is invariant under the pending linear flow
        let a1 = prop.weighted(&spec, &prop.sym1);
        steps += 1;
        t = if last { horizon } else { t + dt };
        carry = 0.5 * dt;
        let blown = a1.sqrt() > threshold;
        if blown || steps.is_multiple_of(policy.monitor_every) || last {
            advance(&mut spec, carry);
            carry = 0.0;
            let data = phys.values_mut();
            data.copy_from_slice(&spec);
            spectral::inverse_in_place(grid, data);
            push(&mut rec, t, &phys, &spec)?;
        }
        if blown {
            rec.verdict = Verdict::BlowupDetected;
            break;
        }
    }
    if carry != 0.0 || rec.times.last() != Some(&t) {
        advance(&mut spec, carry);
        let data = phys.values_mut();
        data.copy_from_slice(&spec);
        spectral::inverse_in_place(grid, data);
        if rec.times.last() != Some(&t) {
            push(&mut rec, t, &phys, &spec)?;
        }
    }
    let psi = phys;
    rec.steps = steps;
    rec.growth_exponent = fit_growth_exponent(&rec.times, &rec.grad_s1_series);
    rec.final_field = psi;
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> ModelParams {
        ModelParams::new(0.75, 0.6, 4.0, 1).unwrap()
    }

    #[test]
    fn plane_wave_phase() {
        let g = GridSpec::new(1, 32, 2.0 * PI).unwrap();
        let m = params();
        let u = spectral::plane_wave(g, [3, 0, 0]);
        let dt = 0.37;
        let v = linear_step(&u, dt, &m).unwrap();
        let lam = 3f64.powf(1.5) + 3f64.powf(1.2);
        let expect = u.scale_complex(Complex64::from_polar(1.0, -dt * lam));
        assert!(v.max_abs_diff(&expect).unwrap() < 1e-13);
    }

    #[test]
    fn nonlinear_phase_is_pure() {
        let g = GridSpec::new(1, 16, 4.0).unwrap();
        let u = Field::from_fn(g, |x| Complex64::new(1.0 + x[0], 0.5 * x[0])).unwrap();
        let v = nonlinear_step(&u, 0.3, 5.0);
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        let c = Field::from_fn(g, |_| Complex64::new(2.0, 0.0)).unwrap();
        let w = nonlinear_step(&c, 0.1, 4.0);
        let expect = Complex64::from_polar(2.0, 0.1 * 4.0);
        assert!(w.values().iter().all(|v| (v - expect).norm() < 1e-15));
        let z = nonlinear_step(&c, 0.1, 2.0);
        let expect = Complex64::from_polar(2.0, 0.1);
        assert!(z.values().iter().all(|v| (v - expect).norm() < 1e-15));
    }

    #[test]
    fn policy_gates() {
        let bad = StepPolicy {
            dt_floor: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = StepPolicy {
            blowup_gradient_factor: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn growth_fit_recovers_power() {
        let t: Vec<f64> = (1..=40).map(|i| i as f64 * 0.5).collect();
        let g: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(0.75)).collect();
        assert!((fit_growth_exponent(&t, &g).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn completes_horizon_with_samples() {
        let g = GridSpec::new(1, 256, 40.0).unwrap();
        let u = Field::from_real_fn(g, |x| 0.5 * (-x[0] * x[0]).exp()).unwrap();
        let pol = StepPolicy {
            dt0: 1e-2,
            monitor_every: 7,
            snapshot_every: 2,
            ..Default::default()
        };
        let rec = evolve(&u, 1.0, &pol, &params()).unwrap();
        assert_eq!(rec.verdict, Verdict::CompletedHorizon);
        assert_eq!(*rec.times.last().unwrap(), 1.0);
        assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(rec.times.len(), rec.virial_series.len());
        assert!(rec.max_mass_drift() < 1e-12);
        assert!(!rec.snapshots.is_empty());
        assert!(!rec.outside_theory);
        assert_eq!(rec.to_csv().lines().count(), rec.times.len() + 1);
    }
}

//! Localized virial, the blow-up/global dichotomy classifier, flow-invariance
//! monitoring and the instability experiment.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{self, StepPolicy, TrajectoryRecord, Verdict};
use crate::field::Field;
use crate::functionals::{self, Exponents, FunctionalTriple, MassRegime, ModelParams};
use crate::grid::GridSpec;
use crate::groundstate::GroundStateRecord;
use crate::spectral;

/// Radial cut-off χ_R: r²/2 on [0, R], constant on [10R, ∞).
///
/// On [R, 10R] the radial derivative is the quartic
/// `χ′(r) = R(1 + 9y − 31y³ + 21y⁴)`, `y = (r − R)/(9R)`, so that
/// `χ″ = (9 − 93y² + 84y³)/9` falls from 1 to 0 and χ is C³ at R and C² at 10R.
#[derive(Clone, Debug)]
pub struct CutoffProfile {
    radius: f64,
    grid: GridSpec,
    chi_values: Vec<f64>,
    grad_chi_values: Vec<[f64; 3]>,
}

fn blend_g(y: f64) -> f64 {
    1.0 + 9.0 * y - 31.0 * y.powi(3) + 21.0 * y.powi(4)
}

fn blend_g_integral(y: f64) -> f64 {
    y + 4.5 * y * y - 7.75 * y.powi(4) + 4.2 * y.powi(5)
}

impl CutoffProfile {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn chi_values(&self) -> &[f64] {
        &self.chi_values
    }

    pub fn grad_chi_values(&self) -> &[[f64; 3]] {
        &self.grad_chi_values
    }

    /// χ_R(r).
    pub fn chi(&self, r: f64) -> f64 {
        radial_chi(self.radius, r)
    }

    /// χ_R′(r).
    pub fn chi_prime(&self, r: f64) -> f64 {
        radial_chi_prime(self.radius, r)
    }

    /// χ_R″(r).
    pub fn chi_second(&self, r: f64) -> f64 {
        radial_chi_second(self.radius, r)
    }

    /// Δχ_R = χ″ + (N − 1)χ′/r.
    pub fn laplacian(&self, r: f64) -> f64 {
        let n = self.grid.dim() as f64;
        if r == 0.0 {
            return n;
        }
        self.chi_second(r) + (n - 1.0) * self.chi_prime(r) / r
    }
}

pub fn radial_chi(big_r: f64, r: f64) -> f64 {
    let h = 9.0 * big_r;
    if r <= big_r {
        0.5 * r * r
    } else {
        let y = ((r - big_r) / h).min(1.0);
        0.5 * big_r * big_r + h * big_r * blend_g_integral(y)
    }
}

pub fn radial_chi_prime(big_r: f64, r: f64) -> f64 {
    if r <= big_r {
        r
    } else if r >= 10.0 * big_r {
        0.0
    } else {
        big_r * blend_g((r - big_r) / (9.0 * big_r))
    }
}

pub fn radial_chi_second(big_r: f64, r: f64) -> f64 {
    if r <= big_r {
        1.0
    } else if r >= 10.0 * big_r {
        0.0
    } else {
        let y = (r - big_r) / (9.0 * big_r);
        (9.0 - 93.0 * y * y + 84.0 * y.powi(3)) / 9.0
    }
}

/// Sample χ_R and ∇χ_R = χ′(r)·x/r on the grid. Needs 10R < L/2.
pub fn build_cutoff(radius: f64, grid: GridSpec) -> Result<CutoffProfile> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "cut-off radius must be positive, got {radius}"
        )));
    }
    if !(10.0 * radius < 0.5 * grid.box_length()) {
        return Err(Error::BoxTooSmall {
            radius,
            box_length: grid.box_length(),
        });
    }
    let mut chi_values = Vec::with_capacity(grid.len());
    let mut grad_chi_values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let x = grid.point(i);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        chi_values.push(radial_chi(radius, r));
        let d = if r > 0.0 {
            radial_chi_prime(radius, r) / r
        } else {
            1.0
        };
        grad_chi_values.push([d * x[0], d * x[1], d * x[2]]);
    }
    Ok(CutoffProfile {
        radius,
        grid,
        chi_values,
        grad_chi_values,
    })
}

/// M_χ[ψ] = 2 Im ∫ ψ̄ ∇χ·∇ψ with a spectral gradient.
///
/// Evaluated as 2∫ ∇χ·(Re ψ ∇Im ψ − Im ψ ∇Re ψ), so a real field gives
/// exactly zero.
pub fn virial(psi: &Field, cut: &CutoffProfile) -> Result<f64> {
    if psi.grid() != cut.grid {
        return Err(Error::GridMismatch);
    }
    let g = psi.grid();
    let part = |f: fn(&num_complex::Complex64) -> f64| {
        let vals: Vec<f64> = psi.values().iter().map(f).collect();
        let grads: Vec<Vec<f64>> = spectral::gradient(&Field::from_real(g, vals.clone())?)
            .iter()
            .map(|d| d.real_parts())
            .collect();
        Ok::<_, Error>((vals, grads))
    };
    let (re, grad_re) = part(|v| v.re)?;
    let (im, grad_im) = part(|v| v.im)?;
    let mut acc = 0.0;
    for i in 0..g.len() {
        let gc = &cut.grad_chi_values[i];
        for a in 0..g.dim() {
            acc += gc[a] * (re[i] * grad_im[a][i] - im[i] * grad_re[a][i]);
        }
    }
    Ok(2.0 * acc * g.cell_volume())
}

/// |ψ| invariant under reflection of each axis through the center and under
/// permutation of axes, to relative tolerance `tol`.
pub fn is_reflection_symmetric(psi: &Field, tol: f64) -> bool {
    let g = psi.grid();
    let n = g.n_per_axis();
    let sup = psi.sup_norm();
    if sup == 0.0 {
        return true;
    }
    let mirror = |j: usize| (n - j) % n;
    for i in 0..g.len() {
        let m = g.unravel(i);
        let v = psi.values()[i].norm();
        for a in 0..g.dim() {
            let mut r = m;
            r[a] = mirror(m[a]);
            if (psi.values()[g.ravel(r)].norm() - v).abs() > tol * sup {
                return false;
            }
        }
        if g.dim() >= 2 {
            let mut s = m;
            s.swap(0, 1);
            if (psi.values()[g.ravel(s)].norm() - v).abs() > tol * sup {
                return false;
            }
        }
        if g.dim() == 3 {
            let mut s = m;
            s.swap(1, 2);
            if (psi.values()[g.ravel(s)].norm() - v).abs() > tol * sup {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlowupVerdict {
    GlobalPredicted,
    FiniteTimeBlowupPredicted,
    GrowthOrBlowupPredicted,
    Indeterminate,
}

/// One tested inequality `lhs relation rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub relation: String,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn less(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            relation: "<".into(),
            rhs,
            holds: lhs < rhs,
        }
    }

    fn greater(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            relation: ">".into(),
            rhs,
            holds: lhs > rhs,
        }
    }

    /// |lhs − rhs| / max(|lhs|, |rhs|).
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(self.rhs.abs())
    }
}

/// Scale-invariant quantities of the single-operator ground state φ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiThresholds {
    pub s_c: f64,
    pub sigma_c: f64,
    /// 𝓔(φ)·M(φ)^{σc}, with 𝓔 = a1/2 − b/p.
    pub energy_level: f64,
    /// ‖(−Δ)^{s1/2}φ‖₂·‖φ‖₂^{σc}.
    pub x_phi: f64,
    /// Optimal GN constant from φ.
    pub gn_constant: f64,
    /// x0 from (p, s1, N, C).
    pub x0_formula: f64,
    /// f(x0).
    pub f_x0: f64,
}

fn check_phi(phi: &GroundStateRecord, params: &ModelParams) -> Result<()> {
    let dim = phi.grid.dim();
    if phi.s2.is_some() || dim != params.dim || phi.s1 != params.s1 || phi.p != params.p {
        return Err(Error::InvalidParams(format!(
            "phi record (s1 = {}, p = {}, N = {dim}, mixed = {}) does not solve the single-operator equation for s1 = {}, p = {}, N = {}",
            phi.s1,
            phi.p,
            phi.s2.is_some(),
            params.s1,
            params.p,
            params.dim
        )));
    }
    if !phi.converged {
        return Err(Error::InvalidParams(format!(
            "phi record not converged (el = {:.3e}, q = {:.3e})",
            phi.el_residual, phi.q_residual
        )));
    }
    Ok(())
}

/// Thresholds of the dichotomy from φ. Needs p > 2 + 4s1/N.
pub fn phi_thresholds(phi: &GroundStateRecord, params: &ModelParams) -> Result<PhiThresholds> {
    check_phi(phi, params)?;
    let ex = functionals::exponents(params)?;
    if ex.is_mass_critical() {
        return Err(Error::InvalidParams(
            "thresholds with σ_c need p > 2 + 4s1/N".into(),
        ));
    }
    let t = phi.triple;
    let x_phi = t.a1.sqrt() * phi.mass.powf(0.5 * ex.sigma_c);
    let c = functionals::gn_constant_closed_form(phi.mass, params.s1, params.p, params.dim);
    let x0 = functionals::dichotomy_critical_point(params, c)?;
    Ok(PhiThresholds {
        s_c: ex.s_c,
        sigma_c: ex.sigma_c,
        energy_level: t.single_energy(params.p) * phi.mass.powf(ex.sigma_c),
        x_phi,
        gn_constant: c,
        x0_formula: x0,
        f_x0: functionals::dichotomy_f(x0, params, c),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub verdict: BlowupVerdict,
    pub exponents: Exponents,
    pub energy: f64,
    pub mass: f64,
    pub grad_s1: f64,
    pub thresholds: Option<PhiThresholds>,
    /// Every inequality tested, in order, with both sides.
    pub rationale: Vec<InequalityCheck>,
}

/// Predict global existence or blow-up for ψ0 from the ground state φ of
/// (−Δ)^{s1}φ + φ = φ^{p−1}.
pub fn classify(
    psi0: &Field,
    phi: &GroundStateRecord,
    params: &ModelParams,
) -> Result<Classification> {
    params.validate()?;
    if params.regime() == MassRegime::Subcritical {
        return Err(Error::InvalidParams(format!(
            "classification needs p >= 2 + 4s1/N = {}, got p = {}",
            params.mass_critical_p(),
            params.p
        )));
    }
    let tri = functionals::triple(psi0, params)?;
    let energy = tri.energy(params);
    let mass = spectral::mass(psi0);
    let ex = functionals::exponents(params)?;
    let mut rationale = Vec::new();

    if ex.is_mass_critical() {
        check_phi(phi, params)?;
        let neg = InequalityCheck::less("E(psi0) < 0", energy, 0.0);
        let verdict = if neg.holds {
            BlowupVerdict::GrowthOrBlowupPredicted
        } else {
            BlowupVerdict::Indeterminate
        };
        rationale.push(InequalityCheck {
            name: "s_c = 0 (mass-critical)".into(),
            lhs: ex.s_c,
            relation: "=".into(),
            rhs: 0.0,
            holds: true,
        });
        rationale.push(neg);
        return Ok(Classification {
            verdict,
            exponents: ex,
            energy,
            mass,
            grad_s1: tri.a1.sqrt(),
            thresholds: None,
            rationale,
        });
    }

    let th = phi_thresholds(phi, params)?;
    let x_psi = tri.a1.sqrt() * mass.powf(0.5 * ex.sigma_c);
    let energy_psi = energy * mass.powf(ex.sigma_c);
    let sc_pos = InequalityCheck::greater("s_c > 0", ex.s_c, 0.0);
    let energy_below = InequalityCheck::less(
        "E(psi0) M(psi0)^sigma_c < Ecal(phi) M(phi)^sigma_c",
        energy_psi,
        th.energy_level,
    );
    let x_below = InequalityCheck::less(
        "|psi0|_Hs1 |psi0|_2^sigma_c < |phi|_Hs1 |phi|_2^sigma_c",
        x_psi,
        th.x_phi,
    );
    let x_above = InequalityCheck::greater(
        "|psi0|_Hs1 |psi0|_2^sigma_c > |phi|_Hs1 |phi|_2^sigma_c",
        x_psi,
        th.x_phi,
    );
    let p_range = InequalityCheck::less("p < 2 + 4 s1", params.p, 2.0 + 4.0 * params.s1);
    let neg = InequalityCheck::less("E(psi0) < 0", energy, 0.0);

    let verdict = if sc_pos.holds && energy_below.holds && x_below.holds {
        BlowupVerdict::GlobalPredicted
    } else if sc_pos.holds
        && p_range.holds
        && (neg.holds || (energy >= 0.0 && energy_below.holds && x_above.holds))
    {
        BlowupVerdict::FiniteTimeBlowupPredicted
    } else {
        BlowupVerdict::Indeterminate
    };
    rationale.extend([sc_pos, energy_below, x_below, x_above, p_range, neg]);
    Ok(Classification {
        verdict,
        exponents: ex,
        energy,
        mass,
        grad_s1: tri.a1.sqrt(),
        thresholds: Some(th),
        rationale,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub x0: f64,
    /// Sign of x(t) − x0 at t = 0.
    pub initial_sign: i8,
    /// (t, x(t)) at every sample whose sign differs from the previous one.
    pub flips: Vec<(f64, f64)>,
    pub samples: usize,
}

impl InvarianceReport {
    pub fn flip_count(&self) -> usize {
        self.flips.len()
    }
}

/// Track the sign of ‖(−Δ)^{s1/2}ψ(t)‖₂‖ψ(t)‖₂^{σc} − x0 along a trajectory,
/// with x0 taken from φ and σc from `params`.
pub fn monitor_invariance(
    traj: &TrajectoryRecord,
    phi: &GroundStateRecord,
    params: &ModelParams,
) -> Result<InvarianceReport> {
    let th = phi_thresholds(phi, params)?;
    let sign = |x: f64| -> i8 {
        if x > th.x_phi {
            1
        } else if x < th.x_phi {
            -1
        } else {
            0
        }
    };
    let xs: Vec<f64> = traj
        .grad_s1_series
        .iter()
        .zip(&traj.mass_series)
        .map(|(g, m)| g * m.powf(0.5 * th.sigma_c))
        .collect();
    let initial_sign = sign(xs[0]);
    let mut flips = Vec::new();
    let mut prev = initial_sign;
    for (t, &x) in traj.times.iter().zip(&xs) {
        let s = sign(x);
        if s != prev {
            flips.push((*t, x));
            prev = s;
        }
    }
    Ok(InvarianceReport {
        x0: th.x_phi,
        initial_sign,
        flips,
        samples: xs.len(),
    })
}

/// H^{s1} norm sqrt(‖w‖₂² + ‖(−Δ)^{s1/2}w‖₂²).
pub fn h_s_norm(w: &Field, s: f64) -> Result<f64> {
    Ok((spectral::mass(w) + spectral::seminorm_sq(w, s)?).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct InstabilityReport {
    pub tau: f64,
    pub energy_v: f64,
    pub energy_uc: f64,
    pub q_v: f64,
    /// ‖v − u_c‖_{H^{s1}} at t = 0.
    pub h_s1_distance: f64,
    pub dilation_boundary_warning: bool,
    pub max_growth: f64,
    pub verdict: Verdict,
    pub final_time: f64,
    #[serde(skip)]
    pub trajectory: TrajectoryRecord,
}

/// Perturb u_c along its scaling fiber, v = (u_c)_τ, check that v lies in
/// {E(v) < E(u_c), Q(v) < 0}, and evolve it.
pub fn instability_experiment(
    uc: &GroundStateRecord,
    tau: f64,
    horizon: f64,
    policy: &StepPolicy,
    params: &ModelParams,
) -> Result<InstabilityReport> {
    if !(tau > 0.0 && tau <= 2.0) {
        return Err(Error::InvalidParams(format!(
            "need tau in (1, 2], got {tau}"
        )));
    }
    if uc.params().as_ref() != Some(params) || !uc.converged {
        return Err(Error::InvalidParams(
            "u_c record must be a converged mixed solution for the same parameters".into(),
        ));
    }
    let dil = spectral::dilate(&uc.field, tau)?;
    let v = dil.field;
    let tv: FunctionalTriple = functionals::triple(&v, params)?;
    let energy_v = tv.energy(params);
    let q_v = tv.pohozaev_q(params);
    if !(energy_v < uc.energy && q_v < 0.0) {
        return Err(Error::PerturbationNotInQc {
            energy_v,
            energy_uc: uc.energy,
            q_v,
        });
    }
    let h_s1_distance = h_s_norm(&v.sub(&uc.field)?, params.s1)?;
    let trajectory = evolution::evolve(&v, horizon, policy, params)?;
    Ok(InstabilityReport {
        tau,
        energy_v,
        energy_uc: uc.energy,
        q_v,
        h_s1_distance,
        dilation_boundary_warning: dil.boundary_warning,
        max_growth: trajectory.max_gradient_growth(),
        verdict: trajectory.verdict,
        final_time: trajectory.final_time(),
        trajectory,
    })
}

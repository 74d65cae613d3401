//! Scalar functionals of the variational problem.
//!
//! Everything is evaluated from one [`FunctionalTriple`] per field so that
//! E, Q and the scaling fiber t ↦ E(u_t) agree to round-off:
//!
//! * `a1 = ‖(−Δ)^{s1/2}u‖₂²`, `a2 = ‖(−Δ)^{s2/2}u‖₂²`, `b = ∫|u|^p`
//! * `E = a1/2 + a2/2 − b/p`
//! * `Q = s1·a1 + s2·a2 − N(p−2)/(2p)·b`
//! * `E(u_t) = t^{2s1}a1/2 + t^{2s2}a2/2 − t^{N(p−2)/2}b/p`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::spectral;

/// Relative tolerance used to decide p == 2 + 4s1/N.
const CRITICAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub s1: f64,
    pub s2: f64,
    pub p: f64,
    pub dim: usize,
}

/// Position of p relative to the mass-critical exponent 2 + 4s1/N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MassRegime {
    Subcritical,
    Critical,
    Supercritical,
}

impl ModelParams {
    pub fn new(s1: f64, s2: f64, p: f64, dim: usize) -> Result<Self> {
        let m = Self { s1, s2, p, dim };
        m.validate()?;
        Ok(m)
    }

    /// Re-check 0 < s2 < s1 ≤ 1, p > 2 and the energy-subcritical gate.
    pub fn validate(&self) -> Result<()> {
        let Self { s1, s2, p, dim } = *self;
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParams(format!(
                "dimension {dim} not in 1..=3"
            )));
        }
        if !(s1 > 0.0 && s1 <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "need 0 < s1 <= 1, got s1 = {s1}"
            )));
        }
        if !(s2 > 0.0 && s2 < s1) {
            return Err(Error::InvalidParams(format!(
                "need 0 < s2 < s1, got s2 = {s2}, s1 = {s1}"
            )));
        }
        check_exponent(p, s1, dim)
    }

    pub fn mass_critical_p(&self) -> f64 {
        mass_critical_exponent(self.dim, self.s1)
    }

    pub fn regime(&self) -> MassRegime {
        regime(self.p, self.s1, self.dim)
    }

    /// N(p−2)/2, the exponent of t carried by the potential term.
    pub fn scaling_exponent(&self) -> f64 {
        0.5 * self.dim as f64 * (self.p - 2.0)
    }

    /// N(p−2)/(2p), the Pohozaev weight of ∫|u|^p.
    pub fn pohozaev_weight(&self) -> f64 {
        self.scaling_exponent() / self.p
    }
}

/// 2 + 4s1/N.
pub fn mass_critical_exponent(dim: usize, s1: f64) -> f64 {
    2.0 + 4.0 * s1 / dim as f64
}

pub fn regime(p: f64, s1: f64, dim: usize) -> MassRegime {
    let pc = mass_critical_exponent(dim, s1);
    if (p - pc).abs() <= CRITICAL_TOL * pc {
        MassRegime::Critical
    } else if p < pc {
        MassRegime::Subcritical
    } else {
        MassRegime::Supercritical
    }
}

/// p > 2 and, when N > 2s, p < 2N/(N − 2s).
pub fn check_exponent(p: f64, s: f64, dim: usize) -> Result<()> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::InvalidParams(format!("need p > 2, got p = {p}")));
    }
    let n = dim as f64;
    if n > 2.0 * s {
        let upper = 2.0 * n / (n - 2.0 * s);
        if p >= upper {
            return Err(Error::InvalidParams(format!(
                "energy-subcritical gate violated: need p < 2N/(N-2s1) = {upper}, got p = {p}"
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTriple {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
}

/// The three integrals (a1, a2, b) from one forward transform.
pub fn triple(u: &Field, params: &ModelParams) -> Result<FunctionalTriple> {
    if u.grid().dim() != params.dim {
        return Err(Error::InvalidParams(format!(
            "field is {}D but params are {}D",
            u.grid().dim(),
            params.dim
        )));
    }
    let spec = spectral::forward(u);
    let a = spectral::seminorms_from_spectrum(&spec, u.grid(), &[params.s1, params.s2]);
    Ok(FunctionalTriple {
        a1: a[0],
        a2: a[1],
        b: spectral::lp_integral(u, params.p),
    })
}

impl FunctionalTriple {
    pub fn energy(&self, params: &ModelParams) -> f64 {
        0.5 * self.a1 + 0.5 * self.a2 - self.b / params.p
    }

    pub fn pohozaev_q(&self, params: &ModelParams) -> f64 {
        params.s1 * self.a1 + params.s2 * self.a2 - params.pohozaev_weight() * self.b
    }

    /// |Q| / (s1·a1 + s2·a2).
    pub fn q_residual(&self, params: &ModelParams) -> f64 {
        let scale = params.s1 * self.a1 + params.s2 * self.a2;
        if scale == 0.0 {
            return if self.b == 0.0 { 0.0 } else { f64::INFINITY };
        }
        self.pohozaev_q(params).abs() / scale
    }

    /// Energy without the s2 term: a1/2 − b/p.
    pub fn single_energy(&self, p: f64) -> f64 {
        0.5 * self.a1 - self.b / p
    }

    /// Pohozaev functional of the single-operator problem: s1·a1 − N(p−2)/(2p)·b.
    pub fn single_pohozaev_q(&self, s1: f64, p: f64, dim: usize) -> f64 {
        s1 * self.a1 - 0.5 * dim as f64 * (p - 2.0) / p * self.b
    }

    /// E − 2Q/(N(p−2)), which equals E on the Pohozaev manifold.
    pub fn pohozaev_reduced_energy(&self, params: &ModelParams) -> f64 {
        let np = params.dim as f64 * (params.p - 2.0);
        (np - 4.0 * params.s1) / (2.0 * np) * self.a1
            + (np - 4.0 * params.s2) / (2.0 * np) * self.a2
    }

    /// λ·c predicted by combining Q = 0 with the weak form of the equation.
    pub fn lagrange_identity(&self, params: &ModelParams) -> f64 {
        let np = params.dim as f64 * (params.p - 2.0);
        (2.0 * params.p * params.s1 / np - 1.0) * self.a1
            + (2.0 * params.p * params.s2 / np - 1.0) * self.a2
    }

    /// Triple of u_t, obtained by analytic rescaling.
    pub fn dilated(&self, params: &ModelParams, t: f64) -> FunctionalTriple {
        FunctionalTriple {
            a1: t.powf(2.0 * params.s1) * self.a1,
            a2: t.powf(2.0 * params.s2) * self.a2,
            b: t.powf(params.scaling_exponent()) * self.b,
        }
    }
}

pub fn energy(u: &Field, params: &ModelParams) -> Result<f64> {
    Ok(triple(u, params)?.energy(params))
}

pub fn pohozaev_q(u: &Field, params: &ModelParams) -> Result<f64> {
    Ok(triple(u, params)?.pohozaev_q(params))
}

/// E(u_t) from the triple of u.
pub fn fibered_energy(tri: &FunctionalTriple, params: &ModelParams, t: f64) -> f64 {
    tri.dilated(params, t).energy(params)
}

/// Q(u_t) = t · d/dt E(u_t).
pub fn fibered_q(tri: &FunctionalTriple, params: &ModelParams, t: f64) -> f64 {
    tri.dilated(params, t).pohozaev_q(params)
}

fn fibered_q_derivative(tri: &FunctionalTriple, params: &ModelParams, t: f64) -> f64 {
    let (s1, s2) = (params.s1, params.s2);
    let beta = params.scaling_exponent();
    2.0 * s1 * s1 * t.powf(2.0 * s1 - 1.0) * tri.a1
        + 2.0 * s2 * s2 * t.powf(2.0 * s2 - 1.0) * tri.a2
        - params.pohozaev_weight() * beta * t.powf(beta - 1.0) * tri.b
}

/// The unique t_u > 0 with Q(u_{t_u}) = 0, i.e. the maximizer of t ↦ E(u_t).
///
/// Bracketing from [1e-6, t_hi] with t_hi doubled until Q changes sign,
/// bisection to relative width 1e-3, then safeguarded Newton to 1e-12.
pub fn project_to_pohozaev(tri: &FunctionalTriple, params: &ModelParams) -> Result<f64> {
    if !(tri.b > 0.0) {
        return Err(Error::NoRoot("b = ∫|u|^p must be positive".into()));
    }
    match params.regime() {
        MassRegime::Subcritical => {
            return Err(Error::NoRoot(format!(
                "p = {} is below the mass-critical exponent {}",
                params.p,
                params.mass_critical_p()
            )))
        }
        MassRegime::Critical => {
            let lhs = 0.5 * tri.a1;
            let rhs = tri.b / params.p;
            if !(lhs < rhs) {
                return Err(Error::NoRoot(format!(
                    "mass-critical fiber needs a1/2 < b/p, got a1/2 = {lhs} >= b/p = {rhs}"
                )));
            }
        }
        MassRegime::Supercritical => {}
    }
    let q = |t: f64| fibered_q(tri, params, t);
    let mut lo = 1e-6;
    let mut shrink = 0;
    while q(lo) <= 0.0 {
        lo *= 1e-3;
        shrink += 1;
        if shrink > 90 {
            return Err(Error::NoRoot("Q(u_t) is not positive near t = 0".into()));
        }
    }
    let mut hi = lo.max(1.0);
    let mut grow = 0;
    while q(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 2000 || !hi.is_finite() {
            return Err(Error::NoRoot("Q(u_t) never becomes negative".into()));
        }
    }
    while (hi - lo) > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if q(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..100 {
        let f = q(t);
        if f == 0.0 {
            return Ok(t);
        }
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let d = fibered_q_derivative(tri, params, t);
        let mut next = t - f / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let converged = (next - t).abs() <= 1e-14 * t || (hi - lo) <= 1e-15 * hi;
        t = next;
        if converged {
            return Ok(t);
        }
    }
    Ok(t)
}

/// Exponent gate of the Gagliardo–Nirenberg inequality.
fn check_gn_exponent(p: f64, s: f64, dim: usize) -> Result<()> {
    let n = dim as f64;
    if p < 2.0 || (n > 2.0 * s && p >= 2.0 * n / (n - 2.0 * s)) {
        return Err(Error::InvalidParams(format!(
            "GN exponent p = {p} outside the admissible range for s = {s}, N = {dim}"
        )));
    }
    Ok(())
}

/// Weinstein quotient W(u) = ∫|u|^p / (a_s^{N(p−2)/(4s)} · M^{p/2 − N(p−2)/(4s)}),
/// whose supremum is the optimal GN constant C_{N,p,s}.
pub fn gn_quotient(u: &Field, s: f64, p: f64) -> Result<f64> {
    let dim = u.grid().dim();
    check_gn_exponent(p, s, dim)?;
    let m = spectral::mass(u);
    if u.is_zero() || m == 0.0 {
        return Err(Error::ZeroField);
    }
    let a = spectral::seminorm_sq(u, s)?;
    if a == 0.0 {
        return Err(Error::ZeroField);
    }
    let b = spectral::lp_integral(u, p);
    Ok(gn_quotient_from_parts(a, m, b, s, p, dim))
}

pub fn gn_quotient_from_parts(a: f64, mass: f64, b: f64, s: f64, p: f64, dim: usize) -> f64 {
    let e = dim as f64 * (p - 2.0) / (4.0 * s);
    b / (a.powf(e) * mass.powf(0.5 * p - e))
}

/// Default Pohozaev tolerance for accepting a ground state.
pub const POHOZAEV_TOL: f64 = 1e-6;

/// Closed-form optimal GN constant from the ground state φ of
/// (−Δ)^{s1}φ + φ = φ^{p−1}:
/// C = (2s1p/(N(p−2))) · (N(p−2)/(2s1p − N(p−2)))^{(4s1 − Np + 2N)/(4s1)} · ‖φ‖₂^{2−p}.
pub fn gn_constant_from_groundstate(phi: &Field, s1: f64, p: f64, dim: usize) -> Result<f64> {
    gn_constant_from_groundstate_with_tol(phi, s1, p, dim, POHOZAEV_TOL)
}

pub fn gn_constant_from_groundstate_with_tol(
    phi: &Field,
    s1: f64,
    p: f64,
    dim: usize,
    tol: f64,
) -> Result<f64> {
    check_gn_exponent(p, s1, dim)?;
    if phi.is_zero() {
        return Err(Error::ZeroField);
    }
    let a1 = spectral::seminorm_sq(phi, s1)?;
    let b = spectral::lp_integral(phi, p);
    let q = s1 * a1 - 0.5 * dim as f64 * (p - 2.0) / p * b;
    let residual = q.abs() / (s1 * a1);
    if !(residual <= tol) {
        return Err(Error::PohozaevResidual {
            residual,
            tolerance: tol,
        });
    }
    Ok(gn_constant_closed_form(spectral::mass(phi), s1, p, dim))
}

/// The closed form evaluated at ‖φ‖₂² = `phi_mass`.
pub fn gn_constant_closed_form(phi_mass: f64, s1: f64, p: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let np = n * (p - 2.0);
    let lead = 2.0 * s1 * p / np;
    let ratio = np / (2.0 * s1 * p - np);
    let expo = (4.0 * s1 - n * p + 2.0 * n) / (4.0 * s1);
    lead * ratio.powf(expo) * phi_mass.powf(0.5 * (2.0 - p))
}

/// c_{N,s1} = ((N + 2s1)/(N·C))^{N/(2s1)}.
pub fn critical_mass(dim: usize, s1: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "GN constant must be positive, got {c}"
        )));
    }
    let n = dim as f64;
    Ok(((n + 2.0 * s1) / (n * c)).powf(n / (2.0 * s1)))
}

/// Scaling indices of the blow-up/global dichotomy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub s_c: f64,
    /// (s1 − s_c)/s_c; `f64::INFINITY` marks the mass-critical case s_c = 0.
    pub sigma_c: f64,
}

impl Exponents {
    pub fn is_mass_critical(&self) -> bool {
        self.s_c == 0.0
    }
}

/// s_c = N/2 − 2s1/(p − 2) and σ_c = (s1 − s_c)/s_c.
pub fn exponents(params: &ModelParams) -> Result<Exponents> {
    match params.regime() {
        MassRegime::Subcritical => Err(Error::InvalidParams(format!(
            "p = {} is below the mass-critical exponent {}",
            params.p,
            params.mass_critical_p()
        ))),
        MassRegime::Critical => Ok(Exponents {
            s_c: 0.0,
            sigma_c: f64::INFINITY,
        }),
        MassRegime::Supercritical => {
            let s_c = 0.5 * params.dim as f64 - 2.0 * params.s1 / (params.p - 2.0);
            Ok(Exponents {
                s_c,
                sigma_c: (params.s1 - s_c) / s_c,
            })
        }
    }
}

/// f(x) = x²/2 − (C/p)·x^{N(p−2)/(2s1)}.
pub fn dichotomy_f(x: f64, params: &ModelParams, c: f64) -> f64 {
    let e = params.dim as f64 * (params.p - 2.0) / (2.0 * params.s1);
    0.5 * x * x - c / params.p * x.powf(e)
}

/// Unique critical point x0 = (2ps1/(C·N(p−2)))^{2s1/(N(p−2) − 4s1)} of f.
pub fn dichotomy_critical_point(params: &ModelParams, c: f64) -> Result<f64> {
    if params.regime() != MassRegime::Supercritical {
        return Err(Error::InvalidParams(
            "the dichotomy function needs p > 2 + 4s1/N".into(),
        ));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!(
            "GN constant must be positive, got {c}"
        )));
    }
    let np = params.dim as f64 * (params.p - 2.0);
    Ok((2.0 * params.p * params.s1 / (c * np)).powf(2.0 * params.s1 / (np - 4.0 * params.s1)))
}

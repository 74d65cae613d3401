//! Stationary states by Petviashvili iteration.
//!
//! Both stationary problems have the form `K u = |u|^{p−2}u` with a positive
//! Fourier multiplier `K`: `|ξ|^{2s1} + 1` for the single-operator equation and
//! `|ξ|^{2s1} + |ξ|^{2s2} + λ` for the mixed equation at fixed λ. The iterate is
//!
//! ```text
//! û ← S^γ · F(|u|^{p−2}u) / K,   S = ⟨Ku,u⟩ / ⟨|u|^{p−2}u,u⟩,   γ = (p−1)/(p−2)
//! ```
//!
//! followed by taking the real part and recentering the peak.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::field::Field;
use crate::functionals::{self, FunctionalTriple, ModelParams};
use crate::grid::GridSpec;
use crate::spectral;

/// Stationary-equation residual accepted as converged.
pub const EL_TOL: f64 = 1e-9;
/// Pohozaev residual required of a converged record.
pub const Q_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PetviashviliOptions {
    pub max_iter: usize,
    pub el_tol: f64,
    pub q_tol: f64,
    /// Sampling period of the residual/norm history attached to failures.
    pub history_every: usize,
    /// Give up early when the best residual has not dropped by 10% over this
    /// many iterations.
    pub stall_window: usize,
}

impl Default for PetviashviliOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            el_tol: EL_TOL,
            q_tol: Q_TOL,
            history_every: 50,
            stall_window: 1000,
        }
    }
}

/// A stationary solution together with its diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct GroundStateRecord {
    #[serde(skip)]
    pub field: Field,
    pub grid: GridSpec,
    pub s1: f64,
    /// `None` for the single-operator equation.
    pub s2: Option<f64>,
    pub p: f64,
    pub lambda: f64,
    pub mass: f64,
    /// E for mixed records, a1/2 − b/p for single-operator records.
    pub energy: f64,
    pub triple: FunctionalTriple,
    pub q_residual: f64,
    pub el_residual: f64,
    pub iterations: usize,
    /// el_residual ≤ el_tol and q_residual ≤ q_tol.
    pub converged: bool,
    pub boundary_mass_fraction: f64,
    pub boundary_sup: f64,
}

impl GroundStateRecord {
    pub fn params(&self) -> Option<ModelParams> {
        self.s2.map(|s2| ModelParams {
            s1: self.s1,
            s2,
            p: self.p,
            dim: self.grid.dim(),
        })
    }

    /// Largest increase of |u| met walking outward from the center along each
    /// coordinate axis and diagonal; ≤ 0 for a radially nonincreasing profile.
    pub fn radial_monotonicity_defect(&self) -> f64 {
        radial_monotonicity_defect(&self.field)
    }

    /// Smallest real part relative to the peak.
    pub fn min_relative_value(&self) -> f64 {
        let sup = self.field.sup_norm();
        self.field
            .values()
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.re / sup))
    }
}

/// Default seed: centered Gaussian of width `width`.
pub fn gaussian_seed(grid: GridSpec, width: f64, amplitude: f64) -> Field {
    let w2 = 2.0 * width * width;
    let r2 = grid.radius_squared();
    let values = r2
        .iter()
        .map(|&r| Complex64::new(amplitude * (-r / w2).exp(), 0.0))
        .collect();
    Field::new(grid, values).expect("gaussian samples are finite")
}

fn default_width(grid: GridSpec, s1: f64, s2: Option<f64>, lambda: f64) -> f64 {
    let mut w = lambda.powf(-0.5 / s1);
    if let Some(s2) = s2 {
        w = w.max(lambda.powf(-0.5 / s2));
    }
    w.clamp(4.0 * grid.spacing(), grid.box_length() / 8.0)
}

fn check_seed(seed: &Field, grid: GridSpec) -> Result<()> {
    if seed.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let sup = seed.sup_norm();
    if sup == 0.0 {
        return Err(Error::NegativeSeed);
    }
    let tol = 1e-12 * sup;
    if seed
        .values()
        .iter()
        .any(|v| v.im.abs() > tol || v.re < -tol)
    {
        return Err(Error::NegativeSeed);
    }
    Ok(())
}

struct Iterate {
    field: Field,
    el_residual: f64,
    iterations: usize,
}

fn petviashvili(
    symbol: &[f64],
    p: f64,
    seed: &Field,
    opts: &PetviashviliOptions,
) -> Result<Iterate> {
    let grid = seed.grid();
    let n_total = grid.len() as f64;
    let gamma = (p - 1.0) / (p - 2.0);
    let mut residual_history = Vec::new();
    let mut norm_history = Vec::new();
    let mut best = f64::INFINITY;
    let mut best_at = 0usize;
    let mut last = f64::NAN;
    // The iterate is carried in Fourier space so that K·û is formed from the
    // previous update exactly rather than from a fresh transform of u, whose
    // round-off would be amplified by max K.
    let mut uhat = spectral::forward(seed);
    let mut u = vec![0.0; uhat.len()];
    let mut nhat = vec![Complex64::new(0.0, 0.0); uhat.len()];

    for it in 0..=opts.max_iter {
        nhat.copy_from_slice(&uhat);
        spectral::inverse_in_place(grid, &mut nhat);
        for (x, v) in u.iter_mut().zip(&nhat) {
            *x = v.re;
        }
        recenter_pair(grid, &mut u, &mut uhat);
        let mut nl_dot_u = Neumaier::default();
        for (h, &x) in nhat.iter_mut().zip(&u) {
            let nl = x.abs().powf(p - 2.0) * x;
            nl_dot_u.add(nl * x);
            *h = Complex64::new(nl, 0.0);
        }
        let nl_dot_u = nl_dot_u.total();
        spectral::forward_in_place(grid, &mut nhat);

        let mut ku_u = Neumaier::default();
        let mut res = Neumaier::default();
        let mut norm = Neumaier::default();
        for ((uh, nh), &k) in uhat.iter().zip(&nhat).zip(symbol) {
            let us = uh.norm_sqr();
            ku_u.add(k * us);
            norm.add(us);
            res.add((uh * k - nh).norm_sqr());
        }
        let (ku_u, norm) = (ku_u.total(), norm.total());
        let el = (res.total() / norm).sqrt();
        last = el;
        if !el.is_finite() || norm == 0.0 || nl_dot_u <= 0.0 {
            return Err(Error::NonConvergence {
                iterations: it,
                residual: el,
                residual_history,
                norm_history,
            });
        }
        if it % opts.history_every.max(1) == 0 {
            residual_history.push(el);
            norm_history.push((norm * grid.cell_volume() / n_total).sqrt());
        }
        if el <= opts.el_tol {
            let values = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            return Ok(Iterate {
                field: Field::new(grid, values)?,
                el_residual: el,
                iterations: it,
            });
        }
        if el < 0.9 * best {
            best = el;
            best_at = it;
        } else if it - best_at > opts.stall_window {
            break;
        }
        if it == opts.max_iter {
            break;
        }

        let stab = (ku_u / n_total) / nl_dot_u;
        let factor = stab.powf(gamma);
        for ((uh, nh), &k) in uhat.iter_mut().zip(&nhat).zip(symbol) {
            *uh = nh * (factor / k);
        }
    }
    Err(Error::NonConvergence {
        iterations: opts
            .max_iter
            .min(residual_history.len() * opts.history_every.max(1)),
        residual: last,
        residual_history,
        norm_history,
    })
}

/// Compensated summation; the stabilizing factor needs sums accurate well
/// below 1e-13 once λ is large.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Circularly shift the peak of |u| to the box center, applying the same
/// shift to the spectrum as a phase factor.
fn recenter_pair(grid: GridSpec, u: &mut [f64], uhat: &mut [Complex64]) {
    let peak = u
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |(bi, bv), (i, &v)| {
            if v.abs() > bv {
                (i, v.abs())
            } else {
                (bi, bv)
            }
        })
        .0;
    let n = grid.n_per_axis();
    let c = grid.center_index();
    let pm = grid.unravel(peak);
    let mut shift = [0usize; 3];
    for a in 0..grid.dim() {
        shift[a] = (c + n - pm[a]) % n;
    }
    if shift.iter().all(|&s| s == 0) {
        return;
    }
    let old = u.to_vec();
    for (i, v) in old.iter().enumerate() {
        let mut m = grid.unravel(i);
        for a in 0..grid.dim() {
            m[a] = (m[a] + shift[a]) % n;
        }
        u[grid.ravel(m)] = *v;
    }
    spectral::shift_spectrum(grid, uhat, shift);
}

fn assemble(
    it: Iterate,
    s1: f64,
    s2: Option<f64>,
    p: f64,
    lambda: f64,
    opts: &PetviashviliOptions,
) -> Result<GroundStateRecord> {
    let u = it.field;
    let grid = u.grid();
    let spec = spectral::forward(&u);
    let orders: Vec<f64> = std::iter::once(s1).chain(s2).collect();
    let a = spectral::seminorms_from_spectrum(&spec, grid, &orders);
    let triple = FunctionalTriple {
        a1: a[0],
        a2: a.get(1).copied().unwrap_or(0.0),
        b: spectral::lp_integral(&u, p),
    };
    let (energy, q_residual) = match s2 {
        Some(s2) => {
            let m = ModelParams {
                s1,
                s2,
                p,
                dim: grid.dim(),
            };
            (triple.energy(&m), triple.q_residual(&m))
        }
        None => (
            triple.single_energy(p),
            triple.single_pohozaev_q(s1, p, grid.dim()).abs() / (s1 * triple.a1),
        ),
    };
    let converged = it.el_residual <= opts.el_tol && q_residual <= opts.q_tol;
    if !converged {
        log::debug!(
            "stationary solve on {grid} not converged: el = {:.3e}, q = {:.3e}",
            it.el_residual,
            q_residual
        );
    }
    Ok(GroundStateRecord {
        mass: spectral::spectral_mass(&spec, grid),
        boundary_mass_fraction: u.boundary_mass_fraction(),
        boundary_sup: u.boundary_sup() / u.sup_norm(),
        field: u,
        grid,
        s1,
        s2,
        p,
        lambda,
        energy,
        triple,
        q_residual,
        el_residual: it.el_residual,
        iterations: it.iterations,
        converged,
    })
}

/// φ solving (−Δ)^{s1}φ + φ = φ^{p−1}; λ is reported as 1.
pub fn solve_single_fractional(
    s1: f64,
    p: f64,
    grid: GridSpec,
    seed: Option<&Field>,
    opts: &PetviashviliOptions,
) -> Result<GroundStateRecord> {
    if !(s1 > 0.0 && s1 <= 1.0) {
        return Err(Error::InvalidOrder(s1));
    }
    functionals::check_exponent(p, s1, grid.dim())?;
    let default;
    let seed = match seed {
        Some(s) => s,
        None => {
            default = gaussian_seed(grid, default_width(grid, s1, None, 1.0), 1.0);
            &default
        }
    };
    check_seed(seed, grid)?;
    let k = spectral::elliptic_symbol(grid, s1, None, 1.0)?;
    let it = petviashvili(k.symbol(), p, seed, opts)?;
    assemble(it, s1, None, p, 1.0, opts)
}

/// u solving (−Δ)^{s1}u + (−Δ)^{s2}u + λu = u^{p−1} at fixed λ > 0.
pub fn solve_mixed_fixed_lambda(
    params: &ModelParams,
    lambda: f64,
    grid: GridSpec,
    seed: Option<&Field>,
    opts: &PetviashviliOptions,
) -> Result<GroundStateRecord> {
    params.validate()?;
    if grid.dim() != params.dim {
        return Err(Error::InvalidParams(format!(
            "grid is {}D but params are {}D",
            grid.dim(),
            params.dim
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "need lambda > 0, got {lambda}"
        )));
    }
    let default;
    let seed = match seed {
        None => {
            let w = default_width(grid, params.s1, Some(params.s2), lambda);
            let amp = lambda.powf(1.0 / (params.p - 2.0));
            log::debug!(
                "mixed solve at lambda = {lambda:e}: Gaussian seed width {w:e}, amplitude {amp:e}"
            );
            default = gaussian_seed(grid, w, amp);
            &default
        }
        Some(s) => {
            log::debug!(
                "mixed solve at lambda = {lambda:e}: caller seed, sup {:e}",
                s.sup_norm()
            );
            s
        }
    };
    check_seed(seed, grid)?;
    let k = spectral::elliptic_symbol(grid, params.s1, Some(params.s2), lambda)?;
    let it = petviashvili(k.symbol(), params.p, seed, opts)?;
    assemble(it, params.s1, Some(params.s2), params.p, lambda, opts)
}

/// Where the stationary solves of a shooting run live.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum GridChoice {
    /// One grid for every λ.
    Fixed(GridSpec),
    /// A grid rescaled to the solution width at each λ.
    Scaled(ScaledGrid),
}

impl From<GridSpec> for GridChoice {
    fn from(g: GridSpec) -> Self {
        GridChoice::Fixed(g)
    }
}

impl From<ScaledGrid> for GridChoice {
    fn from(g: ScaledGrid) -> Self {
        GridChoice::Scaled(g)
    }
}

/// Box of `widths_per_box` solution widths sampled with about
/// `points_per_width` points per width, where the width at λ is
/// max(λ^{−1/(2s1)}, λ^{−1/(2s2)}). The point count is the same for every λ,
/// so the box length varies continuously along the shooting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaledGrid {
    pub dim: usize,
    pub widths_per_box: f64,
    pub points_per_width: f64,
}

impl ScaledGrid {
    pub fn width(params: &ModelParams, lambda: f64) -> f64 {
        lambda
            .powf(-0.5 / params.s1)
            .max(lambda.powf(-0.5 / params.s2))
    }

    pub fn grid_for(&self, params: &ModelParams, lambda: f64) -> Result<GridSpec> {
        let n = ((self.widths_per_box * self.points_per_width).ceil() as usize)
            .next_power_of_two()
            .max(16);
        GridSpec::new(
            self.dim,
            n,
            self.widths_per_box * Self::width(params, lambda),
        )
    }
}

impl GridChoice {
    pub fn grid_for(&self, params: &ModelParams, lambda: f64) -> Result<GridSpec> {
        match self {
            GridChoice::Fixed(g) => Ok(*g),
            GridChoice::Scaled(s) => s.grid_for(params, lambda),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            GridChoice::Fixed(g) => g.dim(),
            GridChoice::Scaled(s) => s.dim,
        }
    }
}

/// Options of the λ shooting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShootOptions {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub scan_points: usize,
    /// Decades the scan may be extended past either end when the masses at
    /// that end are still moving toward the target.
    pub max_extra_decades: usize,
    pub mass_tol: f64,
    pub max_secant: usize,
    /// Scan points whose boundary mass fraction exceeds this are unusable.
    pub max_boundary_fraction: f64,
    #[serde(skip)]
    pub execution: Execution,
    pub solver: PetviashviliOptions,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            lambda_min: 1e-3,
            lambda_max: 1e3,
            scan_points: 25,
            max_extra_decades: 5,
            mass_tol: 1e-6,
            max_secant: 60,
            max_boundary_fraction: 1e-3,
            execution: Execution::default(),
            solver: PetviashviliOptions::default(),
        }
    }
}

fn clipped_seed(f: &Field) -> Field {
    let values = f
        .values()
        .iter()
        .map(|v| Complex64::new(v.re.max(0.0), 0.0))
        .collect();
    Field::new(f.grid(), values).expect("finite")
}

/// One scan sample: λ and the solve, if it was usable.
type ScanPoint = (f64, Option<GroundStateRecord>);

fn scan_solve(
    params: &ModelParams,
    lambda: f64,
    grid: &GridChoice,
    opts: &ShootOptions,
) -> Option<GroundStateRecord> {
    let g = grid.grid_for(params, lambda).ok()?;
    let rec = solve_mixed_fixed_lambda(params, lambda, g, None, &opts.solver).ok()?;
    (rec.el_residual <= opts.solver.el_tol
        && rec.boundary_mass_fraction <= opts.max_boundary_fraction)
        .then_some(rec)
}

fn find_bracket(scan: &[ScanPoint], c: f64) -> Option<(usize, usize)> {
    scan.windows(2)
        .enumerate()
        .find_map(|(i, w)| match (&w[0].1, &w[1].1) {
            (Some(a), Some(b)) if (a.mass - c) * (b.mass - c) <= 0.0 => Some((i, i + 1)),
            _ => None,
        })
}

/// Find λ > 0 whose stationary state has mass `c`.
///
/// A log-spaced scan of λ locates an adjacent pair of usable solves whose
/// masses bracket `c`; the bracket is then refined by Illinois-safeguarded
/// secant steps in (log λ, log mass).
pub fn mass_shoot(
    params: &ModelParams,
    c: f64,
    grid: impl Into<GridChoice>,
    opts: &ShootOptions,
) -> Result<GroundStateRecord> {
    let grid = grid.into();
    params.validate()?;
    if grid.dim() != params.dim {
        return Err(Error::InvalidParams(format!(
            "grid is {}D but params are {}D",
            grid.dim(),
            params.dim
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!("need c > 0, got {c}")));
    }
    let m = opts.scan_points.max(2);
    let (l0, l1) = (opts.lambda_min.ln(), opts.lambda_max.ln());
    let lambdas: Vec<f64> = (0..m)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (m - 1) as f64).exp())
        .collect();
    let solved = exec::map(opts.execution, &lambdas, |&lam| {
        scan_solve(params, lam, &grid, opts)
    });
    let mut scan: Vec<ScanPoint> = lambdas.into_iter().zip(solved).collect();

    let toward = |a: &ScanPoint, b: &ScanPoint| match (&a.1, &b.1) {
        (Some(x), Some(y)) => (y.mass - x.mass) * (c - y.mass) > 0.0,
        _ => false,
    };
    let mut extra_hi = 0;
    let mut extra_lo = 0;
    while find_bracket(&scan, c).is_none() {
        let k = scan.len();
        if extra_hi < opts.max_extra_decades && toward(&scan[k - 2], &scan[k - 1]) {
            let lam = scan[k - 1].0 * 10.0;
            scan.push((lam, scan_solve(params, lam, &grid, opts)));
            extra_hi += 1;
        } else if extra_lo < opts.max_extra_decades && toward(&scan[1], &scan[0]) {
            let lam = scan[0].0 / 10.0;
            scan.insert(0, (lam, scan_solve(params, lam, &grid, opts)));
            extra_lo += 1;
        } else {
            break;
        }
    }
    let table: Vec<(f64, f64)> = scan
        .iter()
        .filter_map(|(l, r)| r.as_ref().map(|r| (*l, r.mass)))
        .collect();
    let Some((i, j)) = find_bracket(&scan, c) else {
        return Err(Error::MassUnreachable { target: c, table });
    };
    let mut lo = scan[i].1.take().expect("bracket ends are usable");
    let mut hi = scan[j].1.take().expect("bracket ends are usable");
    for r in [&lo, &hi] {
        if ((r.mass - c) / c).abs() <= opts.mass_tol {
            return Ok(r.clone());
        }
    }
    let g = |r: &GroundStateRecord| r.mass.ln() - c.ln();
    let (mut glo, mut ghi) = (g(&lo), g(&hi));
    let mut side = 0i8;
    for _ in 0..opts.max_secant {
        let (xl, xh) = (lo.lambda.ln(), hi.lambda.ln());
        let mut x = xl - glo * (xh - xl) / (ghi - glo);
        if !(x > xl.min(xh) && x < xl.max(xh)) {
            x = 0.5 * (xl + xh);
        }
        let lam = x.exp();
        let g_lam = grid.grid_for(params, lam)?;
        let near = if glo.abs() < ghi.abs() { &lo } else { &hi };
        let seed = (near.grid == g_lam).then(|| clipped_seed(&near.field));
        let rec = solve_mixed_fixed_lambda(params, lam, g_lam, seed.as_ref(), &opts.solver)?;
        let gx = g(&rec);
        if ((rec.mass - c) / c).abs() <= opts.mass_tol {
            return Ok(rec);
        }
        if gx * glo > 0.0 {
            lo = rec;
            glo = gx;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = rec;
            ghi = gx;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::MassUnreachable { target: c, table })
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaSample {
    pub c: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub q_residual: f64,
    pub el_residual: f64,
    pub converged: bool,
}

/// γ(c) = E(u_c) along the computed ground-state branch.
#[derive(Clone, Debug, Serialize)]
pub struct GammaBranch {
    pub model: ModelParams,
    pub samples: Vec<GammaSample>,
    /// Masses that could not be reached, with the error message.
    pub skipped: Vec<(f64, String)>,
    #[serde(skip)]
    pub records: Vec<GroundStateRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub slack: f64,
    /// Pairs (c_i, c_{i+1}) with γ(c_{i+1}) > γ(c_i) + slack.
    pub increases: Vec<(f64, f64)>,
    /// Pairs with λ > 0 at both ends where γ did not strictly decrease.
    pub non_strict: Vec<(f64, f64)>,
}

impl MonotonicityReport {
    pub fn nonincreasing(&self) -> bool {
        self.increases.is_empty()
    }
}

impl GammaBranch {
    pub fn monotonicity(&self, slack: f64) -> MonotonicityReport {
        let mut increases = Vec::new();
        let mut non_strict = Vec::new();
        for w in self.samples.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.gamma > a.gamma + slack {
                increases.push((a.c, b.c));
            }
            if a.lambda > 0.0 && b.lambda > 0.0 && b.gamma >= a.gamma {
                non_strict.push((a.c, b.c));
            }
        }
        MonotonicityReport {
            slack,
            increases,
            non_strict,
        }
    }

    /// CSV with columns c, gamma, lambda, q_residual, el_residual.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,gamma,lambda,q_residual,el_residual\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                s.c, s.gamma, s.lambda, s.q_residual, s.el_residual
            ));
        }
        out
    }
}

/// Shoot every mass in `c_list` (in parallel per the execution mode) and
/// assemble the branch sorted by c.
pub fn gamma_branch(
    params: &ModelParams,
    c_list: &[f64],
    grid: impl Into<GridChoice>,
    opts: &ShootOptions,
) -> Result<GammaBranch> {
    let grid = grid.into();
    params.validate()?;
    let mut cs = c_list.to_vec();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    let inner = ShootOptions {
        execution: Execution::Sequential,
        ..*opts
    };
    let results = exec::map(opts.execution, &cs, |&c| {
        mass_shoot(params, c, grid, &inner)
    });
    let mut samples = Vec::new();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (c, r) in cs.iter().zip(results) {
        match r {
            Ok(rec) if rec.converged => {
                samples.push(GammaSample {
                    c: *c,
                    gamma: rec.energy,
                    lambda: rec.lambda,
                    q_residual: rec.q_residual,
                    el_residual: rec.el_residual,
                    converged: rec.converged,
                });
                records.push(rec);
            }
            Ok(rec) => skipped.push((
                *c,
                format!(
                    "record not converged: el = {:.3e}, q = {:.3e}",
                    rec.el_residual, rec.q_residual
                ),
            )),
            Err(e) => skipped.push((*c, e.to_string())),
        }
    }
    Ok(GammaBranch {
        model: *params,
        samples,
        skipped,
        records,
    })
}

/// See [`GroundStateRecord::radial_monotonicity_defect`].
pub fn radial_monotonicity_defect(u: &Field) -> f64 {
    let g = u.grid();
    let n = g.n_per_axis() as i64;
    let c = g.center_index() as i64;
    let dim = g.dim();
    let sup = u.sup_norm();
    let mut worst = f64::NEG_INFINITY;
    // directions with entries in {-1, 0, 1}, not all zero
    let mut dirs = Vec::new();
    for code in 0..3usize.pow(dim as u32) {
        let mut d = [0i64; 3];
        let mut k = code;
        for slot in d.iter_mut().take(dim) {
            *slot = (k % 3) as i64 - 1;
            k /= 3;
        }
        if d.iter().any(|&x| x != 0) {
            dirs.push(d);
        }
    }
    for d in dirs {
        let mut prev = f64::INFINITY;
        for step in 0..n / 2 {
            let mut m = [0usize; 3];
            for a in 0..dim {
                m[a] = (c + d[a] * step).rem_euclid(n) as usize;
            }
            let v = u.values()[g.ravel(m)].norm() / sup;
            worst = worst.max(v - prev);
            prev = v;
        }
    }
    worst
}

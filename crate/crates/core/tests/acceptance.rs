//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. `ACCEPTANCE_ONLY=3,8` runs a subset.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use fracwave::diagnostics::{self, BlowupVerdict};
use fracwave::evolution::{self, StepPolicy, Verdict};
use fracwave::functionals::{self, FunctionalTriple};
use fracwave::groundstate::{
    self, GroundStateRecord, PetviashviliOptions, ScaledGrid, ShootOptions,
};
use fracwave::{sampling, spectral, Field, GridSpec, ModelParams, Result};
use num_complex::Complex64;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// ---------- independent oracles ----------

/// Naive O(n²) DFT of a 1D field, unnormalized.
fn naive_dft(u: &Field) -> Vec<Complex64> {
    let n = u.grid().n_per_axis();
    let table: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64))
        .collect();
    let v = u.values();
    (0..n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for x in v {
                acc += x * table[idx];
                idx += m;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect()
}

/// ∫|ξ|^{2s}|û|² for a 1D field, from the naive DFT.
fn oracle_seminorm_sq(u: &Field, s: f64) -> f64 {
    let g = u.grid();
    let (n, l) = (g.n_per_axis(), g.box_length());
    let coef = naive_dft(u);
    let mut sum = 0.0;
    for (j, c) in coef.iter().enumerate() {
        let m = if j <= n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        };
        let k = 2.0 * PI * m / l;
        if k != 0.0 {
            sum += k.abs().powf(2.0 * s) * c.norm_sqr();
        }
    }
    sum * l / (n as f64 * n as f64)
}

fn oracle_mass(u: &Field) -> f64 {
    u.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * u.grid().cell_volume()
}

fn oracle_lp(u: &Field, p: f64) -> f64 {
    u.values().iter().map(|v| v.norm().powf(p)).sum::<f64>() * u.grid().cell_volume()
}

/// Weinstein quotient ∫|u|^p / (a^{N(p−2)/(4s)} M^{p/2 − N(p−2)/(4s)}), 1D.
fn oracle_weinstein(u: &Field, s: f64, p: f64) -> f64 {
    let e = (p - 2.0) / (4.0 * s);
    oracle_lp(u, p) / (oracle_seminorm_sq(u, s).powf(e) * oracle_mass(u).powf(0.5 * p - e))
}

fn oracle_fiber_energy(t: &FunctionalTriple, m: &ModelParams, x: f64) -> f64 {
    let beta = m.dim as f64 * (m.p - 2.0) / 2.0;
    0.5 * x.powf(2.0 * m.s1) * t.a1 + 0.5 * x.powf(2.0 * m.s2) * t.a2 - x.powf(beta) * t.b / m.p
}

fn oracle_fiber_q(t: &FunctionalTriple, m: &ModelParams, x: f64) -> f64 {
    let beta = m.dim as f64 * (m.p - 2.0) / 2.0;
    m.s1 * x.powf(2.0 * m.s1) * t.a1 + m.s2 * x.powf(2.0 * m.s2) * t.a2
        - beta / m.p * x.powf(beta) * t.b
}

/// Roots of the fibered Q on a dense log scan over [1e-6, 1e6], each refined
/// by bisection.
fn oracle_fiber_roots(t: &FunctionalTriple, m: &ModelParams) -> Vec<f64> {
    let pts = 24_001;
    let ts: Vec<f64> = (0..pts)
        .map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / (pts - 1) as f64))
        .collect();
    let mut roots = Vec::new();
    for w in ts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (qlo, qhi) = (oracle_fiber_q(t, m, lo), oracle_fiber_q(t, m, hi));
        if qlo == 0.0 {
            roots.push(lo);
            continue;
        }
        if qlo * qhi > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if oracle_fiber_q(t, m, mid) * qlo > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

/// max_t E(u_t) by dense log scan then golden-section refinement.
fn oracle_fiber_max(t: &FunctionalTriple, m: &ModelParams) -> f64 {
    let pts = 20_001;
    let x = |i: usize| 10f64.powf(-3.0 + 6.0 * i as f64 / (pts - 1) as f64);
    let best = (0..pts)
        .max_by(|&i, &j| {
            oracle_fiber_energy(t, m, x(i)).total_cmp(&oracle_fiber_energy(t, m, x(j)))
        })
        .unwrap();
    let (mut a, mut b) = (x(best.saturating_sub(1)), x((best + 1).min(pts - 1)));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if oracle_fiber_energy(t, m, c) > oracle_fiber_energy(t, m, d) {
            b = d;
        } else {
            a = c;
        }
    }
    oracle_fiber_energy(t, m, 0.5 * (a + b))
}

fn gaussian(g: GridSpec, w: f64, amp: f64) -> Result<Field> {
    Field::from_real_fn(g, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        amp * (-r2 / (2.0 * w * w)).exp()
    })
}

/// φ for s1 = 0.75, p = 5 in 1D, shared by criteria 4 and 6.
fn phi_075_quintic() -> &'static GroundStateRecord {
    static PHI: OnceLock<GroundStateRecord> = OnceLock::new();
    PHI.get_or_init(|| {
        groundstate::solve_single_fractional(
            0.75,
            5.0,
            GridSpec::new(1, 16384, 640.0).unwrap(),
            None,
            &PetviashviliOptions::default(),
        )
        .expect("phi solve")
    })
}

// ---------- criteria ----------

fn c01_spectral() -> Result<Outcome> {
    let g2 = GridSpec::new(2, 32, 2.0 * PI)?;
    let mut worst_pw: f64 = 0.0;
    for (m, s) in [
        ([3, -5, 0], 0.6),
        ([1, 0, 0], 0.25),
        ([-7, 11, 0], 1.0),
        ([0, 4, 0], 0.9),
    ] {
        let wave = spectral::plane_wave(g2, m);
        let image = spectral::apply_multiplier(&wave, &spectral::build_fractional_symbol(g2, s)?)?;
        let k2 = (m[0] * m[0] + m[1] * m[1]) as f64;
        worst_pw = worst_pw.max(image.max_abs_diff(&wave.scale(k2.powf(s)))?);
    }
    let g = GridSpec::new(1, 512, 40.0)?;
    let gauss = Field::from_real_fn(g, |x| (-x[0] * x[0]).exp())?;
    let lap = spectral::apply_multiplier(&gauss, &spectral::build_fractional_symbol(g, 1.0)?)?;
    let exact = Field::from_real_fn(g, |x| (2.0 - 4.0 * x[0] * x[0]) * (-x[0] * x[0]).exp())?;
    let gerr = lap.max_abs_diff(&exact)?;
    outcome(
        worst_pw <= 1e-12 && gerr <= 1e-10,
        format!(
            "plane-wave err {worst_pw:.2e} (<= 1e-12), Gaussian -u'' err {gerr:.2e} (<= 1e-10)"
        ),
    )
}

fn c02_classical_soliton() -> Result<Outcome> {
    let rec = groundstate::solve_single_fractional(
        1.0,
        4.0,
        GridSpec::new(1, 1024, 80.0)?,
        None,
        &PetviashviliOptions::default(),
    )?;
    let sech = Field::from_real_fn(rec.grid, |x| 2f64.sqrt() / x[0].cosh())?;
    let err = rec.field.max_abs_diff(&sech)?;
    let t = rec.triple;
    let r1 = rel(t.a1 / rec.mass, 1.0 / 3.0);
    let r2 = rel(t.b / t.a1, 4.0);
    let ra = rel(t.a1, 4.0 / 3.0);
    let rb = rel(t.b, 16.0 / 3.0);
    let worst = r1.max(r2).max(ra).max(rb);
    outcome(
        rec.converged && err <= 1e-6 && worst <= 1e-5,
        format!(
            "converged {}, max err {err:.2e} (<= 1e-6), a1/M rel {r1:.1e}, b/a1 rel {r2:.1e}, a1 rel {ra:.1e}, b rel {rb:.1e} (<= 1e-5)",
            rec.converged
        ),
    )
}

/// On the stated box the Pohozaev residual has a periodization floor of order
/// L^{-2}, so full convergence is also checked on a box 8x longer at the same
/// spacing.
fn c03_half_laplacian() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    for (n, l, need_q) in [(8192, 800.0, false), (65536, 6400.0, true)] {
        let rec = groundstate::solve_single_fractional(
            0.5,
            3.0,
            GridSpec::new(1, n, l)?,
            None,
            &PetviashviliOptions::default(),
        )?;
        let exact = Field::from_real_fn(rec.grid, |x| 2.0 / (1.0 + x[0] * x[0]))?;
        let err = rec.field.max_abs_diff(&exact)?;
        let ok =
            err <= 1e-4 && rec.el_residual <= groundstate::EL_TOL && (!need_q || rec.converged);
        pass &= ok;
        lines.push(format!(
            "n {n} L {l}: el {:.1e}, q {:.1e}, converged {}, max err {err:.2e}",
            rec.el_residual, rec.q_residual, rec.converged
        ));
    }
    outcome(pass, format!("{} (err <= 1e-4)", lines.join("; ")))
}

fn c04_gn_closed_form() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    let cases: Vec<(f64, f64, GroundStateRecord)> = vec![
        (
            1.0,
            4.0,
            groundstate::solve_single_fractional(
                1.0,
                4.0,
                GridSpec::new(1, 1024, 80.0)?,
                None,
                &PetviashviliOptions::default(),
            )?,
        ),
        (
            1.0,
            8.0,
            groundstate::solve_single_fractional(
                1.0,
                8.0,
                GridSpec::new(1, 1024, 80.0)?,
                None,
                &PetviashviliOptions::default(),
            )?,
        ),
        (0.75, 5.0, phi_075_quintic().clone()),
    ];
    for (s1, p, rec) in &cases {
        let closed = functionals::gn_constant_from_groundstate(&rec.field, *s1, *p, 1)?;
        let direct = oracle_weinstein(&rec.field, *s1, *p);
        let r = rel(closed, direct);
        pass &= r <= 1e-4;
        lines.push(format!("(s1 {s1}, p {p}) rel {r:.1e}"));
    }
    let c14 = functionals::gn_constant_from_groundstate(&cases[0].2.field, 1.0, 4.0, 1)?;
    let ra = rel(c14, 1.0 / 3f64.sqrt());
    pass &= ra <= 1e-4;
    outcome(
        pass,
        format!(
            "{}; C(1,4) vs 1/sqrt(3) rel {ra:.1e} (all <= 1e-4)",
            lines.join(", ")
        ),
    )
}

fn c05_critical_mass() -> Result<Outcome> {
    let rec = groundstate::solve_single_fractional(
        1.0,
        6.0,
        GridSpec::new(1, 1024, 80.0)?,
        None,
        &PetviashviliOptions::default(),
    )?;
    let c = functionals::gn_constant_from_groundstate(&rec.field, 1.0, 6.0, 1)?;
    let cm = functionals::critical_mass(1, 1.0, c)?;
    let r = rel(cm, 3f64.sqrt() * PI / 2.0);
    outcome(
        r <= 1e-3,
        format!("critical mass {cm:.6} vs sqrt(3) pi/2, rel {r:.1e} (<= 1e-3)"),
    )
}

fn c06_subthreshold_energy() -> Result<Outcome> {
    let phi = phi_075_quintic();
    let c = functionals::gn_constant_from_groundstate(&phi.field, 0.75, 5.0, 1)?;
    let cm = functionals::critical_mass(1, 0.75, c)?;
    let m = ModelParams::new(0.75, 0.5, 5.0, 1)?;
    let g = GridSpec::new(1, 1024, 80.0)?;
    let mut rng = sampling::rng(6);
    let mut min_e = f64::INFINITY;
    for i in 0..1000 {
        let u = sampling::random_field(g, &sampling::BumpSpec::default(), &mut rng);
        let frac = if i % 10 == 0 {
            1.0
        } else {
            rng.gen_range(0.05..=1.0)
        };
        let v = sampling::rescale_to_mass(&u, frac * cm)?;
        min_e = min_e.min(functionals::energy(&v, &m)?);
    }
    outcome(
        min_e >= -1e-6,
        format!("c = {cm:.6}, min E over 1000 fields {min_e:.3e} (>= -1e-6)"),
    )
}

fn c07_fibration() -> Result<Outcome> {
    let m = ModelParams::new(0.75, 0.5, 6.0, 1)?;
    let mut rng = sampling::rng(7);
    let (mut fd_worst, mut root_worst): (f64, f64) = (0.0, 0.0);
    let (mut bad_unique, mut bad_inside, mut q_neg) = (0, 0, 0);
    for _ in 0..1000 {
        let tri = sampling::random_triple(&mut rng, -1.0, 1.0);
        let t = 10f64.powf(rng.gen_range(-0.5..0.5));
        let h = 1e-5 * t;
        let fd = (functionals::fibered_energy(&tri, &m, t + h)
            - functionals::fibered_energy(&tri, &m, t - h))
            / (2.0 * h);
        let q = functionals::fibered_q(&tri, &m, t);
        let beta = m.scaling_exponent();
        let scale = m.s1 * t.powf(2.0 * m.s1) * tri.a1
            + m.s2 * t.powf(2.0 * m.s2) * tri.a2
            + beta / m.p * t.powf(beta) * tri.b;
        fd_worst = fd_worst.max((t * fd - q).abs() / scale);

        let roots = oracle_fiber_roots(&tri, &m);
        if roots.len() != 1 {
            bad_unique += 1;
            continue;
        }
        let tu = functionals::project_to_pohozaev(&tri, &m)?;
        root_worst = root_worst.max(rel(tu, roots[0]));
        if oracle_fiber_q(&tri, &m, 1.0) < 0.0 {
            q_neg += 1;
            if tu >= 1.0 || tu.is_nan() {
                bad_inside += 1;
            }
        }
    }
    outcome(
        fd_worst <= 1e-6 && root_worst <= 1e-8 && bad_unique == 0 && bad_inside == 0,
        format!(
            "FD rel {fd_worst:.1e} (<= 1e-6), root rel {root_worst:.1e} (<= 1e-8), non-unique {bad_unique}, Q<0 cases {q_neg} with t_u >= 1: {bad_inside}"
        ),
    )
}

fn c08_branch() -> Result<Outcome> {
    let m = ModelParams::new(0.75, 0.5, 6.0, 1)?;
    let grid = ScaledGrid {
        dim: 1,
        widths_per_box: 8000.0,
        points_per_width: 16.0,
    };
    let branch =
        groundstate::gamma_branch(&m, &[0.5, 1.0, 2.0, 4.0], grid, &ShootOptions::default())?;
    let mut pass = branch.skipped.is_empty() && branch.records.len() == 4;
    let mut lines = Vec::new();
    for rec in &branch.records {
        let fiber_max = oracle_fiber_max(&rec.triple, &m);
        let gap = rel(rec.energy, fiber_max);
        let defect = rec.field.recenter().moduli();
        let mono = groundstate::radial_monotonicity_defect(&Field::from_real(rec.grid, defect)?);
        let ok = rec.q_residual <= 1e-6 && gap <= 1e-6 && rec.lambda > 0.0 && mono <= 1e-6;
        pass &= ok;
        lines.push(format!(
            "c {:.1}: q {:.1e} fiber gap {gap:.1e} lambda {:.4} mono {mono:.1e}",
            rec.mass, rec.q_residual, rec.lambda
        ));
    }
    let mono = branch.monotonicity(1e-6);
    pass &= mono.nonincreasing();
    let gammas: Vec<String> = branch
        .samples
        .iter()
        .map(|s| format!("{:.5}", s.gamma))
        .collect();
    outcome(
        pass,
        format!(
            "{}; gamma [{}] nonincreasing {}",
            lines.join("; "),
            gammas.join(", "),
            mono.nonincreasing()
        ),
    )
}

fn c09_conservation() -> Result<Outcome> {
    let m = ModelParams::new(0.75, 0.6, 4.0, 1)?;
    let u = gaussian(GridSpec::new(1, 1024, 80.0)?, 1.0, 1.0)?;
    let tr = evolution::evolve(&u, 10.0, &StepPolicy::default(), &m)?;
    let (md, ed) = (tr.max_mass_drift(), tr.energy_drift_per_time());
    outcome(
        tr.verdict == Verdict::CompletedHorizon && md <= 1e-10 && ed <= 1e-6,
        format!(
            "T = {:.1}, mass drift {md:.2e} (<= 1e-10), energy drift/t {ed:.2e} (<= 1e-6)",
            tr.final_time()
        ),
    )
}

fn c10_standing_wave() -> Result<Outcome> {
    let m = ModelParams::new(0.75, 0.6, 4.0, 1)?;
    let grid = ScaledGrid {
        dim: 1,
        widths_per_box: 4000.0,
        points_per_width: 8.0,
    }
    .grid_for(&m, 1.0)?;
    let uc = groundstate::solve_mixed_fixed_lambda(
        &m,
        1.0,
        grid,
        None,
        &PetviashviliOptions::default(),
    )?;
    let pol = StepPolicy {
        monitor_every: 50,
        snapshot_every: 1,
        ..Default::default()
    };
    let tr = evolution::evolve(&uc.field, 5.0, &pol, &m)?;
    let reference = uc.field.moduli();
    let mut worst: f64 = 0.0;
    for f in tr
        .snapshots
        .iter()
        .map(|(_, f)| f)
        .chain(std::iter::once(&tr.final_field))
    {
        for (a, b) in f.moduli().iter().zip(&reference) {
            worst = worst.max((a - b).abs());
        }
    }
    outcome(
        uc.converged && tr.final_time() >= 5.0 - 1e-9 && worst <= 1e-5,
        format!(
            "u_c: c {:.5}, lambda 1, q {:.1e}, converged {}; {} samples to t = {:.2}, max ||psi|-|u_c|| {worst:.2e} (<= 1e-5)",
            uc.mass,
            uc.q_residual,
            uc.converged,
            tr.snapshots.len() + 1,
            tr.final_time()
        ),
    )
}

fn c11_dichotomy() -> Result<Outcome> {
    let m = ModelParams::new(0.75, 0.6, 4.0, 2)?;
    let phi = groundstate::solve_single_fractional(
        0.75,
        4.0,
        GridSpec::new(2, 2048, 160.0)?,
        None,
        &PetviashviliOptions::default(),
    )?;
    let global = GridSpec::new(2, 128, 32.0)?;
    let blow = GridSpec::new(2, 512, 20.0)?;
    let suite = [
        (global, 1.0, 0.7, BlowupVerdict::GlobalPredicted),
        (global, 1.2, 0.6, BlowupVerdict::GlobalPredicted),
        (global, 1.5, 0.5, BlowupVerdict::GlobalPredicted),
        (blow, 1.0, 3.0, BlowupVerdict::FiniteTimeBlowupPredicted),
        (blow, 0.7, 4.0, BlowupVerdict::FiniteTimeBlowupPredicted),
        (blow, 1.5, 2.5, BlowupVerdict::FiniteTimeBlowupPredicted),
    ];
    let pol = StepPolicy {
        adapt: true,
        blowup_gradient_factor: 3.0,
        ..Default::default()
    };
    let mut pass = phi.converged;
    let mut lines = Vec::new();
    for (g, w, amp, label) in suite {
        let u = gaussian(g, w, amp)?;
        let class = diagnostics::classify(&u, &phi, &m)?;
        let tr = evolution::evolve(&u, 20.0, &pol, &m)?;
        let flips = diagnostics::monitor_invariance(&tr, &phi, &m)?.flip_count();
        let agree = match label {
            BlowupVerdict::GlobalPredicted => {
                tr.verdict == Verdict::CompletedHorizon && tr.max_gradient_growth() < 3.0
            }
            _ => tr.verdict.is_blowup(),
        };
        let ok = class.verdict == label && agree && flips == 0;
        pass &= ok;
        lines.push(format!(
            "w {w} amp {amp}: {:?}/{:?} growth {:.2} flips {flips}",
            class.verdict,
            tr.verdict,
            tr.max_gradient_growth()
        ));
    }
    outcome(pass, lines.join("; "))
}

fn c12_instability() -> Result<Outcome> {
    let m = ModelParams::new(0.75, 0.5, 6.0, 1)?;
    let lambda = 1e4;
    let grid = ScaledGrid {
        dim: 1,
        widths_per_box: 1000.0,
        points_per_width: 128.0,
    }
    .grid_for(&m, lambda)?;
    let uc = groundstate::solve_mixed_fixed_lambda(
        &m,
        lambda,
        grid,
        None,
        &PetviashviliOptions::default(),
    )?;
    let dt0 = 1e-3 / lambda;
    let pol = StepPolicy {
        dt0,
        dt_floor: 1e-6 * dt0,
        adapt: true,
        blowup_gradient_factor: 10.0,
        monitor_every: 20,
        ..Default::default()
    };
    let mut pass = uc.converged;
    let mut dists = Vec::new();
    let mut lines = Vec::new();
    for tau in [1.05, 1.1, 1.2] {
        let r = diagnostics::instability_experiment(&uc, tau, 100.0 / lambda, &pol, &m)?;
        let ok = r.energy_v < r.energy_uc && r.q_v < 0.0 && r.max_growth >= 10.0;
        pass &= ok;
        dists.push(r.h_s1_distance);
        lines.push(format!(
            "tau {tau}: E(v)-E(u_c) {:.2e} Q(v) {:.2e} growth {:.2} dist {:.3}",
            r.energy_v - r.energy_uc,
            r.q_v,
            r.max_growth,
            r.h_s1_distance
        ));
    }
    pass &= dists.windows(2).all(|w| w[0] < w[1]);
    outcome(
        pass,
        format!(
            "u_c: c {:.4}, lambda {lambda:.0e}, q {:.1e}; {}",
            uc.mass,
            uc.q_residual,
            lines.join("; ")
        ),
    )
}

fn c13_virial() -> Result<Outcome> {
    let m = ModelParams::new(0.75, 0.6, 5.0, 1)?;
    let w = 0.5;
    let u = gaussian(GridSpec::new(1, 16384, 250.0)?, w, 2.5)?;
    let pol = StepPolicy {
        adapt: true,
        virial_radius: Some(20.0 * w),
        blowup_gradient_factor: 4.0,
        monitor_every: 5,
        ..Default::default()
    };
    let tr = evolution::evolve(&u, 20.0, &pol, &m)?;
    let e0 = tr.energy_series[0];
    let bound = 4.0 * m.s1 * e0 + 0.1 * e0.abs();
    let worst = (1..tr.times.len())
        .map(|k| (tr.virial_series[k] - tr.virial_series[k - 1]) / (tr.times[k] - tr.times[k - 1]))
        .fold(f64::NEG_INFINITY, f64::max);
    outcome(
        e0 < 0.0 && worst < bound,
        format!(
            "E0 {e0:.4}, max slope {worst:.3} < bound {bound:.3}, {} samples, verdict {:?} at t = {:.4}",
            tr.times.len(),
            tr.verdict,
            tr.final_time()
        ),
    )
}

type Criterion = (usize, &'static str, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 13] = [
    (1, "spectral correctness", c01_spectral),
    (2, "classical soliton recovery", c02_classical_soliton),
    (3, "half-Laplacian algebraic soliton", c03_half_laplacian),
    (4, "GN constant closed form", c04_gn_closed_form),
    (5, "critical mass identity", c05_critical_mass),
    (6, "subthreshold energy positivity", c06_subthreshold_energy),
    (7, "fibration calculus", c07_fibration),
    (8, "mixed ground-state branch", c08_branch),
    (9, "conservation laws", c09_conservation),
    (10, "standing wave", c10_standing_wave),
    (11, "dichotomy consistency", c11_dichotomy),
    (12, "instability along the fiber", c12_instability),
    (13, "virial slope", c13_virial),
];

fn main() -> ExitCode {
    // libtest flags such as --nocapture or --test-threads are ignored
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut failed = 0;
    let mut total = Duration::ZERO;
    for (id, name, run) in CRITERIA {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        total += took;
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "[{id:02}] {} {name} ({:.1} s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!(
        "acceptance: {failed} failed, total {:.1} s",
        total.as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Seeded random fields and functional triples for property checks and
//! sweeps.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::functionals::FunctionalTriple;
use crate::grid::GridSpec;
use crate::spectral;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of the random sums of Gaussians drawn by [`random_field`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpSpec {
    pub max_bumps: usize,
    /// Width range, in box lengths.
    pub width: (f64, f64),
    /// Centers lie within this fraction of the half box.
    pub spread: f64,
    /// Largest plane-wave modulation, in units of the fundamental frequency.
    pub max_boost: i64,
    pub complex: bool,
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self {
            max_bumps: 4,
            width: (0.015, 0.04),
            spread: 0.25,
            max_boost: 3,
            complex: true,
        }
    }
}

/// A sum of 1..=max_bumps Gaussians with random centers, widths, amplitudes
/// and phases. With the default spec every field decays to round-off at the
/// box faces.
pub fn random_field<R: Rng>(grid: GridSpec, spec: &BumpSpec, rng: &mut R) -> Field {
    let l = grid.box_length();
    let k0 = 2.0 * std::f64::consts::PI / l;
    let count = rng.gen_range(1..=spec.max_bumps.max(1));
    let bumps: Vec<_> = (0..count)
        .map(|_| {
            let mut center = [0.0; 3];
            for c in center.iter_mut().take(grid.dim()) {
                *c = rng.gen_range(-spec.spread..=spec.spread) * 0.5 * l;
            }
            let width = rng.gen_range(spec.width.0..=spec.width.1) * l;
            let amp = rng.gen_range(0.2..=1.0);
            let phase = if spec.complex {
                rng.gen_range(0.0..std::f64::consts::TAU)
            } else {
                0.0
            };
            let mut boost = [0.0; 3];
            if spec.complex && spec.max_boost > 0 {
                for b in boost.iter_mut().take(grid.dim()) {
                    *b = rng.gen_range(-spec.max_boost..=spec.max_boost) as f64 * k0;
                }
            }
            (center, width, amp, phase, boost)
        })
        .collect();
    Field::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|(c, w, a, ph, k)| {
                let r2: f64 = (0..3).map(|i| (x[i] - c[i]).powi(2)).sum();
                let arg = ph + (0..3).map(|i| k[i] * x[i]).sum::<f64>();
                Complex64::from_polar(a * (-0.5 * r2 / (w * w)).exp(), arg)
            })
            .sum()
    })
    .expect("finite by construction")
}

/// `u` scaled to ‖u‖₂² = c.
pub fn rescale_to_mass(u: &Field, c: f64) -> Result<Field> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "target mass must be positive, got {c}"
        )));
    }
    let m = spectral::mass(u);
    if m == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(u.scale((c / m).sqrt()))
}

/// Positive triple with log-uniform components in [10^lo, 10^hi].
pub fn random_triple<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> FunctionalTriple {
    let mut draw = || 10f64.powf(rng.gen_range(lo..=hi));
    FunctionalTriple {
        a1: draw(),
        a2: draw(),
        b: draw(),
    }
}

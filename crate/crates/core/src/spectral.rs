//! Fourier transforms on the periodic box, fractional Laplacian symbols, and
//! the quadratures every functional is built from.
//!
//! Convention: the forward transform is the unnormalized DFT and the inverse
//! carries the 1/n^N factor, so discrete Parseval reads
//! `Σ|u_j|² = n^{-N} Σ|û_k|²`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, HashMap<usize, Plans>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(n: usize) -> Plans {
    PLANNER.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry(n)
            .or_insert_with(|| (planner.plan_fft_forward(n), planner.plan_fft_inverse(n)))
            .clone()
    })
}

fn transform_axes(grid: GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = grid.n_per_axis();
    let (fwd, inv) = plans(n);
    let fft = if inverse { inv } else { fwd };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // Last axis is contiguous.
    for line in data.chunks_exact_mut(n) {
        fft.process_with_scratch(line, &mut scratch);
    }
    if grid.dim() == 1 {
        return;
    }
    let total = grid.len();
    // Strided axes: gather a batch of adjacent lines into a contiguous buffer.
    const BATCH: usize = 16;
    let mut buf = vec![Complex64::new(0.0, 0.0); n * BATCH];
    for axis in 0..grid.dim() - 1 {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        let block = stride * n;
        let width = BATCH.min(stride);
        for base in (0..total).step_by(block) {
            for offset in (0..stride).step_by(width) {
                let start = base + offset;
                let lines = &mut buf[..n * width];
                for k in 0..n {
                    let row = &data[start + k * stride..start + k * stride + width];
                    for (c, v) in row.iter().enumerate() {
                        lines[c * n + k] = *v;
                    }
                }
                fft.process_with_scratch(lines, &mut scratch);
                for k in 0..n {
                    let row = &mut data[start + k * stride..start + k * stride + width];
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = lines[c * n + k];
                    }
                }
            }
        }
    }
}

/// In-place unnormalized forward DFT over all axes.
pub fn forward_in_place(grid: GridSpec, data: &mut [Complex64]) {
    debug_assert_eq!(data.len(), grid.len());
    transform_axes(grid, data, false);
}

/// In-place inverse DFT including the 1/n^N normalization.
pub fn inverse_in_place(grid: GridSpec, data: &mut [Complex64]) {
    debug_assert_eq!(data.len(), grid.len());
    transform_axes(grid, data, true);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
}

/// Spectrum û of a field.
pub fn forward(u: &Field) -> Vec<Complex64> {
    let mut data = u.values().to_vec();
    forward_in_place(u.grid(), &mut data);
    data
}

/// Field from a spectrum. Non-finite output is an internal error and panics.
pub fn inverse(grid: GridSpec, mut spectrum: Vec<Complex64>) -> Field {
    inverse_in_place(grid, &mut spectrum);
    Field::from_parts(grid, spectrum)
}

/// Real Fourier symbol m(ξ) stored per mode in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMultiplier {
    grid: GridSpec,
    symbol: Vec<f64>,
}

impl SpectralMultiplier {
    pub fn from_symbol(grid: GridSpec, symbol: Vec<f64>) -> Result<Self> {
        if symbol.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "symbol has {} entries, grid has {}",
                symbol.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, symbol })
    }

    /// The constant symbol `c`.
    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            grid,
            symbol: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    pub fn add(&self, other: &SpectralMultiplier) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            symbol: self
                .symbol
                .iter()
                .zip(&other.symbol)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn product(&self, other: &SpectralMultiplier) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            symbol: self
                .symbol
                .iter()
                .zip(&other.symbol)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            symbol: self.symbol.iter().map(|a| a + c).collect(),
        }
    }

    fn same_grid(&self, other: &SpectralMultiplier) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

fn check_order(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidOrder(s));
    }
    Ok(())
}

/// Symbol |ξ|^{2s} of (−Δ)^s, for s ∈ (0, 1].
pub fn build_fractional_symbol(grid: GridSpec, s: f64) -> Result<SpectralMultiplier> {
    check_order(s)?;
    let symbol = grid.xi_squared().into_iter().map(|x2| x2.powf(s)).collect();
    Ok(SpectralMultiplier { grid, symbol })
}

/// (−Δ)^{s1} + (−Δ)^{s2} + λ; pass `None` for `s2` to drop that term.
pub fn elliptic_symbol(
    grid: GridSpec,
    s1: f64,
    s2: Option<f64>,
    lambda: f64,
) -> Result<SpectralMultiplier> {
    let mut k = build_fractional_symbol(grid, s1)?;
    if let Some(s2) = s2 {
        k = k.add(&build_fractional_symbol(grid, s2)?)?;
    }
    Ok(k.shifted(lambda))
}

/// F⁻¹(m · F u).
pub fn apply_multiplier(u: &Field, m: &SpectralMultiplier) -> Result<Field> {
    if u.grid() != m.grid {
        return Err(Error::GridMismatch);
    }
    let mut spec = forward(u);
    spec.iter_mut().zip(&m.symbol).for_each(|(v, s)| *v *= *s);
    Ok(inverse(u.grid(), spec))
}

/// ∫|u|² by the rectangle rule.
pub fn mass(u: &Field) -> f64 {
    u.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * u.grid().cell_volume()
}

/// Mass evaluated on the spectral side, Σ|û|²·dV/n^N.
pub fn spectral_mass(spectrum: &[Complex64], grid: GridSpec) -> f64 {
    spectrum.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_volume() / grid.len() as f64
}

/// ‖(−Δ)^{s/2}u‖₂² = Σ|ξ|^{2s}|û|²·dV/n^N.
pub fn seminorm_sq(u: &Field, s: f64) -> Result<f64> {
    check_order(s)?;
    let spec = forward(u);
    Ok(seminorms_from_spectrum(&spec, u.grid(), &[s])[0])
}

/// Several seminorms from a single spectrum.
pub fn seminorms_from_spectrum(spectrum: &[Complex64], grid: GridSpec, orders: &[f64]) -> Vec<f64> {
    let xi2 = grid.xi_squared();
    let w = grid.cell_volume() / grid.len() as f64;
    orders
        .iter()
        .map(|&s| {
            spectrum
                .iter()
                .zip(&xi2)
                .map(|(v, &x2)| {
                    if x2 == 0.0 {
                        0.0
                    } else {
                        x2.powf(s) * v.norm_sqr()
                    }
                })
                .sum::<f64>()
                * w
        })
        .collect()
}

/// ∫|u|^p.
pub fn lp_integral(u: &Field, p: f64) -> f64 {
    let dv = u.grid().cell_volume();
    if p == 2.0 {
        return mass(u);
    }
    u.values().iter().map(|v| v.norm().powf(p)).sum::<f64>() * dv
}

/// ‖u‖_p for p ≥ 1.
pub fn norm_lp(u: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "L^p norm needs p >= 1, got {p}"
        )));
    }
    Ok(lp_integral(u, p).powf(1.0 / p))
}

/// Spectral partial derivatives ∂_k u for each axis (Nyquist mode zeroed).
pub fn gradient(u: &Field) -> Vec<Field> {
    let grid = u.grid();
    let spec = forward(u);
    let freqs = grid.axis_frequencies();
    let nyq = grid.n_per_axis() / 2;
    (0..grid.dim())
        .map(|axis| {
            let mut d = spec.clone();
            for (i, v) in d.iter_mut().enumerate() {
                let j = grid.unravel(i)[axis];
                *v = if j == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    *v * Complex64::new(0.0, freqs[j])
                };
            }
            inverse(grid, d)
        })
        .collect()
}

/// Evaluates a one-axis trigonometric interpolant, given by its DFT
/// coefficients (already divided by n), at the stretched points t·x_j.
///
/// With modes m ∈ [−n/2, n/2] (Nyquist split in halves) the sum is
/// `Σ_m d_m e^{2πi(t/n)mj}`, a chirp-z transform computed by Bluestein's
/// convolution in O(n log n).
struct Stretch {
    n: usize,
    size: usize,
    pre: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    post: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Stretch {
    fn new(n: usize, t: f64) -> Self {
        let alpha = t / n as f64;
        let half = (n / 2) as f64;
        let size = (3 * n).next_power_of_two();
        let (fwd, inv) = plans(size);
        // a_i multiplies the coefficient of mode m_i = i − n/2, i = 0..=n.
        let pre = (0..=n)
            .map(|i| {
                let m = i as f64 - half;
                Complex64::from_polar(1.0, PI * m * (1.0 - t) + PI * alpha * m * m)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); size];
        for (r, slot) in kernel.iter_mut().take(2 * n).enumerate() {
            let s = r as f64 - half;
            *slot = Complex64::from_polar(1.0, -PI * alpha * s * s);
        }
        fwd.process(&mut kernel);
        let post = (0..n)
            .map(|j| {
                let j = j as f64;
                let y = t * (j - half);
                if y < -half || y >= half {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(1.0 / size as f64, PI * alpha * j * j)
                }
            })
            .collect();
        Self {
            n,
            size,
            pre,
            kernel_hat: kernel,
            post,
            fwd,
            inv,
        }
    }

    fn apply(&self, line: &mut [Complex64]) {
        let n = self.n;
        let h = n / 2;
        let mut work = vec![Complex64::new(0.0, 0.0); self.size];
        // index i ↔ mode i − n/2; DFT slot of mode m is m mod n
        for (i, slot) in work.iter_mut().take(n + 1).enumerate() {
            let coeff = if i == 0 || i == n {
                0.5 * line[h]
            } else {
                line[(i + n - h) % n]
            };
            *slot = coeff * self.pre[i];
        }
        self.fwd.process(&mut work);
        for (w, k) in work.iter_mut().zip(&self.kernel_hat) {
            *w *= k;
        }
        self.inv.process(&mut work);
        for (j, slot) in line.iter_mut().enumerate() {
            *slot = work[j + n] * self.post[j];
        }
    }
}

/// Result of [`dilate`]. `boundary_warning` is set when the input does not
/// decay to 1e-10 (relative to its peak) at the box faces.
#[derive(Clone, Debug)]
pub struct Dilation {
    pub field: Field,
    pub boundary_warning: bool,
}

/// Boundary-decay threshold for band-limited resampling.
pub const DILATION_DECAY: f64 = 1e-10;

/// u_t(x) = t^{N/2} u(t x), evaluated from the trigonometric interpolant of
/// `u`. Points with t·x outside the box take the value zero.
pub fn dilate(u: &Field, t: f64) -> Result<Dilation> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "dilation factor must be positive, got {t}"
        )));
    }
    let grid = u.grid();
    let peak = u.sup_norm();
    let boundary_warning = peak > 0.0 && u.boundary_sup() > DILATION_DECAY * peak;
    if t == 1.0 {
        return Ok(Dilation {
            field: u.clone(),
            boundary_warning,
        });
    }
    let n = grid.n_per_axis();
    let stretch = Stretch::new(n, t);
    let mut coeffs = forward(u);
    let norm = 1.0 / grid.len() as f64;
    coeffs.iter_mut().for_each(|v| *v *= norm);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let total = grid.len();
    for axis in 0..grid.dim() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = coeffs[start + k * stride];
                }
                stretch.apply(&mut line);
                for (row, v) in line.iter().enumerate() {
                    coeffs[start + row * stride] = *v;
                }
            }
        }
    }
    let amp = t.powf(0.5 * grid.dim() as f64);
    coeffs.iter_mut().for_each(|v| *v *= amp);
    Ok(Dilation {
        field: Field::new(grid, coeffs)?,
        boundary_warning,
    })
}

/// Spectrum of the circular shift u(· − shift·dx): multiply mode k by
/// e^{−2πi k·shift/n}.
pub fn shift_spectrum(grid: GridSpec, spectrum: &mut [Complex64], shift: [usize; 3]) {
    let n = grid.n_per_axis();
    let phases: Vec<Vec<Complex64>> = (0..grid.dim())
        .map(|a| {
            (0..n)
                .map(|j| {
                    let k = grid.mode_number(j) as f64;
                    Complex64::from_polar(1.0, -2.0 * PI * k * shift[a] as f64 / n as f64)
                })
                .collect()
        })
        .collect();
    for (i, v) in spectrum.iter_mut().enumerate() {
        let m = grid.unravel(i);
        for (a, ph) in phases.iter().enumerate() {
            *v *= ph[m[a]];
        }
    }
}

/// Zero every mode with |k| > (2/3)·(n/2) along any axis.
pub fn dealias_in_place(grid: GridSpec, spectrum: &mut [Complex64]) {
    let cutoff = (grid.n_per_axis() as f64 / 3.0).floor() as i64;
    for (i, v) in spectrum.iter_mut().enumerate() {
        let m = grid.unravel(i);
        if (0..grid.dim()).any(|a| grid.mode_number(m[a]).abs() > cutoff) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
}

/// Single Fourier mode e^{i k·x} with integer mode numbers `k`, scaled to unit mass.
pub fn plane_wave(grid: GridSpec, k: [i64; 3]) -> Field {
    let l = grid.box_length();
    let amp = 1.0 / l.powf(0.5 * grid.dim() as f64);
    let values = (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            let phase: f64 = (0..grid.dim())
                .map(|a| 2.0 * PI * k[a] as f64 / l * x[a])
                .sum();
            Complex64::from_polar(amp, phase)
        })
        .collect();
    Field::from_parts(grid, values)
}

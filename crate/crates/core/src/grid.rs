//! Periodic computational box standing in for R^N.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the total number of grid points (complex f64 storage of
/// 2^24 points is 256 MiB).
pub const MAX_POINTS: usize = 1 << 24;

/// Torus [-L/2, L/2)^N sampled with `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n_per_axis: usize,
    box_length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n_per_axis: usize, box_length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!(
                "dim must be 1, 2 or 3, got {dim}"
            )));
        }
        if n_per_axis < 16 || !n_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 16, got {n_per_axis}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        let total = n_per_axis
            .checked_pow(dim as u32)
            .filter(|&t| t <= MAX_POINTS)
            .ok_or_else(|| {
                Error::InvalidGrid(format!(
                    "{n_per_axis}^{dim} points exceed the budget of {MAX_POINTS}"
                ))
            })?;
        debug_assert!(total > 0);
        Ok(Self {
            dim,
            n_per_axis,
            box_length,
        })
    }

    /// 1D n=1024, L=80 or 2D n=256, L=40.
    pub fn desk_default(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, 1024, 80.0),
            2 => Self::new(2, 256, 40.0),
            _ => Self::new(3, 64, 20.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.n_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n_per_axis as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Signed mode number of FFT index `j`: 0..n/2-1 then -n/2..-1.
    pub fn mode_number(&self, j: usize) -> i64 {
        let n = self.n_per_axis as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Angular frequencies 2πk/L in FFT order.
    pub fn axis_frequencies(&self) -> Vec<f64> {
        (0..self.n_per_axis)
            .map(|j| 2.0 * PI * self.mode_number(j) as f64 / self.box_length)
            .collect()
    }

    /// Sample coordinates -L/2 + j·dx.
    pub fn axis_coordinates(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.n_per_axis)
            .map(|j| -0.5 * self.box_length + j as f64 * dx)
            .collect()
    }

    /// Index of the box center x = 0 along one axis.
    pub fn center_index(&self) -> usize {
        self.n_per_axis / 2
    }

    /// Row-major multi-index of a flat index (unused axes are zero).
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let n = self.n_per_axis;
        let mut out = [0usize; 3];
        for axis in (0..self.dim).rev() {
            out[axis] = idx % n;
            idx /= n;
        }
        out
    }

    pub fn ravel(&self, multi: [usize; 3]) -> usize {
        let n = self.n_per_axis;
        (0..self.dim).fold(0, |acc, axis| acc * n + multi[axis])
    }

    /// |ξ|² for every mode, flat row-major.
    pub fn xi_squared(&self) -> Vec<f64> {
        let freqs = self.axis_frequencies();
        self.separable_sum(|j| freqs[j] * freqs[j])
    }

    /// |x|² for every sample point.
    pub fn radius_squared(&self) -> Vec<f64> {
        let xs = self.axis_coordinates();
        self.separable_sum(|j| xs[j] * xs[j])
    }

    /// Coordinates of flat index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let multi = self.unravel(idx);
        let dx = self.spacing();
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = -0.5 * self.box_length + multi[axis] as f64 * dx;
        }
        x
    }

    fn separable_sum(&self, f: impl Fn(usize) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|idx| {
                let multi = self.unravel(idx);
                (0..self.dim).map(|axis| f(multi[axis])).sum()
            })
            .collect()
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}D n={} L={}",
            self.dim, self.n_per_axis, self.box_length
        )
    }
}

//! Complex grid functions and the `.frw` snapshot format.
//!
//! Snapshot layout (little-endian): the 4-byte magic `FRW1`, `dim` as u64,
//! `n_per_axis` as u64, `box_length` as f64, then `n^dim` interleaved
//! `(re, im)` f64 pairs in row-major order.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"FRW1";

/// A complex-valued function sampled on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    /// Skips the finiteness scan; callers guarantee it.
    pub(crate) fn from_parts(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_parts(grid, vec![Complex64::new(0.0, 0.0); grid.len()])
    }

    pub fn from_real(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::new(
            grid,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Sample `f` at every grid point; `f` receives `[x, y, z]` with unused
    /// axes set to zero.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> Complex64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::new(grid, values)
    }

    pub fn from_real_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn scale(&self, a: f64) -> Field {
        Field::from_parts(self.grid, self.values.iter().map(|v| v * a).collect())
    }

    pub fn scale_complex(&self, a: Complex64) -> Field {
        Field::from_parts(self.grid, self.values.iter().map(|v| v * a).collect())
    }

    pub fn conj(&self) -> Field {
        Field::from_parts(self.grid, self.values.iter().map(|v| v.conj()).collect())
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        self.check_grid(other)?;
        Ok(Field::from_parts(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x * a + y * b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.axpby(1.0, other, -1.0)
    }

    /// Discrete L² inner product ⟨self, other⟩ = Σ conj(self)·other·dV.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.check_grid(other)?;
        let dv = self.grid.cell_volume();
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
            * dv)
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (x, y)| m.max((x - y).norm())))
    }

    pub(crate) fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Largest modulus on the faces of the box (first index along any axis).
    pub fn boundary_sup(&self) -> f64 {
        let g = self.grid;
        let last = g.n_per_axis() - 1;
        (0..g.len())
            .filter(|&i| {
                let m = g.unravel(i);
                (0..g.dim()).any(|a| m[a] == 0 || m[a] == last)
            })
            .fold(0.0, |m, i| m.max(self.values[i].norm()))
    }

    /// Fraction of the mass lying in the outer shell max_k |x_k| > 0.4·L.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let g = self.grid;
        let edge = 0.4 * g.box_length();
        let mut outer = 0.0;
        let mut total = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let w = v.norm_sqr();
            total += w;
            let x = g.point(i);
            if (0..g.dim()).any(|a| x[a].abs() > edge) {
                outer += w;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outer / total
        }
    }

    /// Circularly shift so that the peak of |u| sits at the box center.
    pub fn recenter(&self) -> Field {
        let g = self.grid;
        let peak = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |(bi, bv), (i, v)| {
                let w = v.norm_sqr();
                if w > bv {
                    (i, w)
                } else {
                    (bi, bv)
                }
            })
            .0;
        let pm = g.unravel(peak);
        let n = g.n_per_axis();
        let c = g.center_index();
        let mut shift = [0usize; 3];
        for a in 0..g.dim() {
            shift[a] = (c + n - pm[a]) % n;
        }
        if shift.iter().all(|&s| s == 0) {
            return self.clone();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
        for (i, v) in self.values.iter().enumerate() {
            let mut m = g.unravel(i);
            for a in 0..g.dim() {
                m[a] = (m[a] + shift[a]) % n;
            }
            out[g.ravel(m)] = *v;
        }
        Field::from_parts(g, out)
    }

    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<()> {
        let g = self.grid;
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&(g.dim() as u64).to_le_bytes())?;
        w.write_all(&(g.n_per_axis() as u64).to_le_bytes())?;
        w.write_all(&g.box_length().to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Field> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let dim = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let length = f64::from_le_bytes(word);
        let grid = GridSpec::new(dim, n, length)?;
        let mut raw = vec![0u8; 16 * grid.len()];
        r.read_exact(&mut raw)
            .map_err(|e| Error::Format(format!("truncated payload: {e}")))?;
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::Format("trailing bytes after payload".into()));
        }
        let values = raw
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        Field::new(grid, values)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_snapshot(std::io::BufWriter::new(f))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Field> {
        let f = std::fs::File::open(path)?;
        Field::read_snapshot(std::io::BufReader::new(f))
    }
}

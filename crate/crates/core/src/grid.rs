//! Cell-centered periodic Cartesian grids and complex field samples on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};

/// Boundary cells of a valid sample stay below this fraction of the peak modulus.
pub const BOUNDARY_RATIO_LIMIT: f64 = 1e-8;

/// `n`-dimensional grid covering `[-L_j, L_j)` with `N_j` cells per axis.
/// Points are `x_i = -L + (i + ½) h`, stored row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub extent: Vec<f64>,
    pub points: Vec<usize>,
}

impl GridSpec {
    pub fn new(extent: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        let grid = Self {
            n: extent.len(),
            extent,
            points,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Same spacing `h` and half-width at least `half_width` on every axis.
    pub fn uniform(n: usize, half_width: f64, h: f64) -> Result<Self> {
        Self::with_spacing(vec![half_width; n], h)
    }

    /// Smallest even cell counts with spacing exactly `h` whose half-widths
    /// reach `min_extent` per axis.
    pub fn with_spacing(min_extent: Vec<f64>, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(SolitonError::InvalidArgument(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        let points: Vec<usize> = min_extent
            .iter()
            .map(|&l| {
                // Tolerate rounding when 2L/h is an integer.
                let cells = (2.0 * l / h * (1.0 - 1e-12)).ceil().max(2.0) as usize;
                cells + cells % 2
            })
            .collect();
        let extent = points.iter().map(|&p| 0.5 * p as f64 * h).collect();
        Self::new(extent, points)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.points.len() != self.n {
            return Err(SolitonError::InvalidArgument(format!(
                "grid needs matching extent and point counts, got {} and {}",
                self.extent.len(),
                self.points.len()
            )));
        }
        for (&l, &p) in self.extent.iter().zip(&self.points) {
            if !(l > 0.0) || !l.is_finite() {
                return Err(SolitonError::InvalidArgument(format!(
                    "grid half-width must be positive, got {l}"
                )));
            }
            if p < 2 || p % 2 != 0 {
                return Err(SolitonError::InvalidArgument(format!(
                    "grid point count must be even and at least 2, got {p}"
                )));
            }
        }
        Ok(())
    }

    pub fn spacing(&self) -> Vec<f64> {
        self.extent
            .iter()
            .zip(&self.points)
            .map(|(&l, &p)| 2.0 * l / p as f64)
            .collect()
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.n];
        for j in (0..self.n.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * self.points[j + 1];
        }
        strides
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        let h = 2.0 * self.extent[axis] / self.points[axis] as f64;
        -self.extent[axis] + (i as f64 + 0.5) * h
    }

    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for j in (0..self.n).rev() {
            out[j] = index % self.points[j];
            index /= self.points[j];
        }
        out
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        self.multi_index(index)
            .iter()
            .enumerate()
            .map(|(j, &i)| self.coordinate(j, i))
            .collect()
    }

    /// Whether the flat index lies in the outermost layer of cells.
    pub fn is_boundary(&self, index: usize) -> bool {
        self.multi_index(index)
            .iter()
            .zip(&self.points)
            .any(|(&i, &p)| i == 0 || i + 1 == p)
    }
}

/// Periodic neighbors of a flat index along one axis.
#[derive(Debug, Clone)]
pub(crate) struct Neighbors {
    strides: Vec<usize>,
    points: Vec<usize>,
}

impl Neighbors {
    pub(crate) fn new(grid: &GridSpec) -> Self {
        Self {
            strides: grid.strides(),
            points: grid.points.clone(),
        }
    }

    /// `(index - e_axis, index + e_axis)` with wrap-around.
    #[inline]
    pub(crate) fn along(&self, index: usize, axis: usize) -> (usize, usize) {
        let stride = self.strides[axis];
        let count = self.points[axis];
        let i = (index / stride) % count;
        let minus = if i == 0 {
            index + (count - 1) * stride
        } else {
            index - stride
        };
        let plus = if i + 1 == count {
            index - (count - 1) * stride
        } else {
            index + stride
        };
        (minus, plus)
    }
}

/// `ψ` and `ψ̇` at one instant on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub grid: GridSpec,
    pub time: f64,
    pub psi: Vec<Complex64>,
    pub psi_dot: Vec<Complex64>,
    pub source: String,
}

impl FieldSample {
    pub fn new(
        grid: GridSpec,
        time: f64,
        psi: Vec<Complex64>,
        psi_dot: Vec<Complex64>,
        source: impl Into<String>,
    ) -> Result<Self> {
        grid.validate()?;
        if psi.len() != grid.len() || psi_dot.len() != grid.len() {
            return Err(SolitonError::InvalidArgument(format!(
                "field arrays of length {} and {} do not match a grid of {} points",
                psi.len(),
                psi_dot.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            time,
            psi,
            psi_dot,
            source: source.into(),
        })
    }

    pub fn zeros(grid: GridSpec, time: f64) -> Self {
        let len = grid.len();
        Self {
            grid,
            time,
            psi: vec![Complex64::new(0.0, 0.0); len],
            psi_dot: vec![Complex64::new(0.0, 0.0); len],
            source: "zero".into(),
        }
    }

    pub fn max_modulus(&self) -> f64 {
        self.psi.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest boundary-cell modulus over the peak modulus; 0 for the zero field.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.max_modulus();
        if peak == 0.0 {
            return 0.0;
        }
        let edge = self
            .psi
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.is_boundary(*i))
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        edge / peak
    }

    pub fn check_support(&self, velocity: &[f64]) -> Result<()> {
        let ratio = self.boundary_ratio();
        if !(ratio < BOUNDARY_RATIO_LIMIT) {
            return Err(SolitonError::GridTooSmall {
                velocity: velocity.to_vec(),
                ratio,
                limit: BOUNDARY_RATIO_LIMIT,
            });
        }
        Ok(())
    }
}

/// `‖a - b‖ / ‖b‖` in the discrete L² norm.
pub fn relative_l2_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let norm: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (diff / norm.max(f64::MIN_POSITIVE)).sqrt()
}

/// Relative L² distance between the moduli `|a|` and `|b|`.
pub fn modulus_l2_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x.norm() - y.norm()).powi(2))
        .sum();
    let norm: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (diff / norm.max(f64::MIN_POSITIVE)).sqrt()
}

//! Moving solitary waves sampled on Cartesian grids, and their energy and
//! momentum measured by direct grid sums.
//!
//! A standing wave `a(x) e^{-iωt}` boosted to velocity `v` reads
//! `ψ_v(x, t) = a(y) e^{-iωγ(t - v·x)}` with `y = γ(x_∥ - v t) + x_⊥`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::functionals::{
    compute_functionals, lorentz_factor, predict_energy_momentum, PredictionMode,
};
use crate::grid::{FieldSample, GridSpec, Neighbors};
use crate::potential::PotentialSpec;
use crate::radial::SolitaryWave;

/// Half-widths that keep a wave boosted to `velocity` clear of the boundary
/// up to time `t_max`: `r_m sqrt(1 - v_j²) + 10/δ + |v_j| t_max` per axis,
/// where `r_m` is the tail matching radius.
pub fn required_extent(wave: &SolitaryWave, velocity: &[f64], t_max: f64) -> Vec<f64> {
    let delta = wave.delta();
    let support = wave
        .profile
        .tail
        .as_ref()
        .map(|t| t.match_radius)
        .unwrap_or_else(|| wave.profile.radius(wave.profile.len().saturating_sub(1)));
    velocity
        .iter()
        .map(|vj| support * (1.0 - vj * vj).sqrt() + 10.0 / delta + vj.abs() * t_max)
        .collect()
}

impl GridSpec {
    /// Grid of spacing `h` sized for a boosted wave by [`required_extent`].
    pub fn for_wave(wave: &SolitaryWave, velocity: &[f64], t_max: f64, h: f64) -> Result<Self> {
        if velocity.len() != wave.n {
            return Err(SolitonError::InvalidArgument(format!(
                "velocity has {} components for an n = {} wave",
                velocity.len(),
                wave.n
            )));
        }
        lorentz_factor(velocity)?;
        Self::with_spacing(required_extent(wave, velocity, t_max), h)
    }
}

pub fn sample_boosted(
    wave: &SolitaryWave,
    velocity: &[f64],
    grid: &GridSpec,
    t: f64,
) -> Result<FieldSample> {
    if wave.n != grid.n || velocity.len() != grid.n {
        return Err(SolitonError::InvalidArgument(format!(
            "wave dimension {}, velocity length {} and grid dimension {} must agree",
            wave.n,
            velocity.len(),
            grid.n
        )));
    }
    let gamma = lorentz_factor(velocity)?;
    let speed = velocity.iter().map(|v| v * v).sum::<f64>().sqrt();
    let unit: Vec<f64> = if speed > 0.0 {
        velocity.iter().map(|v| v / speed).collect()
    } else {
        vec![0.0; grid.n]
    };
    let omega = wave.omega;

    let (psi, psi_dot): (Vec<Complex64>, Vec<Complex64>) = (0..grid.len())
        .into_par_iter()
        .map(|index| {
            let x = grid.point(index);
            let along: f64 = x.iter().zip(&unit).map(|(a, b)| a * b).sum();
            // y = x_⊥ + γ (x_∥ - v t)
            let y: Vec<f64> = x
                .iter()
                .zip(&unit)
                .zip(velocity)
                .map(|((xj, uj), vj)| xj + (gamma - 1.0) * along * uj - gamma * vj * t)
                .collect();
            let (a, grad) = wave.amplitude(&y);
            let v_dot_x: f64 = x.iter().zip(velocity).map(|(a, b)| a * b).sum();
            let phase = Complex64::from_polar(1.0, -omega * gamma * (t - v_dot_x));
            let v_dot_grad: Complex64 = grad.iter().zip(velocity).map(|(g, v)| g * v).sum();
            let dot = -gamma * v_dot_grad - Complex64::new(0.0, gamma * omega) * a;
            (a * phase, dot * phase)
        })
        .unzip();

    let source = format!(
        "boosted wave n={} k={} omega={} velocity={:?}",
        wave.n, wave.k, omega, velocity
    );
    let sample = FieldSample::new(grid.clone(), t, psi, psi_dot, source)?;
    sample.check_support(velocity)?;
    Ok(sample)
}

/// Row-parallel grid sum of a `width`-component cell quantity. Rows along the
/// last axis are summed independently and combined in a fixed order, so the
/// result does not depend on the thread count.
pub(crate) fn grid_sum<F>(grid: &GridSpec, width: usize, cell: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let row = *grid.points.last().unwrap_or(&1);
    let rows = grid.len() / row.max(1);
    let partial: Vec<Vec<f64>> = (0..rows)
        .into_par_iter()
        .map(|r| {
            let mut acc = vec![0.0; width];
            let mut buf = vec![0.0; width];
            for index in r * row..(r + 1) * row {
                buf.iter_mut().for_each(|b| *b = 0.0);
                cell(index, &mut buf);
                for (a, b) in acc.iter_mut().zip(&buf) {
                    *a += b;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; width];
    for p in partial {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// Energy density `|ψ̇|²/2 + |∇ψ|²/2 + 𝒱(|ψ|)` at one cell, with
/// second-order centered differences under periodic wrap.
pub(crate) fn energy_density(
    sample: &FieldSample,
    spec: &PotentialSpec,
    neighbors: &Neighbors,
    inv_two_h: &[f64],
    index: usize,
) -> f64 {
    let psi = &sample.psi;
    let mut gradient = 0.0;
    for (axis, &c) in inv_two_h.iter().enumerate() {
        let (m, p) = neighbors.along(index, axis);
        gradient += ((psi[p] - psi[m]) * c).norm_sqr();
    }
    0.5 * sample.psi_dot[index].norm_sqr() + 0.5 * gradient + spec.potential(psi[index].norm())
}

pub(crate) fn inverse_double_spacing(grid: &GridSpec) -> Vec<f64> {
    grid.spacing().iter().map(|h| 0.5 / h).collect()
}

pub fn measure_energy(sample: &FieldSample, spec: &PotentialSpec) -> f64 {
    let neighbors = Neighbors::new(&sample.grid);
    let inv = inverse_double_spacing(&sample.grid);
    let sum = grid_sum(&sample.grid, 1, |index, out| {
        out[0] = energy_density(sample, spec, &neighbors, &inv, index);
    });
    sum[0] * sample.grid.cell_volume()
}

/// `P = -Re Σ ψ̇ conj(∇ψ) dV`.
pub fn measure_momentum(sample: &FieldSample) -> Vec<f64> {
    let grid = &sample.grid;
    let neighbors = Neighbors::new(grid);
    let inv = inverse_double_spacing(grid);
    let psi = &sample.psi;
    let sum = grid_sum(grid, grid.n, |index, out| {
        let dot = sample.psi_dot[index];
        for (axis, o) in out.iter_mut().enumerate() {
            let (m, p) = neighbors.along(index, axis);
            let d = (psi[p] - psi[m]) * inv[axis];
            *o = -(dot * d.conj()).re;
        }
    });
    let dv = grid.cell_volume();
    sum.into_iter().map(|p| p * dv).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub velocity: Vec<f64>,
    pub speed: f64,
    pub energy_measured: f64,
    pub momentum_measured: Vec<f64>,
    pub energy_predicted: f64,
    pub momentum_predicted: Vec<f64>,
    pub rel_err_e: f64,
    /// Against `|P_pred|`; at rest, where `P_pred = 0`, this is `|P_meas| / E_pred`.
    pub rel_err_p: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Measured versus predicted `E_v`, `P_v` for each velocity, sorted by speed.
pub fn boost_scan(
    wave: &SolitaryWave,
    velocities: &[Vec<f64>],
    grid: &GridSpec,
) -> Result<Vec<ScanRow>> {
    for v in velocities {
        if v.len() != wave.n {
            return Err(SolitonError::InvalidArgument(format!(
                "velocity {v:?} has the wrong dimension for an n = {} wave",
                wave.n
            )));
        }
        lorentz_factor(v)?;
    }
    let report = compute_functionals(wave)?;
    let mut rows = velocities
        .par_iter()
        .map(|v| {
            let sample = sample_boosted(wave, v, grid, 0.0)?;
            let energy = measure_energy(&sample, &wave.spec);
            let momentum = measure_momentum(&sample);
            let predicted = predict_energy_momentum(&report, v, PredictionMode::ClosedForm)?;
            let diff: Vec<f64> = momentum
                .iter()
                .zip(&predicted.momentum)
                .map(|(a, b)| a - b)
                .collect();
            let p_scale = norm(&predicted.momentum);
            let rel_err_p = if p_scale > 0.0 {
                norm(&diff) / p_scale
            } else {
                norm(&diff) / predicted.energy.abs()
            };
            Ok(ScanRow {
                velocity: v.clone(),
                speed: norm(v),
                energy_measured: energy,
                momentum_measured: momentum,
                energy_predicted: predicted.energy,
                rel_err_e: (energy / predicted.energy - 1.0).abs(),
                momentum_predicted: predicted.momentum,
                rel_err_p,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.speed.total_cmp(&b.speed));
    Ok(rows)
}

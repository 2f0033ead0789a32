//! Explicit second-order time stepping of `ψ̈ = Δ_h ψ + f(ψ)` on periodic grids.
//!
//! The update is the velocity form of the three-level leapfrog
//! `ψ^{m+1} = 2ψ^m - ψ^{m-1} + dt² (Δ_h ψ^m + f(ψ^m))`: positions follow the
//! same recurrence, the first step is the Taylor bootstrap, and `ψ̇^m` equals
//! the centered difference `(ψ^{m+1} - ψ^{m-1}) / 2dt`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boost::{
    energy_density, grid_sum, inverse_double_spacing, measure_energy, measure_momentum,
};
use crate::error::{Result, SolitonError};
use crate::grid::{FieldSample, Neighbors};
use crate::potential::PotentialSpec;

pub const CFL: f64 = 0.5;
const CFL_SLACK: f64 = 1e-9;
/// Total energy below which the center of energy is undefined.
pub const ZERO_FIELD_ENERGY: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub time: f64,
    pub energy: f64,
    pub momentum: Vec<f64>,
    pub center_of_energy: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub sample: FieldSample,
    /// `ψ` one step back; equal to `ψ` before the first step.
    pub prev_psi: Vec<Complex64>,
    pub diagnostics: Vec<DiagnosticRecord>,
    pub spec: PotentialSpec,
    pub steps_taken: usize,
    // (anchor time, dt, steps since anchor)
    clock: Option<(f64, f64, usize)>,
    neighbors: Neighbors,
    // Δ_h ψ + f(ψ) at the current level.
    acceleration: Vec<Complex64>,
}

impl EvolutionState {
    pub fn new(sample: FieldSample, spec: PotentialSpec) -> Result<Self> {
        if !(1..=2).contains(&sample.grid.n) {
            return Err(SolitonError::InvalidArgument(format!(
                "time evolution supports n = 1 and n = 2, got n = {}",
                sample.grid.n
            )));
        }
        sample.grid.validate()?;
        let neighbors = Neighbors::new(&sample.grid);
        let acceleration = compute_acceleration(&sample.psi, &sample, &spec, &neighbors);
        Ok(Self {
            prev_psi: sample.psi.clone(),
            sample,
            diagnostics: Vec::new(),
            spec,
            steps_taken: 0,
            clock: None,
            neighbors,
            acceleration,
        })
    }

    pub fn time(&self) -> f64 {
        self.sample.time
    }

    pub fn cfl_limit(&self) -> f64 {
        CFL * self.sample.grid.min_spacing()
    }

    /// Advances one step of size `dt`.
    pub fn advance(&mut self, dt: f64) -> Result<()> {
        let limit = self.cfl_limit();
        if !(dt > 0.0) || dt > limit * (1.0 + CFL_SLACK) {
            return Err(SolitonError::CflViolation { dt, limit });
        }
        let half = 0.5 * dt;
        let next_psi: Vec<Complex64> = self
            .sample
            .psi
            .par_iter()
            .zip(&self.sample.psi_dot)
            .zip(&self.acceleration)
            .map(|((p, v), a)| p + dt * v + half * dt * a)
            .collect();
        let next_acc = compute_acceleration(&next_psi, &self.sample, &self.spec, &self.neighbors);
        let next_dot: Vec<Complex64> = self
            .sample
            .psi_dot
            .par_iter()
            .zip(&self.acceleration)
            .zip(&next_acc)
            .map(|((v, a0), a1)| v + half * (a0 + a1))
            .collect();

        self.steps_taken += 1;
        // Times are anchor + count * dt so long runs do not accumulate rounding.
        match self.clock {
            Some((_, step, ref mut count)) if step == dt => *count += 1,
            _ => self.clock = Some((self.sample.time, dt, 1)),
        }
        let (anchor, _, count) = self.clock.unwrap();
        let time = anchor + count as f64 * dt;

        let finite = next_psi
            .par_iter()
            .chain(next_dot.par_iter())
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(SolitonError::NonFinite { time });
        }
        self.prev_psi = std::mem::replace(&mut self.sample.psi, next_psi);
        self.sample.psi_dot = next_dot;
        self.acceleration = next_acc;
        self.sample.time = time;
        Ok(())
    }

    pub fn record_diagnostics(&mut self) -> Result<()> {
        let energy = measure_energy(&self.sample, &self.spec);
        let momentum = measure_momentum(&self.sample);
        let center = center_of_energy(&self.sample, &self.spec)?;
        if self
            .diagnostics
            .last()
            .is_some_and(|last| last.time >= self.sample.time)
        {
            return Ok(());
        }
        self.diagnostics.push(DiagnosticRecord {
            time: self.sample.time,
            energy,
            momentum,
            center_of_energy: center,
        });
        Ok(())
    }
}

fn compute_acceleration(
    psi: &[Complex64],
    sample: &FieldSample,
    spec: &PotentialSpec,
    neighbors: &Neighbors,
) -> Vec<Complex64> {
    let inv_h2: Vec<f64> = sample
        .grid
        .spacing()
        .iter()
        .map(|h| 1.0 / (h * h))
        .collect();
    (0..psi.len())
        .into_par_iter()
        .map(|index| {
            let centre = psi[index];
            let mut lap = Complex64::new(0.0, 0.0);
            for (axis, &c) in inv_h2.iter().enumerate() {
                let (m, p) = neighbors.along(index, axis);
                lap += (psi[p] - 2.0 * centre + psi[m]) * c;
            }
            lap + spec.force(centre)
        })
        .collect()
}

/// One step, consuming and returning the state.
pub fn step(mut state: EvolutionState, dt: f64) -> Result<EvolutionState> {
    state.advance(dt)?;
    Ok(state)
}

/// Steps from the sample time to `t_final`, recording diagnostics at the start,
/// every `diag_stride` steps and at the end. `t_final - t0` must be a whole
/// number of steps up to rounding.
pub fn evolve(
    initial: FieldSample,
    spec: &PotentialSpec,
    t_final: f64,
    dt: f64,
    diag_stride: usize,
) -> Result<EvolutionState> {
    evolve_with(initial, spec, t_final, dt, diag_stride, |_, _| Ok(()))
}

/// [`evolve`] with a callback after the start and after every step, given the
/// step count.
pub fn evolve_with<F>(
    initial: FieldSample,
    spec: &PotentialSpec,
    t_final: f64,
    dt: f64,
    diag_stride: usize,
    mut observe: F,
) -> Result<EvolutionState>
where
    F: FnMut(usize, &EvolutionState) -> Result<()>,
{
    let mut state = EvolutionState::new(initial, spec.clone())?;
    let limit = state.cfl_limit();
    if !(dt > 0.0) || dt > limit * (1.0 + CFL_SLACK) {
        return Err(SolitonError::CflViolation { dt, limit });
    }
    if diag_stride == 0 {
        return Err(SolitonError::InvalidArgument(
            "diag_stride must be positive".into(),
        ));
    }
    let span = t_final - state.time();
    if span < 0.0 {
        return Err(SolitonError::InvalidArgument(format!(
            "t_final {t_final} precedes the sample time {}",
            state.time()
        )));
    }
    let steps = (span / dt).round() as usize;
    if ((steps as f64) * dt - span).abs() > 1e-9 * span.max(dt) {
        return Err(SolitonError::InvalidArgument(format!(
            "t_final - t0 = {span} is not a whole number of steps of {dt}"
        )));
    }
    state.record_diagnostics()?;
    observe(0, &state)?;
    for m in 1..=steps {
        state.advance(dt)?;
        if m % diag_stride == 0 || m == steps {
            state.record_diagnostics()?;
        }
        observe(m, &state)?;
    }
    Ok(state)
}

/// Energy-weighted mean position.
pub fn center_of_energy(sample: &FieldSample, spec: &PotentialSpec) -> Result<Vec<f64>> {
    let grid = &sample.grid;
    let n = grid.n;
    let neighbors = Neighbors::new(grid);
    let inv = inverse_double_spacing(grid);
    let sums = grid_sum(grid, n + 1, |index, out| {
        let e = energy_density(sample, spec, &neighbors, &inv, index);
        out[0] = e;
        for (j, x) in grid.point(index).into_iter().enumerate() {
            out[j + 1] = x * e;
        }
    });
    let total = sums[0] * grid.cell_volume();
    if !(total.abs() >= ZERO_FIELD_ENERGY) {
        return Err(SolitonError::ZeroField {
            threshold: ZERO_FIELD_ENERGY,
        });
    }
    Ok(sums[1..].iter().map(|s| s / sums[0]).collect())
}

/// Least-squares slope of the center of energy against time, per axis.
pub fn fit_velocity(diagnostics: &[DiagnosticRecord]) -> Option<Vec<f64>> {
    if diagnostics.len() < 2 {
        return None;
    }
    let m = diagnostics.len() as f64;
    let t_mean = diagnostics.iter().map(|d| d.time).sum::<f64>() / m;
    let stt: f64 = diagnostics.iter().map(|d| (d.time - t_mean).powi(2)).sum();
    if stt == 0.0 {
        return None;
    }
    let n = diagnostics[0].center_of_energy.len();
    Some(
        (0..n)
            .map(|j| {
                let x_mean = diagnostics
                    .iter()
                    .map(|d| d.center_of_energy[j])
                    .sum::<f64>()
                    / m;
                diagnostics
                    .iter()
                    .map(|d| (d.time - t_mean) * (d.center_of_energy[j] - x_mean))
                    .sum::<f64>()
                    / stt
            })
            .collect(),
    )
}

/// `max_t |E(t) - E(t_0)| / |E(t_0)|` over the diagnostic series.
pub fn relative_energy_drift(diagnostics: &[DiagnosticRecord]) -> f64 {
    let Some(first) = diagnostics.first() else {
        return 0.0;
    };
    diagnostics
        .iter()
        .map(|d| (d.energy - first.energy).abs() / first.energy.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boost::sample_boosted;
    use crate::grid::GridSpec;
    use crate::radial::find_ground_state;

    fn cubic() -> PotentialSpec {
        PotentialSpec::cubic(1.0, 1.0)
    }

    #[test]
    fn zero_field_is_fixed() {
        let grid = GridSpec::uniform(2, 1.0, 0.1).unwrap();
        let state = EvolutionState::new(FieldSample::zeros(grid, 0.0), cubic()).unwrap();
        let state = step(step(state, 0.05).unwrap(), 0.05).unwrap();
        assert!(state
            .sample
            .psi
            .iter()
            .all(|z| *z == Complex64::new(0.0, 0.0)));
        assert!((state.time() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn constant_equilibrium_is_stationary() {
        // f(c) = c(-1 + |c|²) vanishes on |c| = 1.
        let grid = GridSpec::uniform(1, 1.0, 0.1).unwrap();
        let c = Complex64::from_polar(1.0, 0.7);
        let len = grid.len();
        let sample = FieldSample::new(
            grid,
            0.0,
            vec![c; len],
            vec![Complex64::new(0.0, 0.0); len],
            "c",
        )
        .unwrap();
        let mut state = EvolutionState::new(sample, cubic()).unwrap();
        for _ in 0..100 {
            state.advance(0.05).unwrap();
        }
        assert!(state.sample.psi.iter().all(|z| (z - c).norm() < 1e-13));
    }

    #[test]
    fn cfl_and_dimension_enforced() {
        let grid = GridSpec::uniform(1, 1.0, 0.1).unwrap();
        let sample = FieldSample::zeros(grid, 0.0);
        let mut state = EvolutionState::new(sample.clone(), cubic()).unwrap();
        assert!(matches!(
            state.advance(0.06),
            Err(SolitonError::CflViolation { .. })
        ));
        assert!(state.advance(0.05).is_ok());
        let grid3 = GridSpec::uniform(3, 0.2, 0.1).unwrap();
        assert!(EvolutionState::new(FieldSample::zeros(grid3, 0.0), cubic()).is_err());
    }

    #[test]
    fn blow_up_reported() {
        // Quintic focusing with large constant data blows up in finite time.
        let spec = PotentialSpec::new(
            1.0,
            vec![crate::potential::Term {
                coupling: 1.0,
                exponent: 6,
            }],
            1e6,
        )
        .unwrap();
        let grid = GridSpec::uniform(1, 0.5, 0.1).unwrap();
        let len = grid.len();
        let sample = FieldSample::new(
            grid,
            0.0,
            vec![Complex64::new(3.0, 0.0); len],
            vec![Complex64::new(0.0, 0.0); len],
            "blow-up",
        )
        .unwrap();
        let err = evolve(sample, &spec, 50.0, 0.05, 10);
        assert!(
            matches!(err, Err(SolitonError::NonFinite { .. })),
            "{err:?}"
        );
    }

    #[test]
    fn standing_wave_returns_after_one_period() {
        let wave = find_ground_state(&cubic(), 0.8, 1).unwrap();
        let grid = GridSpec::for_wave(&wave, &[0.0], 0.0, 0.05).unwrap();
        let sample = sample_boosted(&wave, &[0.0], &grid, 0.0).unwrap();
        let period = 2.0 * std::f64::consts::PI / 0.8;
        let steps = (period / 0.025).ceil() as usize;
        let dt = period / steps as f64;
        let state = evolve(sample.clone(), &wave.spec, period, dt, 50).unwrap();
        let dist = crate::grid::relative_l2_distance(&state.sample.psi, &sample.psi);
        assert!(dist < 1e-2, "distance {dist}");
        let x = center_of_energy(&state.sample, &wave.spec).unwrap();
        assert!(x[0].abs() < 1e-8);
    }

    #[test]
    fn zero_field_has_no_center() {
        let grid = GridSpec::uniform(1, 1.0, 0.1).unwrap();
        let err = center_of_energy(&FieldSample::zeros(grid, 0.0), &cubic());
        assert!(matches!(err, Err(SolitonError::ZeroField { .. })));
    }

    #[test]
    fn velocity_fit_on_line() {
        let diagnostics: Vec<DiagnosticRecord> = (0..5)
            .map(|i| DiagnosticRecord {
                time: i as f64,
                energy: 1.0,
                momentum: vec![0.0],
                center_of_energy: vec![0.3 * i as f64 - 1.0],
            })
            .collect();
        let v = fit_velocity(&diagnostics).unwrap();
        assert!((v[0] - 0.3).abs() < 1e-14);
        assert_eq!(relative_energy_drift(&diagnostics), 0.0);
    }
}

//! Radial ground states and planar vortex ("excited") states by shooting.
//!
//! The amplitude `a(x) = R(|x|) e^{ikφ}` of a standing wave solves
//!
//! ```text
//! R'' + (n-1)/r R' - k²/r² R = 𝒱′(R) - ω² R
//! ```
//!
//! which is integrated outward from a series start at the regular singular
//! point `r = 0`. The launch datum `s` (the central value for `k = 0`, the
//! coefficient of `r^k` otherwise) is bisected between a trajectory that
//! turns back before reaching zero (undershoot) and one that crosses zero
//! (overshoot). The converged trajectory is spliced onto the asymptotic tail
//! of the linearized equation, `R ~ C r^{-(n-1)/2} e^{-δr} (1 + O(1/r))`
//! with `δ = √(mass_sq - ω²)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::ode::DormandPrince;
use crate::potential::{check_conditions, PotentialSpec};

/// Number of terms kept in the asymptotic series of the tail model.
const TAIL_SERIES_TERMS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative tolerance of the Runge-Kutta integrator.
    pub rtol: f64,
    /// Explicit radial grid spacing; when `None` it is `step_scale / δ`.
    pub grid_step: Option<f64>,
    pub step_scale: f64,
    /// Bisection stops once the bracket is narrower than `tol_s * s`.
    pub tol_s: f64,
    pub scan_points: usize,
    /// Smallest scanned launch datum, relative to the amplitude cap.
    pub scan_floor: f64,
    /// A shoot whose `max(|R|, |R'|/δ)` falls below `decay_tol * max|R|`
    /// before it departs is classified as decayed.
    pub decay_tol: f64,
    /// Tail splice threshold relative to `max|R|`.
    pub match_tol: f64,
    /// The splice moves inward to where the final under- and overshooting
    /// trajectories still agree to this relative accuracy.
    pub agreement_tol: f64,
    /// Integration range in units of the decay length `1/δ`.
    pub range_factor: f64,
    /// Divergence guard, in units of the amplitude cap.
    pub divergence_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            grid_step: None,
            step_scale: 0.002,
            tol_s: 1e-15,
            scan_points: 64,
            scan_floor: 1e-8,
            decay_tol: 1e-2,
            match_tol: 1e-8,
            agreement_tol: 1e-6,
            range_factor: 60.0,
            divergence_factor: 3.0,
        }
    }
}

impl SolverOptions {
    pub fn with_grid_step(mut self, h: f64) -> Self {
        self.grid_step = Some(h);
        self
    }

    pub fn grid_step_for(&self, delta: f64) -> f64 {
        self.grid_step.unwrap_or(self.step_scale / delta)
    }
}

/// Asymptotic tail `C e^{-δr} S(r)` with
/// `S(r) = r^{-(n-1)/2} Σ_j c_j (δr)^{-j}`, the large-argument expansion of
/// `r^{-(n-2)/2} K_ν(δr)`, `ν = k + (n-2)/2`. The series terminates for odd `n`
/// with `k = 0`, where the tail is exact for the linearized equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub delta: f64,
    pub prefactor: f64,
    pub match_radius: f64,
    pub order: f64,
    /// Decay rate fitted to the numerical trajectory over the matching window.
    pub fitted_delta: f64,
    dimension: usize,
}

impl TailFit {
    fn new(delta: f64, n: usize, k: u32, match_radius: f64) -> Self {
        Self {
            delta,
            prefactor: 0.0,
            match_radius,
            order: k as f64 + (n as f64 - 2.0) / 2.0,
            fitted_delta: delta,
            dimension: n,
        }
    }

    fn series_coefficients(&self) -> [f64; TAIL_SERIES_TERMS] {
        let mut c = [0.0; TAIL_SERIES_TERMS];
        c[0] = 1.0;
        let mu = 4.0 * self.order * self.order;
        for j in 1..TAIL_SERIES_TERMS {
            let odd = (2 * j - 1) as f64;
            c[j] = c[j - 1] * (mu - odd * odd) / (8.0 * j as f64);
        }
        c
    }

    /// `(S(r), S'(r))`, the algebraic part of the tail and its derivative.
    pub fn shape(&self, r: f64) -> (f64, f64) {
        let p = (self.dimension as f64 - 1.0) / 2.0;
        let c = self.series_coefficients();
        let x = self.delta * r;
        let mut sum = 0.0;
        let mut dsum = 0.0;
        let mut inv = 1.0;
        for (j, cj) in c.iter().enumerate() {
            sum += cj * inv;
            dsum -= j as f64 * cj * inv / r;
            inv /= x;
        }
        let rp = r.powf(-p);
        (rp * sum, rp * (dsum - p * sum / r))
    }

    /// `(R(r), R'(r))` from the tail model.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let (s, ds) = self.shape(r);
        let e = (-self.delta * r).exp();
        (
            self.prefactor * e * s,
            self.prefactor * e * (ds - self.delta * s),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: usize,
    pub k: u32,
    /// Uniform radial spacing; node `i` sits at `r = i * step`.
    pub step: f64,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    /// `R''` at the nodes, from the ODE itself.
    pub second: Vec<f64>,
    pub tail: Option<TailFit>,
    pub node_count: usize,
    pub shoot_param: f64,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.radius(i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `(R(r), R'(r))`: cubic Hermite interpolation inside the numerical range,
    /// the analytic tail beyond it.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let last = self.len() - 1;
        let r_end = self.radius(last);
        if r >= r_end {
            return match &self.tail {
                Some(tail) => tail.eval(r),
                None if r == r_end => (self.values[last], self.derivative[last]),
                None => (0.0, 0.0),
            };
        }
        let x = r / self.step;
        let i = (x.floor() as usize).min(last - 1);
        let t = x - i as f64;
        let h = self.step;
        let value = hermite(
            t,
            h,
            self.values[i],
            self.values[i + 1],
            self.derivative[i],
            self.derivative[i + 1],
        );
        let slope = hermite(
            t,
            h,
            self.derivative[i],
            self.derivative[i + 1],
            self.second[i],
            self.second[i + 1],
        );
        (value, slope)
    }
}

fn hermite(t: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// A standing solitary wave `a(x) e^{-iωt}` with `a(x) = R(|x|) e^{ikφ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitaryWave {
    pub n: usize,
    pub k: u32,
    pub omega: f64,
    pub profile: RadialProfile,
    pub spec: PotentialSpec,
}

impl SolitaryWave {
    pub fn delta(&self) -> f64 {
        (self.spec.mass_sq - self.omega * self.omega).sqrt()
    }

    /// `a(y)` and its Cartesian gradient at a point `y` of `R^n`.
    pub fn amplitude(&self, y: &[f64]) -> (Complex64, Vec<Complex64>) {
        let rho = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        let (r_val, r_der) = self.profile.eval(rho);
        let mut grad = vec![Complex64::new(0.0, 0.0); y.len()];
        if self.k == 0 {
            if rho > 0.0 {
                for (g, c) in grad.iter_mut().zip(y) {
                    *g = Complex64::new(r_der * c / rho, 0.0);
                }
            }
            return (Complex64::new(r_val, 0.0), grad);
        }
        // n = 2 vortex: ∇a = e^{ikφ} (R' ρ̂ + i k R/ρ φ̂).
        let k = self.k as f64;
        if rho == 0.0 {
            let slope = if self.k == 1 {
                self.profile.shoot_param
            } else {
                0.0
            };
            // R e^{iφ} ≈ s (y1 + i y2) near the origin.
            grad[0] = Complex64::new(slope, 0.0);
            grad[1] = Complex64::new(0.0, slope);
            return (Complex64::new(0.0, 0.0), grad);
        }
        let (sin_phi, cos_phi) = (y[1] / rho, y[0] / rho);
        let phase = Complex64::from_polar(1.0, k * y[1].atan2(y[0]));
        let radial = Complex64::new(r_der, 0.0);
        let angular = Complex64::new(0.0, k * r_val / rho);
        grad[0] = phase * (radial * cos_phi - angular * sin_phi);
        grad[1] = phase * (radial * sin_phi + angular * cos_phi);
        (phase * r_val, grad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShootOutcome {
    Decayed,
    Undershot,
    Overshot,
}

/// Side of the bracket a trajectory falls on once it departs from the decaying branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Under,
    Over,
}

/// Radial trajectory on the uniform grid `r_i = i * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub step: f64,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootResult {
    pub outcome: ShootOutcome,
    /// Where the trajectory ended up after leaving the decaying branch; `None`
    /// when it reached `r_max` still decaying.
    pub side: Option<Side>,
    /// Smallest `|R| / max|R|` seen before departure.
    pub decay_depth: f64,
    pub shoot_param: f64,
    pub trajectory: Trajectory,
}

fn validate_problem(spec: &PotentialSpec, omega: f64, n: usize, k: u32) -> Result<f64> {
    spec.validate()?;
    if !(1..=3).contains(&n) {
        return Err(SolitonError::InvalidArgument(format!(
            "dimension must be 1, 2 or 3, got {n}"
        )));
    }
    if k >= 1 && n != 2 {
        return Err(SolitonError::InvalidArgument(format!(
            "angular index k = {k} requires n = 2, got n = {n}"
        )));
    }
    if !omega.is_finite() || omega * omega >= spec.mass_sq {
        return Err(SolitonError::ConditionViolated(format!(
            "S1 fails: omega^2 - mass_sq = {} is not negative",
            omega * omega - spec.mass_sq
        )));
    }
    Ok((spec.mass_sq - omega * omega).sqrt())
}

/// Series data `(R, R')` at small `r`.
fn series_start(spec: &PotentialSpec, omega: f64, n: usize, k: u32, s: f64, r: f64) -> [f64; 2] {
    if k == 0 {
        let c = (spec.potential_derivative(s) - omega * omega * s) / (2.0 * n as f64);
        [s + c * r * r, 2.0 * c * r]
    } else {
        let kappa_sq = spec.mass_sq - omega * omega;
        let kf = k as f64;
        let d = kappa_sq / (4.0 * (kf + 1.0));
        let rk = r.powi(k as i32);
        [
            s * rk * (1.0 + d * r * r),
            s * (kf * rk / r + d * (kf + 2.0) * rk * r),
        ]
    }
}

/// `(R(0), R'(0))`.
fn origin_values(k: u32, s: f64) -> [f64; 2] {
    match k {
        0 => [s, 0.0],
        1 => [0.0, s],
        _ => [0.0, 0.0],
    }
}

fn second_derivative(
    spec: &PotentialSpec,
    omega: f64,
    n: usize,
    k: u32,
    s: f64,
    r: f64,
    y: [f64; 2],
) -> f64 {
    if r == 0.0 {
        return match k {
            0 => (spec.potential_derivative(s) - omega * omega * s) / n as f64,
            2 => 2.0 * s,
            _ => 0.0,
        };
    }
    let kk = (k * k) as f64;
    spec.potential_derivative(y[0]) - omega * omega * y[0] - (n as f64 - 1.0) / r * y[1]
        + kk / (r * r) * y[0]
}

/// Integrates the radial equation outward from the series start with launch datum `s`.
pub fn shoot(
    spec: &PotentialSpec,
    omega: f64,
    n: usize,
    k: u32,
    s: f64,
    r_max: f64,
    options: &SolverOptions,
) -> Result<ShootResult> {
    let delta = validate_problem(spec, omega, n, k)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(SolitonError::InvalidArgument(format!(
            "launch datum must be positive, got {s}"
        )));
    }
    let h = options.grid_step_for(delta);
    shoot_on_grid(spec, omega, n, k, s, r_max, h, delta, options)
}

#[allow(clippy::too_many_arguments)]
fn shoot_on_grid(
    spec: &PotentialSpec,
    omega: f64,
    n: usize,
    k: u32,
    s: f64,
    r_max: f64,
    h: f64,
    delta: f64,
    options: &SolverOptions,
) -> Result<ShootResult> {
    let w2 = omega * omega;
    let nm1 = n as f64 - 1.0;
    let kk = (k * k) as f64;
    let rhs = |r: f64, y: &[f64; 2]| {
        [
            y[1],
            spec.potential_derivative(y[0]) - w2 * y[0] - nm1 / r * y[1] + kk / (r * r) * y[0],
        ]
    };
    let integrator = DormandPrince {
        rtol: options.rtol,
        ..DormandPrince::default()
    };
    let guard = options.divergence_factor * spec.amplitude_cap;

    let origin = origin_values(k, s);
    let mut values = vec![origin[0]];
    let mut derivative = vec![origin[1]];

    let r_start = (1e-6 / delta).min(0.5 * h);
    let mut y = series_start(spec, omega, n, k, s, r_start);
    let mut r_prev = r_start;
    let mut step = r_start.max(1e-3 * h);

    let mut peak = origin[0].abs();
    let mut descending = k == 0;
    let mut decayed = false;
    let mut depth = 1.0f64;
    let mut side = None;

    let mut i = 1usize;
    loop {
        let r = i as f64 * h;
        if r > r_max {
            break;
        }
        y = integrator
            .integrate(rhs, r_prev, y, r, &mut step)
            .map_err(|e| SolitonError::StepFailure {
                r: e.t,
                shoot_param: s,
            })?;
        r_prev = r;
        values.push(y[0]);
        derivative.push(y[1]);

        let (val, der) = (y[0], y[1]);
        if !(val.is_finite() && der.is_finite()) || val > guard || val <= 0.0 {
            side = Some(Side::Over);
            break;
        }
        peak = peak.max(val);
        if der < 0.0 {
            descending = true;
        }
        if descending && der > 0.0 {
            side = Some(Side::Under);
            break;
        }
        if descending {
            depth = depth.min(val.max(der.abs() / delta) / peak);
            if depth < options.decay_tol {
                decayed = true;
            }
        }
        i += 1;
    }

    let outcome = if decayed {
        ShootOutcome::Decayed
    } else {
        match side {
            Some(Side::Under) => ShootOutcome::Undershot,
            Some(Side::Over) => ShootOutcome::Overshot,
            None => {
                return Err(SolitonError::InvalidArgument(format!(
                    "r_max = {r_max} too short to classify launch datum {s}"
                )))
            }
        }
    };

    Ok(ShootResult {
        outcome,
        side,
        decay_depth: depth,
        shoot_param: s,
        trajectory: Trajectory {
            step: h,
            values,
            derivative,
        },
    })
}

/// Number of strict sign changes of `values`, skipping exact zeros.
pub fn count_sign_changes(values: &[f64]) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && prev.signum() != v.signum() {
            count += 1;
        }
        prev = v;
    }
    count
}

/// Sign changes of `R` over the numerical range; the tail region carries none by construction.
pub fn count_nodes(profile: &RadialProfile) -> usize {
    count_sign_changes(&profile.values)
}

pub fn find_ground_state(spec: &PotentialSpec, omega: f64, n: usize) -> Result<SolitaryWave> {
    find_ground_state_with(spec, omega, n, &SolverOptions::default())
}

pub fn find_ground_state_with(
    spec: &PotentialSpec,
    omega: f64,
    n: usize,
    options: &SolverOptions,
) -> Result<SolitaryWave> {
    solve_state(spec, omega, n, 0, options)
}

/// Planar state `R(r) e^{ikφ}` with `R(0) = 0` and no interior nodes.
pub fn find_excited_state(spec: &PotentialSpec, omega: f64, k: u32) -> Result<SolitaryWave> {
    find_excited_state_with(spec, omega, k, &SolverOptions::default())
}

pub fn find_excited_state_with(
    spec: &PotentialSpec,
    omega: f64,
    k: u32,
    options: &SolverOptions,
) -> Result<SolitaryWave> {
    if k == 0 {
        return Err(SolitonError::InvalidArgument(
            "excited states need k >= 1".into(),
        ));
    }
    solve_state(spec, omega, 2, k, options)
}

fn solve_state(
    spec: &PotentialSpec,
    omega: f64,
    n: usize,
    k: u32,
    options: &SolverOptions,
) -> Result<SolitaryWave> {
    let delta = validate_problem(spec, omega, n, k)?;
    let conditions = check_conditions(spec, omega, n);
    if !conditions.s2.holds {
        return Err(SolitonError::ConditionViolated(format!(
            "S2 fails: V(a) - omega^2 a^2/2 >= 0 on (0, {}]",
            spec.amplitude_cap
        )));
    }

    let h = options.grid_step_for(delta);
    let r_max = options.range_factor / delta;
    let shoot_at = |s: f64| shoot_on_grid(spec, omega, n, k, s, r_max, h, delta, options);

    let points = options.scan_points.max(2);
    let cap = spec.amplitude_cap;
    let scan: Vec<f64> = (0..points)
        .map(|i| {
            cap * options
                .scan_floor
                .powf(1.0 - i as f64 / (points - 1) as f64)
        })
        .collect();
    let sides: Vec<Option<Side>> = scan
        .par_iter()
        .map(|&s| shoot_at(s).map(|res| res.side).unwrap_or(None))
        .collect();
    let bracket = (0..points - 1)
        .find(|&i| sides[i] == Some(Side::Under) && sides[i + 1] == Some(Side::Over))
        .ok_or(SolitonError::NoBracket { omega, n, k })?;

    let mut lo = shoot_at(scan[bracket])?;
    let mut hi = shoot_at(scan[bracket + 1])?;
    let mut settled: Option<ShootResult> = None;
    for _ in 0..400 {
        let (s_lo, s_hi) = (lo.shoot_param, hi.shoot_param);
        let mid = 0.5 * (s_lo + s_hi);
        if mid <= s_lo || mid >= s_hi || s_hi - s_lo <= options.tol_s * s_lo {
            break;
        }
        let res = shoot_at(mid)?;
        match res.side {
            Some(Side::Under) => lo = res,
            Some(Side::Over) => hi = res,
            None => {
                settled = Some(res);
                break;
            }
        }
    }

    let (values, derivative, shoot_param) = match settled {
        Some(res) => (
            res.trajectory.values,
            res.trajectory.derivative,
            res.shoot_param,
        ),
        None => merge_bracket(&lo.trajectory, &hi.trajectory, options.agreement_tol)
            .map(|(v, d)| (v, d, 0.5 * (lo.shoot_param + hi.shoot_param)))?,
    };

    let profile = build_profile(
        spec,
        omega,
        n,
        k,
        h,
        delta,
        values,
        derivative,
        shoot_param,
        options,
    )?;
    if profile.node_count != 0 {
        return Err(SolitonError::NodeCountMismatch {
            nodes: profile.node_count,
        });
    }
    if profile.max_abs() > spec.amplitude_cap {
        return Err(SolitonError::ConditionViolated(format!(
            "profile height {} exceeds amplitude cap {}",
            profile.max_abs(),
            spec.amplitude_cap
        )));
    }
    Ok(SolitaryWave {
        n,
        k,
        omega,
        profile,
        spec: spec.clone(),
    })
}

/// Averages the two final bracketing trajectories up to where they disagree.
fn merge_bracket(
    lo: &Trajectory,
    hi: &Trajectory,
    agreement_tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let len = lo.values.len().min(hi.values.len());
    let mut values = Vec::with_capacity(len);
    let mut derivative = Vec::with_capacity(len);
    for i in 0..len {
        let (a, b) = (lo.values[i], hi.values[i]);
        let mean = 0.5 * (a + b);
        if i > 0 && (a - b).abs() > agreement_tol * mean.abs() {
            break;
        }
        values.push(mean);
        derivative.push(0.5 * (lo.derivative[i] + hi.derivative[i]));
    }
    if values.len() < 8 {
        return Err(SolitonError::TailNotCertified);
    }
    Ok((values, derivative))
}

#[allow(clippy::too_many_arguments)]
fn build_profile(
    spec: &PotentialSpec,
    omega: f64,
    n: usize,
    k: u32,
    h: f64,
    delta: f64,
    mut values: Vec<f64>,
    mut derivative: Vec<f64>,
    shoot_param: f64,
    options: &SolverOptions,
) -> Result<RadialProfile> {
    let peak_index = values
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, v)| {
            if v.abs() > best.1 {
                (i, v.abs())
            } else {
                best
            }
        })
        .0;
    let peak = values[peak_index].abs();

    // Splice where |R| first drops below the threshold, or at the end of the
    // trustworthy range, whichever comes first.
    let mut end = values.len() - 1;
    if let Some(j) =
        (peak_index..values.len()).find(|&j| values[j].abs() < options.match_tol * peak)
    {
        end = j;
    }
    values.truncate(end + 1);
    derivative.truncate(end + 1);
    let match_radius = end as f64 * h;

    let window_floor = values[end].abs();
    let start = (peak_index..=end)
        .find(|&j| values[j].abs() <= 10.0 * window_floor)
        .unwrap_or(end);
    if end < peak_index + 4 || end - start < 3 || match_radius * delta < 2.0 {
        return Err(SolitonError::TailNotCertified);
    }

    let mut tail = TailFit::new(delta, n, k, match_radius);
    let (mut num, mut den) = (0.0, 0.0);
    let (mut sx, mut sy, mut sxx, mut sxy, mut count) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (j, &v) in values.iter().enumerate().take(end + 1).skip(start) {
        let r = j as f64 * h;
        let (shape, _) = tail.shape(r);
        let g = shape * (-delta * r).exp();
        num += v * g;
        den += g * g;
        let log_ratio = (v.abs() / shape).ln();
        sx += r;
        sy += log_ratio;
        sxx += r * r;
        sxy += r * log_ratio;
        count += 1.0;
    }
    tail.prefactor = num / den;
    tail.fitted_delta = -(count * sxy - sx * sy) / (count * sxx - sx * sx);

    let second = values
        .iter()
        .zip(&derivative)
        .enumerate()
        .map(|(i, (&v, &d))| {
            second_derivative(spec, omega, n, k, shoot_param, i as f64 * h, [v, d])
        })
        .collect();

    let node_count = count_sign_changes(&values);
    Ok(RadialProfile {
        n,
        k,
        step: h,
        values,
        derivative,
        second,
        tail: Some(tail),
        node_count,
        shoot_param,
    })
}

/// Max-norm residual of the radial equation at interior nodes, by centered
/// differences of `R`, normalized by `max|R| * mass_sq`.
pub fn equation_residual(wave: &SolitaryWave) -> f64 {
    let profile = &wave.profile;
    let r = &profile.values;
    let h = profile.step;
    let w2 = wave.omega * wave.omega;
    let nm1 = wave.n as f64 - 1.0;
    let kk = (wave.k * wave.k) as f64;
    let mut worst = 0.0f64;
    for i in 1..r.len().saturating_sub(1) {
        let rad = i as f64 * h;
        let d2 = (r[i + 1] - 2.0 * r[i] + r[i - 1]) / (h * h);
        let d1 = (r[i + 1] - r[i - 1]) / (2.0 * h);
        let force = wave.spec.force_amplitude(r[i]);
        let res = d2 + nm1 / rad * d1 - kk / (rad * rad) * r[i] + w2 * r[i] + force;
        worst = worst.max(res.abs());
    }
    worst / (profile.max_abs() * wave.spec.mass_sq)
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: f64 = 0.848_528_137_423_857; // √0.72

    fn cubic() -> PotentialSpec {
        PotentialSpec::cubic(1.0, 1.0)
    }

    fn shoot_1d(s: f64) -> ShootResult {
        shoot(&cubic(), 0.8, 1, 0, s, 100.0, &SolverOptions::default()).unwrap()
    }

    #[test]
    fn exact_datum_decays() {
        let res = shoot_1d(0.848528);
        assert_eq!(
            res.outcome,
            ShootOutcome::Decayed,
            "depth {}",
            res.decay_depth
        );
    }

    #[test]
    fn high_datum_overshoots_low_undershoots() {
        assert_eq!(shoot_1d(2.0 * A).outcome, ShootOutcome::Overshot);
        assert_eq!(shoot_1d(0.5 * A).outcome, ShootOutcome::Undershot);
    }

    #[test]
    fn phase_plane_oracle_agrees_with_shooting() {
        // 1D energy ½R'² - κ²R²/2 + R⁴/4 is conserved: positive energy reaches
        // R = 0 with nonzero slope (crossing), negative energy turns back.
        for &s in &[0.3f64, 0.65, 0.8, 0.84, 0.86, 0.9, 1.2, 1.6] {
            let energy = -0.36 * s * s / 2.0 + s.powi(4) / 4.0;
            let expected = if energy > 0.0 {
                ShootOutcome::Overshot
            } else {
                ShootOutcome::Undershot
            };
            assert_eq!(shoot_1d(s).outcome, expected, "s = {s}");
        }
    }

    #[test]
    fn shoot_rejects_bad_input() {
        let opts = SolverOptions::default();
        assert!(shoot(&cubic(), 0.8, 3, 1, 1.0, 10.0, &opts).is_err());
        assert!(shoot(&cubic(), 1.2, 1, 0, 1.0, 10.0, &opts).is_err());
        assert!(shoot(&cubic(), 0.8, 1, 0, -1.0, 10.0, &opts).is_err());
    }

    #[test]
    fn count_nodes_examples() {
        let h = 0.01;
        let sech: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 * h).cosh()).collect();
        assert_eq!(count_sign_changes(&sech), 0);
        let neg: Vec<f64> = sech.iter().map(|v| -v).collect();
        assert_eq!(count_sign_changes(&neg), 0);
        let one: Vec<f64> = (0..=1000)
            .map(|i| {
                let r = i as f64 * h;
                (1.0 - r) * (-r).exp()
            })
            .collect();
        assert_eq!(count_sign_changes(&one), 1);
    }

    #[test]
    fn tail_series_terminates_for_odd_dimensions() {
        for n in [1usize, 3] {
            let tail = TailFit::new(0.6, n, 0, 10.0);
            let c = tail.series_coefficients();
            assert!(c[1..].iter().all(|&x| x == 0.0), "n = {n}: {c:?}");
        }
        let planar = TailFit::new(0.6, 2, 1, 10.0);
        assert!((planar.series_coefficients()[1] - 3.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn tail_derivative_matches_difference() {
        let mut tail = TailFit::new(0.6, 2, 1, 10.0);
        tail.prefactor = 2.0;
        let r = 12.0;
        let e = 1e-5;
        let fd = (tail.eval(r + e).0 - tail.eval(r - e).0) / (2.0 * e);
        assert!((tail.eval(r).1 - fd).abs() < 1e-9 * fd.abs().max(1e-12));
    }

    #[test]
    fn hermite_reproduces_cubic() {
        let f = |x: f64| x * x * x - x;
        let df = |x: f64| 3.0 * x * x - 1.0;
        let (x0, h) = (0.5, 0.25);
        let t = 0.3;
        let v = hermite(t, h, f(x0), f(x0 + h), df(x0), df(x0 + h));
        assert!((v - f(x0 + t * h)).abs() < 1e-14);
    }
}

//! Scalar functionals of a standing wave and the energy-momentum predictions built on them.
//!
//! With `a` the amplitude of the standing wave,
//!
//! ```text
//! I_0 = ½∫|a|²,  I_j = ½∫|∂_j a|²,  V_0 = ∫𝒱(|a|),  E_0 = Σ I_j + ω² I_0 + V_0.
//! ```
//!
//! Every stationary solution satisfies the dilation identity
//! `-(n-2) Σ I_j = n (V_0 - ω² I_0)`, and a moving wave obeys the particle
//! relation `E_v = γ E_0`, `P_v = γ E_0 v` exactly when the isotropy defect
//! `(n-1) I_1 - Σ_{j≥2} I_j` vanishes along the boost axis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::potential::{check_conditions, PotentialSpec};
use crate::quadrature::{exponential_tail, simpson};
use crate::radial::SolitaryWave;

/// Floor added to relative-residual denominators.
pub const EPS_FLOOR: f64 = 1e-30;

/// Surface area of the unit sphere `S^{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            let half = n as f64 / 2.0;
            2.0 * PI.powf(half) / gamma_half_integer(n)
        }
    }
}

// Γ(n/2) for positive integer n.
fn gamma_half_integer(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        (1..n / 2).map(|j| j as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < n as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub i0: f64,
    /// `I_1..I_n`; index 0 is the boost axis.
    pub i_k: Vec<f64>,
    pub v0: f64,
    pub e0: f64,
    pub pokhozhaev_residual: f64,
    pub isotropy_defect: f64,
    pub omega: f64,
    pub n: usize,
    pub k: u32,
}

impl FunctionalReport {
    /// Builds a report from the primary integrals; `e0` and both identity
    /// diagnostics are derived.
    pub fn from_integrals(i0: f64, i_k: Vec<f64>, v0: f64, omega: f64, k: u32) -> Self {
        let n = i_k.len();
        let mut report = Self {
            i0,
            e0: i_k.iter().sum::<f64>() + omega * omega * i0 + v0,
            i_k,
            v0,
            pokhozhaev_residual: 0.0,
            isotropy_defect: 0.0,
            omega,
            n,
            k,
        };
        report.pokhozhaev_residual = pokhozhaev_residual(&report);
        report.isotropy_defect = isotropy_defect(&report);
        report
    }

    pub fn gradient_sum(&self) -> f64 {
        self.i_k.iter().sum()
    }

    /// Report of `a(y_1, .., y_axis / factor, ..)`, the amplitude stretched by
    /// `factor` along one axis. The stretched field is no longer stationary.
    pub fn stretched(&self, axis: usize, factor: f64) -> Self {
        let i_k = self
            .i_k
            .iter()
            .enumerate()
            .map(|(j, &ij)| if j == axis { ij / factor } else { ij * factor })
            .collect();
        Self::from_integrals(self.i0 * factor, i_k, self.v0 * factor, self.omega, self.k)
    }
}

/// Radial quadrature of `I_0`, `I_j`, `V_0` with the analytic tail beyond the splice.
pub fn compute_functionals(wave: &SolitaryWave) -> Result<FunctionalReport> {
    let profile = &wave.profile;
    let tail = profile
        .tail
        .as_ref()
        .ok_or(SolitonError::TailNotCertified)?;
    if profile.len() < 3 {
        return Err(SolitonError::TailNotCertified);
    }
    let n = wave.n;
    let k = wave.k as f64;
    let spec = &wave.spec;
    let h = profile.step;
    let weight = |r: f64| r.powi(n as i32 - 1);

    // Angular-averaged gradient density: R'² + k² R²/r².
    let gradient = |r: f64, value: f64, slope: f64| {
        if k == 0.0 {
            slope * slope
        } else if r == 0.0 {
            // R ~ s r^k, so R/r → s for k = 1 and 0 beyond.
            if wave.k == 1 {
                k * k * profile.shoot_param * profile.shoot_param
            } else {
                0.0
            }
        } else {
            slope * slope + k * k * value * value / (r * r)
        }
    };

    let mut mass = Vec::with_capacity(profile.len());
    let mut grad = Vec::with_capacity(profile.len());
    let mut pot = Vec::with_capacity(profile.len());
    for (i, (&value, &slope)) in profile.values.iter().zip(&profile.derivative).enumerate() {
        let r = profile.radius(i);
        let w = weight(r);
        mass.push(value * value * w);
        grad.push(gradient(r, value, slope) * w);
        pot.push(spec.potential(value.abs()) * w);
    }

    let r_m = profile.radius(profile.len() - 1);
    let rate = 2.0 * tail.delta;
    // Tail integrands with the e^{-2δ(r - r_m)} weight divided out.
    let tail_integral = |integrand: &dyn Fn(f64, f64, f64) -> f64| {
        exponential_tail(r_m, rate, |r| {
            let (value, slope) = tail.eval(r);
            integrand(r, value, slope) * (rate * (r - r_m)).exp()
        })
    };
    let mass_int = simpson(&mass, h) + tail_integral(&|r, v, _| v * v * weight(r));
    let grad_int = simpson(&grad, h) + tail_integral(&|r, v, d| gradient(r, v, d) * weight(r));
    let pot_int = simpson(&pot, h) + tail_integral(&|r, v, _| spec.potential(v.abs()) * weight(r));

    let area = sphere_area(n);
    let i0 = 0.5 * area * mass_int;
    let per_axis = area * grad_int / (2.0 * n as f64);
    let v0 = area * pot_int;
    Ok(FunctionalReport::from_integrals(
        i0,
        vec![per_axis; n],
        v0,
        wave.omega,
        wave.k,
    ))
}

/// Relative residual of `-(n-2) Σ I_j = n (V_0 - ω² I_0)`.
pub fn pokhozhaev_residual(report: &FunctionalReport) -> f64 {
    let n = report.n as f64;
    let grad = report.gradient_sum();
    let w2 = report.omega * report.omega;
    let lhs = (n - 2.0) * grad + n * (report.v0 - w2 * report.i0);
    let scale = (n * report.v0).abs() + (n * w2 * report.i0).abs() + ((n - 2.0) * grad).abs();
    lhs.abs() / (scale + EPS_FLOOR)
}

/// `(n-1) I_1 - Σ_{j≥2} I_j`, with axis 1 the boost axis.
pub fn isotropy_defect(report: &FunctionalReport) -> f64 {
    match report.i_k.split_first() {
        Some((first, rest)) => (report.n as f64 - 1.0) * first - rest.iter().sum::<f64>(),
        None => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    ClosedForm,
    GeneralFormula,
    GridMeasured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictionMode {
    /// `E_v = γ E_0`, `P_v = γ E_0 v`.
    ClosedForm,
    /// Valid for any stationary amplitude, isotropic or not.
    GeneralFormula,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyMomentum {
    pub energy: f64,
    pub momentum: Vec<f64>,
    pub velocity: Vec<f64>,
    pub provenance: Provenance,
}

pub fn lorentz_factor(velocity: &[f64]) -> Result<f64> {
    let speed_sq: f64 = velocity.iter().map(|v| v * v).sum();
    if !(speed_sq < 1.0) {
        return Err(SolitonError::SuperluminalVelocity {
            speed: speed_sq.sqrt(),
        });
    }
    Ok(1.0 / (1.0 - speed_sq).sqrt())
}

/// Energy and momentum of the wave boosted to `velocity`.
///
/// In general mode the report's axis 1 must be the boost axis:
/// `E_v = γ E_0 + γ (2v²/n) ((n-1) I_1 - Σ_{j≥2} I_j)` and
/// `P_v = 2γ (I_1 + ω² I_0) v`.
pub fn predict_energy_momentum(
    report: &FunctionalReport,
    velocity: &[f64],
    mode: PredictionMode,
) -> Result<EnergyMomentum> {
    if velocity.len() != report.n {
        return Err(SolitonError::InvalidArgument(format!(
            "velocity has {} components, report has n = {}",
            velocity.len(),
            report.n
        )));
    }
    let gamma = lorentz_factor(velocity)?;
    let speed_sq: f64 = velocity.iter().map(|v| v * v).sum();
    let (energy, momentum) = match mode {
        PredictionMode::ClosedForm => {
            let e = gamma * report.e0;
            (e, velocity.iter().map(|v| e * v).collect())
        }
        PredictionMode::GeneralFormula => {
            let n = report.n as f64;
            let e = gamma * report.e0 + gamma * 2.0 * speed_sq / n * isotropy_defect(report);
            let along = 2.0 * gamma * (report.i_k[0] + report.omega * report.omega * report.i0);
            (e, velocity.iter().map(|v| along * v).collect())
        }
    };
    Ok(EnergyMomentum {
        energy,
        momentum,
        velocity: velocity.to_vec(),
        provenance: match mode {
            PredictionMode::ClosedForm => Provenance::ClosedForm,
            PredictionMode::GeneralFormula => Provenance::GeneralFormula,
        },
    })
}

/// Sign check on the rest energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestEnergyCheck {
    pub e0: f64,
    pub omega: f64,
    /// S4 on `[0, max|R|]`, the amplitudes the wave actually attains.
    pub s4_on_attained_range: bool,
    /// `E_0 > 0` is guaranteed for `ω ≠ 0` when S4 holds on the attained range.
    pub positive_expected: bool,
    pub positive: bool,
    pub warnings: Vec<String>,
}

impl RestEnergyCheck {
    /// False only when positivity was guaranteed and did not hold.
    pub fn consistent(&self) -> bool {
        !self.positive_expected || self.positive
    }
}

pub fn check_rest_energy(wave: &SolitaryWave, report: &FunctionalReport) -> RestEnergyCheck {
    let attained = wave.profile.max_abs();
    let on_attained = PotentialSpec {
        amplitude_cap: attained.max(f64::MIN_POSITIVE),
        ..wave.spec.clone()
    };
    let s4_attained = check_conditions(&on_attained, wave.omega, wave.n)
        .s4
        .holds_on_cap_range;
    let s4_cap = check_conditions(&wave.spec, wave.omega, wave.n)
        .s4
        .holds_on_cap_range;
    let positive = report.e0 > 0.0;
    let mut warnings = Vec::new();
    if !s4_attained {
        warnings.push(format!(
            "S4 fails on the attained amplitude range [0, {attained:.6}]; E0 > 0 is not guaranteed"
        ));
    } else if !s4_cap {
        warnings.push(format!(
            "S4 fails beyond the attained amplitude {attained:.6} (cap {})",
            wave.spec.amplitude_cap
        ));
    }
    if wave.omega == 0.0 {
        warnings.push(format!(
            "zero-frequency wave: S2 and S4 are incompatible, E0 = {:.6e}; stability is not asserted",
            report.e0
        ));
    }
    RestEnergyCheck {
        e0: report.e0,
        omega: wave.omega,
        s4_on_attained_range: s4_attained,
        positive_expected: wave.omega != 0.0 && s4_attained,
        positive,
        warnings,
    }
}

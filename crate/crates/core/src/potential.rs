//! U(1)-invariant polynomial potentials.
//!
//! The potential depends on the field only through its modulus,
//! `V(psi) = 𝒱(|psi|)` with
//!
//! ```text
//! 𝒱(a) = mass_sq * a^2 / 2 - Σ_j coupling_j * a^(exponent_j) / exponent_j
//! ```
//!
//! so a positive coupling is focusing. The force `f = -∇_psi V` is then a real
//! multiple of `psi`, which makes U(1) equivariance hold by construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};

/// Number of uniform scan points used for the S2 and S4 inequalities.
pub const CONDITION_SCAN_POINTS: usize = 10_000;

/// One monomial of the self-interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coupling: f64,
    /// Power of the modulus in the potential; the force carries `exponent - 1`.
    pub exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub mass_sq: f64,
    pub terms: Vec<Term>,
    /// Upper end of the amplitude range scanned by [`check_conditions`].
    pub amplitude_cap: f64,
}

impl PotentialSpec {
    pub fn new(mass_sq: f64, terms: Vec<Term>, amplitude_cap: f64) -> Result<Self> {
        let spec = Self {
            mass_sq,
            terms,
            amplitude_cap,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `𝒱(a) = mass_sq a²/2 - b a⁴/4`, the focusing cubic Klein-Gordon nonlinearity.
    ///
    /// The cap is ten times the largest one-dimensional ground-state amplitude
    /// `√(2 mass_sq / b)` (attained at zero frequency).
    pub fn cubic(mass_sq: f64, b: f64) -> Self {
        let amplitude = if b > 0.0 {
            (2.0 * mass_sq / b).sqrt()
        } else {
            1.0
        };
        Self {
            mass_sq,
            terms: vec![Term {
                coupling: b,
                exponent: 4,
            }],
            amplitude_cap: 10.0 * amplitude.max(f64::MIN_POSITIVE),
        }
    }

    pub fn with_amplitude_cap(mut self, cap: f64) -> Self {
        self.amplitude_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass_sq.is_finite() && self.mass_sq >= 0.0) {
            return Err(SolitonError::InvalidArgument(format!(
                "mass_sq must be finite and non-negative, got {}",
                self.mass_sq
            )));
        }
        if !(self.amplitude_cap.is_finite() && self.amplitude_cap > 0.0) {
            return Err(SolitonError::InvalidArgument(format!(
                "amplitude_cap must be finite and positive, got {}",
                self.amplitude_cap
            )));
        }
        for term in &self.terms {
            if term.exponent < 3 {
                return Err(SolitonError::InvalidArgument(format!(
                    "term exponent must be at least 3, got {}",
                    term.exponent
                )));
            }
            if !term.coupling.is_finite() {
                return Err(SolitonError::InvalidArgument(
                    "term coupling must be finite".into(),
                ));
            }
        }
        Ok(())
    }

    /// `𝒱(a)`.
    pub fn potential(&self, a: f64) -> f64 {
        let mut v = 0.5 * self.mass_sq * a * a;
        for term in &self.terms {
            let e = term.exponent as i32;
            v -= term.coupling * a.powi(e) / e as f64;
        }
        v
    }

    /// `𝒱′(a)`.
    pub fn potential_derivative(&self, a: f64) -> f64 {
        let mut dv = self.mass_sq * a;
        for term in &self.terms {
            dv -= term.coupling * a.powi(term.exponent as i32 - 1);
        }
        dv
    }

    /// `𝒱″(a)`, used by the second-order Taylor start of the radial ODE.
    pub fn potential_second_derivative(&self, a: f64) -> f64 {
        let mut d2v = self.mass_sq;
        for term in &self.terms {
            let e = term.exponent as i32;
            d2v -= term.coupling * (e - 1) as f64 * a.powi(e - 2);
        }
        d2v
    }

    /// Real force on a non-negative amplitude, `g(a) = -𝒱′(a)`.
    pub fn force_amplitude(&self, a: f64) -> f64 {
        -self.potential_derivative(a)
    }

    /// `f(ψ)/ψ = -mass_sq + Σ coupling |ψ|^(exponent-2)` as a function of `|ψ|²`.
    ///
    /// Even powers are formed from `|ψ|²` directly so that the multiplier is
    /// a polynomial in the squared modulus.
    pub fn force_multiplier(&self, modulus_sq: f64) -> f64 {
        let mut g = -self.mass_sq;
        for term in &self.terms {
            let p = term.exponent - 2;
            let power = if p % 2 == 0 {
                modulus_sq.powi((p / 2) as i32)
            } else {
                modulus_sq.sqrt().powi(p as i32)
            };
            g += term.coupling * power;
        }
        g
    }

    /// `f(ψ) = -∇_ψ V(ψ)`.
    pub fn force(&self, psi: Complex64) -> Complex64 {
        psi * self.force_multiplier(psi.norm_sqr())
    }

    /// Smallest positive zero of `𝒱(a) - ω²a²/2`, i.e. the turning amplitude
    /// of the one-dimensional ground state. `None` when S2 fails on `(0, 10⁶]`.
    pub fn stationary_amplitude(&self, omega: f64) -> Option<f64> {
        let g = |a: f64| self.potential(a) - 0.5 * omega * omega * a * a;
        let mut lo = 1e-6;
        if g(lo) < 0.0 {
            return Some(lo);
        }
        while lo < 1e6 {
            let hi = lo * 1.01;
            if g(hi) < 0.0 {
                return Some(bisect_root(g, lo, hi));
            }
            lo = hi;
        }
        None
    }

    /// Exponent of the leading term of the force as `a → ∞`, with its coefficient.
    fn leading_force_term(&self) -> (f64, f64) {
        let mut best = (1.0, -self.mass_sq);
        for term in &self.terms {
            if term.coupling == 0.0 {
                continue;
            }
            let p = (term.exponent - 1) as f64;
            if p > best.0 {
                best = (p, term.coupling);
            } else if p == best.0 {
                best.1 += term.coupling;
            }
        }
        best
    }
}

/// `𝒱(a)` for a validated spec.
pub fn evaluate_potential(spec: &PotentialSpec, a: f64) -> f64 {
    spec.potential(a)
}

/// `f(ψ)` for a validated spec.
pub fn evaluate_force(spec: &PotentialSpec, psi: Complex64) -> Complex64 {
    spec.force(psi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S1Check {
    pub holds: bool,
    /// `lim_{a→0+} f(a)/a + ω² = ω² - mass_sq`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S2Check {
    pub holds: bool,
    pub witness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S3Check {
    /// `false` for `n ≤ 2`, where the critical exponent `(n+2)/(n-2)` is undefined or negative.
    pub applicable: bool,
    pub holds: bool,
    pub critical_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S4Check {
    pub holds_on_cap_range: bool,
    pub first_violation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub s1: S1Check,
    pub s2: S2Check,
    pub s3: S3Check,
    pub s4: S4Check,
}

impl ConditionReport {
    /// True when the S2 witness itself violates S4, so both cannot hold on the cap range.
    pub fn s2_s4_incompatible(&self) -> bool {
        self.s2.holds && !self.s4.holds_on_cap_range
    }
}

/// Scans the existence conditions S1-S4 for frequency `omega` in dimension `n`.
pub fn check_conditions(spec: &PotentialSpec, omega: f64, n: usize) -> ConditionReport {
    let w2 = omega * omega;

    let value = w2 - spec.mass_sq;
    let s1 = S1Check {
        holds: value.is_finite() && value < 0.0,
        value,
    };

    let s2_fn = |a: f64| spec.potential(a) - 0.5 * w2 * a * a;
    let s2_witness = scan_first(spec, s2_fn, -w2);
    let s2 = S2Check {
        holds: s2_witness.is_some(),
        witness: s2_witness,
    };

    let s3 = if n >= 3 {
        let l = (n as f64 + 2.0) / (n as f64 - 2.0);
        let (power, coefficient) = spec.leading_force_term();
        // f(a) = -α a^l + o(a^l) with α ≥ 0.
        let holds = power < l || ((power - l).abs() < 1e-12 && coefficient <= 0.0);
        S3Check {
            applicable: true,
            holds,
            critical_exponent: Some(l),
        }
    } else {
        S3Check {
            applicable: false,
            holds: false,
            critical_exponent: None,
        }
    };

    let s4_fn = |a: f64| spec.potential(a) + 0.5 * w2 * a * a;
    let s4_violation = scan_first(spec, s4_fn, w2);
    let s4 = S4Check {
        holds_on_cap_range: s4_violation.is_none(),
        first_violation: s4_violation,
    };

    ConditionReport { s1, s2, s3, s4 }
}

/// First point of `[0, cap]` (uniform grid plus refined stationary points of
/// `g(a) = 𝒱(a) + c a²/2`) where `g` is negative beyond rounding.
fn scan_first<G>(spec: &PotentialSpec, g: G, c: f64) -> Option<f64>
where
    G: Fn(f64) -> f64,
{
    let magnitude = |a: f64| {
        let mut m = 0.5 * (spec.mass_sq + c.abs()) * a * a;
        for term in &spec.terms {
            m += (term.coupling * a.powi(term.exponent as i32)).abs() / term.exponent as f64;
        }
        m
    };
    let cap = spec.amplitude_cap;
    let step = cap / CONDITION_SCAN_POINTS as f64;
    let dg = |a: f64| spec.potential_derivative(a) + c * a;

    let mut candidates: Vec<f64> = (1..=CONDITION_SCAN_POINTS)
        .map(|i| i as f64 * step)
        .collect();
    let mut prev_a = step;
    let mut prev_dg = dg(prev_a);
    for &a in candidates.clone().iter().skip(1) {
        let d = dg(a);
        if d == 0.0 {
            candidates.push(a);
        } else if prev_dg.signum() != d.signum() && prev_dg != 0.0 {
            candidates.push(bisect_root(dg, prev_a, a));
        }
        prev_a = a;
        prev_dg = d;
    }
    candidates.sort_by(f64::total_cmp);
    candidates
        .into_iter()
        .find(|&a| g(a) < -1e-12 * magnitude(a))
}

/// Bisection for a sign change of `f` on `[lo, hi]`, to adjacent floats.
fn bisect_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

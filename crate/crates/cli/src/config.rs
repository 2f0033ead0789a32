use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use soliton_core::potential::{check_conditions, PotentialSpec, Term};
use soliton_core::radial::SolverOptions;

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub mass_sq: f64,
    pub terms: Vec<Term>,
    /// Defaults to ten times the zero-frequency turning amplitude.
    #[serde(default)]
    pub amplitude_cap: Option<f64>,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            mass_sq: 1.0,
            terms: vec![Term {
                coupling: 1.0,
                exponent: 4,
            }],
            amplitude_cap: None,
        }
    }
}

/// A speed along axis 1 or a full velocity vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Velocity {
    Speed(f64),
    Vector(Vec<f64>),
}

impl Velocity {
    pub fn components(&self, n: usize) -> Vec<f64> {
        match self {
            Velocity::Speed(v) => {
                let mut out = vec![0.0; n];
                out[0] = *v;
                out
            }
            Velocity::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Cartesian spacing `h` on every axis.
    pub spacing: f64,
    /// Half-widths per axis; sized from the wave and velocities when absent.
    pub extent: Option<Vec<f64>>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            spacing: 0.02,
            extent: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Radial grid step; `step_scale / δ` when absent.
    pub grid_step: Option<f64>,
    pub step_scale: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_step: None,
            step_scale: SolverOptions::default().step_scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub t_final: f64,
    pub dt: f64,
    pub diag_stride: usize,
    pub velocity: Velocity,
    /// Steps between binary snapshots; 0 disables them.
    pub snapshot_stride: usize,
    pub check_speed: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            t_final: 10.0,
            dt: 0.01,
            diag_stride: 10,
            velocity: Velocity::Speed(0.6),
            snapshot_stride: 0,
            check_speed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub tol_s: f64,
    /// Bound on the dilation-identity residual.
    pub quadrature_tol: f64,
    /// Bound on `|isotropy_defect| / E_0`.
    pub isotropy_tol: f64,
    pub scan_rel_err: f64,
    /// Relative error allowed in the fitted translation speed.
    pub speed_rel_err: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_s: SolverOptions::default().tol_s,
            quadrature_tol: 1e-6,
            isotropy_tol: 1e-6,
            scan_rel_err: 1e-3,
            speed_rel_err: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    pub omega: f64,
    pub n: usize,
    pub k: u32,
    pub grid: GridConfig,
    pub velocities: Vec<Velocity>,
    pub evolve: EvolveConfig,
    pub tolerances: Tolerances,
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            potential: PotentialConfig::default(),
            omega: 0.8,
            n: 1,
            k: 0,
            grid: GridConfig::default(),
            velocities: [0.0, 0.3, 0.6, 0.9].map(Velocity::Speed).to_vec(),
            evolve: EvolveConfig::default(),
            tolerances: Tolerances::default(),
            solver: SolverConfig::default(),
            output_dir: PathBuf::from("soliton-out"),
        }
    }
}

fn config_error(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

/// Sets `path` (dot separated) inside a JSON document, creating objects as needed.
/// The value is read as JSON when it parses, otherwise as a string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), Failure> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_error(format!("override `{assignment}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(config_error(format!("empty key segment in `{key}`")));
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| config_error(format!("`{key}` does not name a config field")))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

/// Reads the config file (or defaults), applies overrides and validates.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, Failure> {
    let base: RunConfig = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| config_error(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| config_error(format!("invalid config {}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    let mut doc = serde_json::to_value(&base).map_err(|e| config_error(e.to_string()))?;
    for assignment in overrides {
        apply_override(&mut doc, assignment)?;
    }
    let config: RunConfig =
        serde_json::from_value(doc).map_err(|e| config_error(format!("invalid override: {e}")))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn potential_spec(&self) -> Result<PotentialSpec, Failure> {
        let p = &self.potential;
        let provisional = PotentialSpec {
            mass_sq: p.mass_sq,
            terms: p.terms.clone(),
            amplitude_cap: 1.0,
        };
        let cap = match p.amplitude_cap {
            Some(cap) => cap,
            None => provisional
                .stationary_amplitude(0.0)
                .map(|a| 10.0 * a)
                .unwrap_or(100.0),
        };
        PotentialSpec::new(p.mass_sq, p.terms.clone(), cap).map_err(Failure::from)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            grid_step: self.solver.grid_step,
            step_scale: self.solver.step_scale,
            tol_s: self.tolerances.tol_s,
            ..SolverOptions::default()
        }
    }

    pub fn velocity_vectors(&self) -> Vec<Vec<f64>> {
        self.velocities
            .iter()
            .map(|v| v.components(self.n))
            .collect()
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let spec = self.potential_spec()?;
        if !(1..=3).contains(&self.n) {
            return Err(config_error(format!("n must be 1, 2 or 3, got {}", self.n)));
        }
        if self.k >= 1 && self.n != 2 {
            return Err(config_error(format!(
                "invariant violation: k = {} requires n = 2, got n = {}",
                self.k, self.n
            )));
        }
        if !self.omega.is_finite() {
            return Err(config_error("omega must be finite"));
        }
        let s1 = check_conditions(&spec, self.omega, self.n).s1;
        if !s1.holds {
            return Err(config_error(format!(
                "S1 fails: omega² - mass_sq = {} must be negative",
                s1.value
            )));
        }
        let mut all = self.velocities.clone();
        all.push(self.evolve.velocity.clone());
        for v in &all {
            let c = v.components(self.n);
            if c.len() != self.n {
                return Err(config_error(format!(
                    "velocity {c:?} does not have n = {} components",
                    self.n
                )));
            }
            let speed = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(speed < 1.0) {
                return Err(config_error(format!(
                    "velocity {c:?} has speed {speed}, not below 1"
                )));
            }
        }
        if !(self.grid.spacing > 0.0 && self.grid.spacing.is_finite()) {
            return Err(config_error("grid.spacing must be positive"));
        }
        if let Some(extent) = &self.grid.extent {
            if extent.len() != self.n || extent.iter().any(|l| !(*l > 0.0)) {
                return Err(config_error(format!(
                    "grid.extent needs {} positive half-widths",
                    self.n
                )));
            }
        }
        if let Some(h) = self.solver.grid_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(config_error("solver.grid_step must be positive"));
            }
        }
        if !(self.solver.step_scale > 0.0) {
            return Err(config_error("solver.step_scale must be positive"));
        }
        let e = &self.evolve;
        if !(e.t_final >= 0.0 && e.t_final.is_finite()) || !(e.dt > 0.0) || e.diag_stride == 0 {
            return Err(config_error(
                "evolve needs t_final >= 0, dt > 0 and diag_stride >= 1",
            ));
        }
        let t = &self.tolerances;
        for (name, value) in [
            ("tol_s", t.tol_s),
            ("quadrature_tol", t.quadrature_tol),
            ("isotropy_tol", t.isotropy_tol),
            ("scan_rel_err", t.scan_rel_err),
            ("speed_rel_err", t.speed_rel_err),
        ] {
            if !(value >= 0.0) {
                return Err(config_error(format!(
                    "tolerances.{name} must be non-negative"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_reach_nested_fields() {
        let config = load(
            None,
            &[
                "omega=0.5".into(),
                "evolve.dt=0.005".into(),
                "velocities=[0.1,[0.2]]".into(),
                "output_dir=/tmp/x".into(),
            ],
        )
        .unwrap();
        assert_eq!(config.omega, 0.5);
        assert_eq!(config.evolve.dt, 0.005);
        assert_eq!(
            config.velocities,
            vec![Velocity::Speed(0.1), Velocity::Vector(vec![0.2])]
        );
        assert_eq!(config.output_dir, PathBuf::from("/tmp/x"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            load(None, &["omegaa=0.5".into()]),
            Err(Failure::Config(_))
        ));
        assert!(matches!(
            load(None, &["evolve=3".into()]),
            Err(Failure::Config(_))
        ));
    }

    #[test]
    fn cross_field_invariants() {
        assert!(load(None, &["omega=1.2".into()]).is_err());
        assert!(load(None, &["k=1".into(), "n=3".into()]).is_err());
        assert!(load(None, &["velocities=[1.0]".into()]).is_err());
        assert!(load(None, &["n=2".into(), "k=1".into()]).is_ok());
    }

    #[test]
    fn normalized_round_trip_is_idempotent() {
        let config = load(None, &["n=2".into()]).unwrap();
        let once = serde_json::to_string(&config).unwrap();
        let again: RunConfig = serde_json::from_str(&once).unwrap();
        assert_eq!(serde_json::to_string(&again).unwrap(), once);
    }

    #[test]
    fn default_cap_matches_cubic() {
        let spec = RunConfig::default().potential_spec().unwrap();
        assert!((spec.amplitude_cap - 10.0 * 2f64.sqrt()).abs() < 1e-8);
    }
}

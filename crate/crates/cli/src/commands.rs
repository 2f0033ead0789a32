use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use soliton_core::boost::{boost_scan, required_extent, sample_boosted, ScanRow};
use soliton_core::evolver::{evolve_with, fit_velocity, relative_energy_drift};
use soliton_core::formats::{self, ProfileSidecar};
use soliton_core::functionals::{check_rest_energy, compute_functionals, FunctionalReport};
use soliton_core::grid::{modulus_l2_distance, relative_l2_distance, GridSpec};
use soliton_core::potential::check_conditions;
use soliton_core::radial::{
    equation_residual, find_excited_state_with, find_ground_state_with, SolitaryWave,
};

use crate::config::RunConfig;
use crate::Failure;

/// Collects the files a command writes under `output_dir`.
pub struct Output {
    dir: PathBuf,
    artifacts: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, Failure> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Numerical(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    fn record(&mut self, name: &str) {
        if !self.artifacts.iter().any(|a| a == name) {
            self.artifacts.push(name.to_string());
        }
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        formats::write_atomic(&self.dir.join(name), contents.as_bytes())?;
        self.record(name);
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        formats::write_json(&self.dir.join(name), value)?;
        self.record(name);
        Ok(())
    }

    pub fn bytes(&mut self, name: &str, contents: &[u8]) -> Result<(), Failure> {
        formats::write_atomic(&self.dir.join(name), contents)?;
        self.record(name);
        Ok(())
    }

    pub fn finish(mut self, command: &str, config: &RunConfig) -> Result<(), Failure> {
        let manifest = json!({
            "command": command,
            "artifacts": self.artifacts,
            "config": config,
        });
        self.json("manifest.json", &manifest)
    }
}

/// Whether every check a command ran stayed within tolerance.
pub type Verdict = bool;

pub fn solve_wave(config: &RunConfig) -> Result<SolitaryWave, Failure> {
    let spec = config.potential_spec()?;
    let options = config.solver_options();
    let wave = if config.k == 0 {
        find_ground_state_with(&spec, config.omega, config.n, &options)?
    } else {
        find_excited_state_with(&spec, config.omega, config.k, &options)?
    };
    Ok(wave)
}

pub fn solve(config: &RunConfig, out: &mut Output) -> Result<(SolitaryWave, Verdict), Failure> {
    let wave = solve_wave(config)?;
    out.text("profile.csv", &formats::profile_csv(&wave))?;
    out.json("profile.json", &ProfileSidecar::new(&wave))?;
    println!(
        "shoot_param = {}",
        formats::fmt_f64(wave.profile.shoot_param)
    );
    println!("delta = {}", formats::fmt_f64(wave.delta()));
    println!("node_count = {}", wave.profile.node_count);
    println!(
        "equation_residual = {}",
        formats::fmt_f64(equation_residual(&wave))
    );
    Ok((wave, true))
}

pub fn check(
    config: &RunConfig,
    wave: &SolitaryWave,
    out: &mut Output,
) -> Result<(FunctionalReport, Verdict), Failure> {
    let report = compute_functionals(wave)?;
    let conditions = check_conditions(&wave.spec, wave.omega, wave.n);
    let rest = check_rest_energy(wave, &report);
    let tol = &config.tolerances;
    let isotropy_ratio = report.isotropy_defect.abs() / report.e0.abs().max(f64::MIN_POSITIVE);
    let pokhozhaev_ok = report.pokhozhaev_residual < tol.quadrature_tol;
    let isotropy_ok = isotropy_ratio <= tol.isotropy_tol;
    let passed = pokhozhaev_ok && isotropy_ok;

    out.json("report.json", &report)?;
    out.json(
        "check.json",
        &json!({
            "report": report,
            "conditions": conditions,
            "s2_s4_incompatible": conditions.s2_s4_incompatible(),
            "rest_energy": rest,
            "isotropy_ratio": isotropy_ratio,
            "quadrature_tol": tol.quadrature_tol,
            "isotropy_tol": tol.isotropy_tol,
            "passed": passed,
        }),
    )?;
    print!("{}", formats::report_json(&report)?);
    for warning in &rest.warnings {
        eprintln!("warning: {warning}");
    }
    if !pokhozhaev_ok {
        eprintln!(
            "dilation identity residual {:.3e} exceeds {:.3e}",
            report.pokhozhaev_residual, tol.quadrature_tol
        );
    }
    if !isotropy_ok {
        eprintln!(
            "isotropy defect ratio {:.3e} exceeds {:.3e}",
            isotropy_ratio, tol.isotropy_tol
        );
    }
    Ok((report, passed))
}

fn scan_grid(config: &RunConfig, wave: &SolitaryWave) -> Result<GridSpec, Failure> {
    let h = config.grid.spacing;
    let extent = match &config.grid.extent {
        Some(extent) => extent.clone(),
        None => {
            let mut extent = required_extent(wave, &vec![0.0; wave.n], 0.0);
            for v in config.velocity_vectors() {
                for (e, r) in extent.iter_mut().zip(required_extent(wave, &v, 0.0)) {
                    *e = e.max(r);
                }
            }
            extent
        }
    };
    Ok(GridSpec::with_spacing(extent, h)?)
}

pub fn scan(
    config: &RunConfig,
    wave: &SolitaryWave,
    out: &mut Output,
) -> Result<(Vec<ScanRow>, Verdict), Failure> {
    let velocities = config.velocity_vectors();
    let rows = if velocities.is_empty() {
        Vec::new()
    } else {
        let grid = scan_grid(config, wave)?;
        boost_scan(wave, &velocities, &grid)?
    };
    let max_e = rows.iter().map(|r| r.rel_err_e).fold(0.0, f64::max);
    let max_p = rows.iter().map(|r| r.rel_err_p).fold(0.0, f64::max);
    let limit = config.tolerances.scan_rel_err;
    let passed = rows
        .iter()
        .all(|r| r.rel_err_e <= limit && r.rel_err_p <= limit);

    out.text("scan.csv", &formats::scan_csv(wave.n, &rows))?;
    out.json(
        "scan.json",
        &json!({
            "rows": rows,
            "count": rows.len(),
            "max_rel_err_e": max_e,
            "max_rel_err_p": max_p,
            "scan_rel_err": limit,
            "passed": passed,
        }),
    )?;
    for r in &rows {
        println!(
            "v = {:?}  E = {}  relE = {:.3e}  relP = {:.3e}",
            r.velocity,
            formats::fmt_f64(r.energy_measured),
            r.rel_err_e,
            r.rel_err_p
        );
    }
    if !passed {
        eprintln!(
            "scan relative error {:.3e} exceeds {limit:.3e}",
            max_e.max(max_p)
        );
    }
    Ok((rows, passed))
}

pub fn evolve(
    config: &RunConfig,
    wave: &SolitaryWave,
    out: &mut Output,
) -> Result<Verdict, Failure> {
    if wave.n > 2 {
        return Err(Failure::Config(format!(
            "evolution supports n = 1 and n = 2, got n = {}",
            wave.n
        )));
    }
    let e = &config.evolve;
    let v = e.velocity.components(wave.n);
    let grid = match &config.grid.extent {
        Some(extent) => GridSpec::with_spacing(extent.clone(), config.grid.spacing)?,
        None => GridSpec::for_wave(wave, &v, e.t_final, config.grid.spacing)?,
    };
    let initial = sample_boosted(wave, &v, &grid, 0.0)?;
    let mut snapshots: Vec<(String, Vec<u8>)> = Vec::new();
    let state = evolve_with(
        initial.clone(),
        &wave.spec,
        e.t_final,
        e.dt,
        e.diag_stride,
        |step, state| {
            if e.snapshot_stride > 0 && step % e.snapshot_stride == 0 {
                snapshots.push((
                    format!("snapshot_{step:06}.bin"),
                    formats::encode_sample(&state.sample),
                ));
            }
            Ok(())
        },
    )?;
    for (name, bytes) in &snapshots {
        out.bytes(name, bytes)?;
    }

    let exact = sample_boosted(wave, &v, &grid, state.time())?;
    let distance = relative_l2_distance(&state.sample.psi, &exact.psi);
    let modulus_distance = modulus_l2_distance(&state.sample.psi, &exact.psi);
    let drift = relative_energy_drift(&state.diagnostics);
    let fitted = fit_velocity(&state.diagnostics);
    let speed = v.iter().map(|x| x * x).sum::<f64>().sqrt();

    let speed_ok = if !e.check_speed {
        true
    } else if speed > 0.0 {
        match &fitted {
            Some(f) => {
                let along: f64 = f.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / speed;
                (along - speed).abs() <= config.tolerances.speed_rel_err * speed
            }
            None => false,
        }
    } else {
        // At rest the center of energy may not wander by more than a cell.
        let h = grid.min_spacing();
        let start = &state.diagnostics[0].center_of_energy;
        state.diagnostics.iter().all(|d| {
            d.center_of_energy
                .iter()
                .zip(start)
                .all(|(x, x0)| (x - x0).abs() <= h)
        })
    };

    out.text(
        "diagnostics.csv",
        &formats::diagnostics_csv(wave.n, &state.diagnostics),
    )?;
    out.json(
        "evolve.json",
        &json!({
            "velocity": v,
            "fitted_velocity": fitted,
            "energy_drift": drift,
            "final_time": state.time(),
            "steps": state.steps_taken,
            "grid": grid,
            "relative_l2_distance": distance,
            "modulus_l2_distance": modulus_distance,
            "speed_checked": e.check_speed,
            "passed": speed_ok,
        }),
    )?;
    if let Some(f) = &fitted {
        println!("fitted_velocity = {f:?}");
    }
    println!("energy_drift = {drift:.3e}");
    println!("relative_l2_distance = {distance:.3e}");
    if !speed_ok {
        eprintln!("translation speed check failed: fitted {fitted:?}, expected {v:?}");
    }
    Ok(speed_ok)
}

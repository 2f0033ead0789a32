//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use soliton_core::boost::{boost_scan, sample_boosted};
use soliton_core::evolver::{evolve, fit_velocity, relative_energy_drift};
use soliton_core::functionals::{
    check_rest_energy, compute_functionals, predict_energy_momentum, PredictionMode,
};
use soliton_core::grid::{modulus_l2_distance, relative_l2_distance, GridSpec};
use soliton_core::potential::{check_conditions, PotentialSpec};
use soliton_core::radial::{
    find_excited_state, find_excited_state_with, find_ground_state, find_ground_state_with,
    SolitaryWave, SolverOptions,
};
use soliton_core::Result;

// AC-1
const ORACLE_REL_TOL: f64 = 1e-6;
const ORACLE_AMPLITUDE_SQ: f64 = 0.72;
const ORACLE_I0: f64 = 1.2;
const ORACLE_I1: f64 = 0.144;
const ORACLE_V0: f64 = 0.912;
const ORACLE_E0: f64 = 1.824;
const AC1_BUDGET: Duration = Duration::from_secs(1);
// AC-2
const IDENTITY_TOL: f64 = 1e-6;
const HALVING_FACTOR: f64 = 8.0;
const HALVING_STEP_SCALES: (f64, f64) = (0.1, 0.05);
// A residual already below this cannot show a further decrease above rounding.
const RESIDUAL_FLOOR: f64 = 1e-10;
const AC2_BUDGET: Duration = Duration::from_secs(10);
// AC-3
const SCAN_REL_TOL: f64 = 1e-3;
const TRANSVERSE_TOL: f64 = 1e-6;
const LINE_SPACING: f64 = 0.02;
const PLANE_SPACING: f64 = 0.05;
const AC3_BUDGET: Duration = Duration::from_secs(120);
// AC-4
const ISOTROPY_TOL: f64 = 1e-6;
const STRETCH: f64 = 2.0;
const DEFECT_TERM_TOL: f64 = 1e-8;
// AC-5
const EVOLVE_SPEED: f64 = 0.6;
const EVOLVE_T: f64 = 10.0;
const EVOLVE_DT: f64 = 0.01;
const EVOLVE_H: f64 = 0.02;
const SPEED_REL_TOL: f64 = 1e-2;
const DRIFT_TOL: f64 = 1e-4;
const FINAL_L2_TOL: f64 = 1e-2;
const AC5_BUDGET: Duration = Duration::from_secs(60);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

fn cubic() -> PotentialSpec {
    PotentialSpec::cubic(1.0, 1.0)
}

fn rel(got: f64, want: f64) -> f64 {
    (got / want - 1.0).abs()
}

fn budget_note(pass: &mut bool, elapsed: Duration, budget: Duration) -> String {
    *pass &= elapsed < budget;
    format!("{:.2} s of {} s", elapsed.as_secs_f64(), budget.as_secs())
}

fn ac1() -> Result<Outcome> {
    let start = Instant::now();
    let wave = find_ground_state(&cubic(), 0.8, 1)?;
    let report = compute_functionals(&wave)?;
    let elapsed = start.elapsed();
    let checks = [
        ("A", wave.profile.shoot_param, ORACLE_AMPLITUDE_SQ.sqrt()),
        ("I0", report.i0, ORACLE_I0),
        ("I1", report.i_k[0], ORACLE_I1),
        ("V0", report.v0, ORACLE_V0),
        ("E0", report.e0, ORACLE_E0),
    ];
    let worst = checks
        .iter()
        .map(|(_, got, want)| rel(*got, *want))
        .fold(0.0, f64::max);
    let mut pass = worst < ORACLE_REL_TOL;
    let time = budget_note(&mut pass, elapsed, AC1_BUDGET);
    Ok(Outcome::new(
        pass,
        format!("max relative error {worst:.2e} (tol {ORACLE_REL_TOL:e}); {time}"),
    ))
}

fn solve_case(n: usize, k: u32, opts: &SolverOptions) -> Result<SolitaryWave> {
    if k == 0 {
        find_ground_state_with(&cubic(), 0.8, n, opts)
    } else {
        find_excited_state_with(&cubic(), 0.8, k, opts)
    }
}

fn ac2() -> Result<Outcome> {
    let start = Instant::now();
    let cases = [(1usize, 0u32), (2, 0), (3, 0), (2, 1), (2, 2)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, k) in cases {
        let residual =
            compute_functionals(&solve_case(n, k, &SolverOptions::default())?)?.pokhozhaev_residual;
        let coarse_opts = SolverOptions {
            step_scale: HALVING_STEP_SCALES.0,
            ..SolverOptions::default()
        };
        let fine_opts = SolverOptions {
            step_scale: HALVING_STEP_SCALES.1,
            ..SolverOptions::default()
        };
        let coarse = compute_functionals(&solve_case(n, k, &coarse_opts)?)?.pokhozhaev_residual;
        let fine = compute_functionals(&solve_case(n, k, &fine_opts)?)?.pokhozhaev_residual;
        let ratio = coarse / fine;
        let at_floor = coarse < RESIDUAL_FLOOR;
        let ok = residual < IDENTITY_TOL && (at_floor || ratio >= HALVING_FACTOR);
        pass &= ok;
        let halving = if at_floor {
            format!("at floor {coarse:.1e}")
        } else {
            format!("halving x{ratio:.1}")
        };
        parts.push(format!("n={n} k={k}: {residual:.1e}, {halving}"));
    }
    let time = budget_note(&mut pass, start.elapsed(), AC2_BUDGET);
    Ok(Outcome::new(pass, format!("{}; {time}", parts.join("; "))))
}

fn ac3() -> Result<Outcome> {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();

    let line = find_ground_state(&cubic(), 0.8, 1)?;
    let velocities: Vec<Vec<f64>> = (1..=9).map(|i| vec![i as f64 / 10.0]).collect();
    let grid = GridSpec::for_wave(&line, &[0.0], 0.0, LINE_SPACING)?;
    let rows = boost_scan(&line, &velocities, &grid)?;
    let worst = rows
        .iter()
        .map(|r| r.rel_err_e.max(r.rel_err_p))
        .fold(0.0, f64::max);
    pass &= worst < SCAN_REL_TOL;
    parts.push(format!("n=1 max rel err {worst:.1e}"));

    for (label, wave) in [
        ("radial", find_ground_state(&cubic(), 0.8, 2)?),
        ("k=1", find_excited_state(&cubic(), 0.8, 1)?),
    ] {
        let e0 = compute_functionals(&wave)?.e0;
        let extent = GridSpec::for_wave(&wave, &[0.0, 0.0], 0.0, PLANE_SPACING)?.extent;
        let grid = GridSpec::with_spacing(extent, PLANE_SPACING)?;
        let rows = boost_scan(&wave, &[vec![0.3, 0.0], vec![0.6, 0.0]], &grid)?;
        let worst = rows
            .iter()
            .map(|r| r.rel_err_e.max(r.rel_err_p))
            .fold(0.0, f64::max);
        let transverse = rows
            .iter()
            .map(|r| r.momentum_measured[1].abs() / e0)
            .fold(0.0, f64::max);
        pass &= worst < SCAN_REL_TOL && transverse < TRANSVERSE_TOL;
        parts.push(format!(
            "n=2 {label} max rel err {worst:.1e}, transverse {transverse:.1e} E0"
        ));
    }
    let time = budget_note(&mut pass, start.elapsed(), AC3_BUDGET);
    Ok(Outcome::new(
        pass,
        format!("{} (tol {SCAN_REL_TOL:e}); {time}", parts.join("; ")),
    ))
}

fn ac4() -> Result<Outcome> {
    let mut pass = true;
    let mut worst_defect = 0.0f64;
    let mut planar = None;
    for (n, k) in [(1usize, 0u32), (2, 0), (3, 0), (2, 1), (2, 2)] {
        let wave = solve_case(n, k, &SolverOptions::default())?;
        let report = compute_functionals(&wave)?;
        let d = report.isotropy_defect.abs() / report.e0;
        worst_defect = worst_defect.max(d);
        pass &= d < ISOTROPY_TOL;
        if n == 2 && k == 0 {
            planar = Some(report);
        }
    }
    let planar = planar.expect("planar radial report");

    // Stretch the radial profile along the boost axis.
    let stretched = planar.stretched(0, STRETCH);
    let n = stretched.n as f64;
    let defect = (n - 1.0) * stretched.i_k[0] - stretched.i_k[1..].iter().sum::<f64>();
    let mut worst_term = 0.0f64;
    for v in [0.3f64, 0.6, 0.9] {
        let velocity = [v, 0.0];
        let gamma = 1.0 / (1.0 - v * v).sqrt();
        let closed = predict_energy_momentum(&stretched, &velocity, PredictionMode::ClosedForm)?;
        let general =
            predict_energy_momentum(&stretched, &velocity, PredictionMode::GeneralFormula)?;
        let term = gamma * 2.0 * v * v / n * defect;
        worst_term = worst_term.max(rel(general.energy - closed.energy, term));
    }
    pass &= worst_term < DEFECT_TERM_TOL && defect.abs() > ISOTROPY_TOL * planar.e0;
    Ok(Outcome::new(
        pass,
        format!(
            "max |defect|/E0 {worst_defect:.1e} (tol {ISOTROPY_TOL:e}); stretched defect {defect:.4}, \
             term mismatch {worst_term:.1e} (tol {DEFECT_TERM_TOL:e})"
        ),
    ))
}

fn ac5() -> Result<Outcome> {
    let start = Instant::now();
    let wave = find_ground_state(&cubic(), 0.8, 1)?;
    let v = [EVOLVE_SPEED];
    let grid = GridSpec::for_wave(&wave, &v, EVOLVE_T, EVOLVE_H)?;
    let initial = sample_boosted(&wave, &v, &grid, 0.0)?;
    let state = evolve(initial, &wave.spec, EVOLVE_T, EVOLVE_DT, 10)?;
    let exact = sample_boosted(&wave, &v, &grid, EVOLVE_T)?;
    let elapsed = start.elapsed();

    let speed = fit_velocity(&state.diagnostics).map_or(f64::NAN, |s| s[0]);
    let speed_err = rel(speed, EVOLVE_SPEED);
    let drift = relative_energy_drift(&state.diagnostics);
    let distance = relative_l2_distance(&state.sample.psi, &exact.psi);
    let modulus = modulus_l2_distance(&state.sample.psi, &exact.psi);
    let mut pass = speed_err < SPEED_REL_TOL && drift < DRIFT_TOL && distance < FINAL_L2_TOL;
    let time = budget_note(&mut pass, elapsed, AC5_BUDGET);
    Ok(Outcome::new(
        pass,
        format!(
            "speed {speed:.5} (rel err {speed_err:.1e}), energy drift {drift:.1e}, \
             final L2 {distance:.1e} (modulus {modulus:.1e}); {time}"
        ),
    ))
}

fn ac6() -> Result<Outcome> {
    let spec = cubic();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [1usize, 2, 3] {
        let conditions = check_conditions(&spec, 0.0, n);
        let incompatible = conditions.s2_s4_incompatible();
        pass &= incompatible;
        match find_ground_state(&spec, 0.0, n) {
            Ok(wave) => {
                let report = compute_functionals(&wave)?;
                let check = check_rest_energy(&wave, &report);
                let flagged = !check.positive_expected && !check.warnings.is_empty();
                pass &= report.e0 <= 0.0 && flagged;
                parts.push(format!(
                    "n={n}: S2^S4 impossible {incompatible}, E0 {:.4} (flagged {flagged})",
                    report.e0
                ));
            }
            Err(err) => parts.push(format!(
                "n={n}: S2^S4 impossible {incompatible}, no wave ({err})"
            )),
        }
    }
    Ok(Outcome::new(
        pass,
        format!("{} (need E0 <= 0)", parts.join("; ")),
    ))
}

type Criterion = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 6] = [
        ("AC-1", ac1),
        ("AC-2", ac2),
        ("AC-3", ac3),
        ("AC-4", ac4),
        ("AC-5", ac5),
        ("AC-6", ac6),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        let outcome =
            criterion().unwrap_or_else(|err| Outcome::new(false, format!("error: {err}")));
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{name} {status}: {}", outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

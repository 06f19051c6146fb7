//! Invariant suite run against a scenario: conservation along the
//! trajectory, tetrad orthonormality, the spinor/tensor equivalence, the
//! field-spinor structure, and the rest-frame relations of the initial
//! state.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dynamics::{integrate, tensor_equivalence_residual, OrthoResiduals, ParticleState, TrajectoryRecord};
use crate::error::Result;
use crate::field::tensor_from_phi;
use crate::rest_frame::{boost_to_rest, null_split, polarization_check, RestFrameState};
use crate::scenario::Scenario;
use crate::spinor::C64;

/// Default residual tolerance, overridable through `SPINDYN_TOL`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Environment variable holding the tolerance override.
pub const TOL_ENV: &str = "SPINDYN_TOL";

/// Reads `SPINDYN_TOL`, falling back to [`DEFAULT_TOL`] when unset.
pub fn tolerance_from_env() -> std::result::Result<f64, String> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(DEFAULT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(format!("{TOL_ENV} must be a positive number, got {s:?}")),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct InvariantReport {
    pub checks: Vec<CheckResult>,
}

impl InvariantReport {
    fn push(&mut self, name: &str, residual: f64, tolerance: f64) {
        debug_assert!(self.get(name).is_none(), "check {name} registered twice");
        // NaN never passes
        let pass = residual.abs() <= tolerance;
        self.checks.push(CheckResult { check: name.to_string(), residual, tolerance, pass });
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let width = self.checks.iter().map(|c| c.check.len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>12}  {:>10}  result", "check", "residual", "tolerance");
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{:<width$}  {:>12.3e}  {:>10.1e}  {verdict}", c.check, c.residual, c.tolerance);
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A deliberate corruption of the trajectory: `eps` is added to `π⁰`
/// halfway through the run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub eps: f64,
}

/// Integrates the scenario, applying `perturb` at the midpoint if given.
pub fn run_trajectory(sc: &Scenario, perturb: Option<Perturbation>) -> Result<TrajectoryRecord> {
    let initial = sc.initial_state()?;
    let k = sc.coupling();
    let Some(Perturbation { eps }) = perturb else {
        return integrate(&initial, &sc.field, k, &sc.integrator, sc.tau_end);
    };
    let mid = 0.5 * sc.tau_end;
    let first = integrate(&initial, &sc.field, k, &sc.integrator, mid)?;
    let m0 = crate::dynamics::mass(&initial);
    let mut kicked: ParticleState = first.last().expect("at least one point").state();
    kicked.pi.c0 += C64::new(eps, 0.0);
    let second = integrate(&kicked, &sc.field, k, &sc.integrator, sc.tau_end)?;
    let mut points = first.points;
    for mut pt in second.points.into_iter().skip(1) {
        pt.mass_residual = (crate::dynamics::mass(&pt.state()) - m0).abs() / m0;
        points.push(pt);
    }
    Ok(TrajectoryRecord { points })
}

/// Runs every check. Trajectory checks take the worst residual over all
/// recorded points; rest-frame checks use the initial state.
pub fn run(sc: &Scenario, tol: f64, perturb: Option<Perturbation>) -> Result<InvariantReport> {
    let record = run_trajectory(sc, perturb)?;
    let initial = sc.initial_state()?;
    let k = sc.coupling();
    let mut report = InvariantReport::default();

    report.push("mass_conservation", record.max_mass_residual(), tol);

    let mut ortho = [0.0_f64; 10];
    for pt in &record.points {
        for (worst, r) in ortho.iter_mut().zip(pt.ortho.0) {
            *worst = worst.max(r.abs());
        }
    }
    for (name, r) in OrthoResiduals::NAMES.iter().zip(ortho) {
        report.push(&format!("ortho[{name}]"), r, tol);
    }

    let mut equiv = 0.0_f64;
    let mut symmetry = 0.0_f64;
    let mut antisym = 0.0_f64;
    for pt in &record.points {
        let st = pt.state();
        equiv = equiv.max(tensor_equivalence_residual(&st, &sc.field, k)?);
        let phi = sc.field.phi_at(&st.x);
        symmetry = symmetry.max(phi.symmetry_residual());
        antisym = antisym.max(tensor_from_phi(&phi).antisymmetry_residual());
    }
    report.push("spinor_tensor_equivalence", equiv, tol);
    report.push("field_spinor_symmetry", symmetry, tol);
    report.push("tensor_antisymmetry", antisym, tol);

    if let Some(em) = sc.field.as_uniform() {
        if em.e.iter().all(|c| *c == 0.0) {
            let e0 = record.points[0].p.t;
            let drift = record.points.iter().fold(0.0_f64, |acc, p| acc.max((p.p.t - e0).abs() / e0));
            report.push("energy_conservation_pure_b", drift, tol);
        }
    }

    let rest = boost_to_rest(&initial)?;
    let m = crate::dynamics::mass(&initial);
    report.push("rest_boost_momentum", crate::dynamics::momentum(&rest).spatial_norm() / m, tol);
    let rf = RestFrameState::from_state(&rest)?;
    report.push("rest_moduli", rf.moduli_residual() / m.sqrt(), tol);
    report.push("rest_phase_relation", rf.phase_residual(), tol);
    report.push("null_split", null_split(&rest)?.residual(), tol);
    report.push("polarization", polarization_check(&rest)?.max(), tol);

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario() -> Scenario {
        Scenario::from_json(
            r#"{
            "particle": { "charge": 1.0, "mass": 1.0 },
            "initial": { "momentum": { "p": [1.25, 0.6, 0.0, 0.45], "spin_axis": [0.3, 0.4, 1.0], "phase": 0.2 } },
            "field": { "kind": "constant", "B": [0, 0, 1] },
            "integrator": { "step": 0.01, "record_every": 5 },
            "tau_end": 2.0
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn clean_run_passes_with_many_checks() {
        let rep = run(&scenario(), DEFAULT_TOL, None).unwrap();
        assert!(rep.checks.len() >= 10);
        assert!(rep.all_pass(), "{}", rep.to_text());
        let mut names: Vec<_> = rep.checks.iter().map(|c| c.check.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), rep.checks.len());
    }

    #[test]
    fn perturbation_breaks_mass_conservation() {
        let rep = run(&scenario(), DEFAULT_TOL, Some(Perturbation { eps: 1e-3 })).unwrap();
        let mass = rep.get("mass_conservation").unwrap();
        assert!(!mass.pass && mass.residual > 1e-5);
        assert!(!rep.all_pass());
    }

    #[test]
    fn json_has_the_four_fields() {
        let rep = run(&scenario(), DEFAULT_TOL, None).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        let first = &v.as_array().unwrap()[0];
        for key in ["check", "residual", "tolerance", "pass"] {
            assert!(first.get(key).is_some());
        }
    }
}

//! Browser bindings for the spinor integrator. Every export takes plain
//! numbers and returns a flat `Float64Array` or a JSON string, so the same
//! functions run natively in tests.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use spindyn::dynamics::{integrate, IntegratorConfig, ParticleState, TrajectoryPoint, TrajectoryRecord};
use spindyn::oracle::fit_precession;
use spindyn::rest_frame::{boost_to_rest, null_split, pauli_form, spin_operator, spinors_from_momentum, RestFrameState};
use spindyn::{EmField, FieldConfig, FourVector, Mat2};

/// Values per sample in [`trajectory`]'s output.
pub const STRIDE: usize = 12;

/// Upper bound on samples returned to the page.
const MAX_SAMPLES: usize = 2000;

fn pair_from_momentum(m: f64, px: f64, py: f64, pz: f64) -> Result<ParticleState, String> {
    if !(m.is_finite() && m > 0.0) {
        return Err(format!("mass must be > 0, got {m}"));
    }
    let e = (m * m + px * px + py * py + pz * pz).sqrt();
    let (pi, eta) = spinors_from_momentum(&FourVector::new(e, px, py, pz), [0.0, 0.0, 1.0], 0.0)
        .map_err(|err| err.to_string())?;
    Ok(ParticleState::new(pi, eta))
}

fn record(q: f64, m: f64, e: [f64; 3], b: [f64; 3], p: [f64; 3], tau_end: f64, step: f64) -> Result<TrajectoryRecord, String> {
    let s0 = pair_from_momentum(m, p[0], p[1], p[2])?;
    if !(step.is_finite() && step > 0.0 && tau_end.is_finite() && tau_end > 0.0) {
        return Err("tau_end and step must be > 0".into());
    }
    let steps = (tau_end / step).ceil().max(1.0) as usize;
    let cfg = IntegratorConfig { step, record_every: steps.div_ceil(MAX_SAMPLES).max(1), ..Default::default() };
    integrate(&s0, &FieldConfig::constant(EmField::new(e, b)), q / m, &cfg, tau_end).map_err(|err| err.to_string())
}

fn run(q: f64, m: f64, e: [f64; 3], b: [f64; 3], p: [f64; 3], tau_end: f64, step: f64) -> Result<Vec<f64>, String> {
    let rec = record(q, m, e, b, p, tau_end, step)?;
    let mut out = Vec::with_capacity(rec.points.len() * STRIDE);
    for pt in &rec.points {
        out.extend([pt.tau, pt.x.x, pt.x.y, pt.x.z, pt.p.t, pt.p.x, pt.p.y, pt.p.z, pt.s.x, pt.s.y, pt.s.z, pt.mass_residual]);
    }
    Ok(out)
}

/// Integrates a particle of charge `q`, mass `m` and initial spatial
/// momentum `p` (spin along +z in its rest frame) through uniform `E`, `B`.
///
/// Returns `STRIDE` numbers per sample:
/// `tau, x, y, z, E, p_x, p_y, p_z, s_x, s_y, s_z, mass_residual`.
/// An empty array means the inputs were rejected.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn trajectory(
    q: f64,
    m: f64,
    ex: f64,
    ey: f64,
    ez: f64,
    bx: f64,
    by: f64,
    bz: f64,
    px: f64,
    py: f64,
    pz: f64,
    tau_end: f64,
    step: f64,
) -> Vec<f64> {
    run(q, m, [ex, ey, ez], [bx, by, bz], [px, py, pz], tau_end, step).unwrap_or_default()
}

/// Why [`trajectory`] would reject these inputs, or an empty string.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn trajectory_error(
    q: f64,
    m: f64,
    ex: f64,
    ey: f64,
    ez: f64,
    bx: f64,
    by: f64,
    bz: f64,
    px: f64,
    py: f64,
    pz: f64,
    tau_end: f64,
    step: f64,
) -> String {
    match record(q, m, [ex, ey, ez], [bx, by, bz], [px, py, pz], tau_end, step) {
        Ok(_) => String::new(),
        Err(e) => e,
    }
}

/// Precession in `B ẑ`: fitted `|ω|` of the transverse parts of p, s, v, w
/// over two cyclotron periods, as JSON.
#[wasm_bindgen]
pub fn precession(q: f64, m: f64, bz: f64, px: f64, py: f64, pz: f64) -> String {
    let result = (|| -> Result<Value, String> {
        if bz == 0.0 || q == 0.0 {
            return Err("q and B must be non-zero".into());
        }
        let omega = q * bz / m;
        let tau_end = 4.0 * std::f64::consts::PI / omega.abs();
        let rec = record(q, m, [0.0; 3], [0.0, 0.0, bz], [px, py, pz], tau_end, tau_end / 4000.0)?;
        let pick: [fn(&TrajectoryPoint) -> FourVector; 4] = [|p| p.p, |p| p.s, |p| p.v, |p| p.w];
        let mut fits = serde_json::Map::new();
        for (name, get) in ["p", "s", "v", "w"].into_iter().zip(pick) {
            let data: Vec<(f64, f64, f64)> = rec.points.iter().map(|pt| (pt.tau, get(pt).x, get(pt).y)).collect();
            let value = match fit_precession(&data) {
                Ok(fit) => json!({ "frequency": fit.frequency.abs(), "clockwise": fit.frequency > 0.0 }),
                Err(_) => Value::Null,
            };
            fits.insert(name.into(), value);
        }
        Ok(json!({ "qB_over_m": omega.abs(), "fits": fits }))
    })();
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn matrix_json(m: &Mat2) -> Value {
    json!([
        [[m.get(0, 0).re, m.get(0, 0).im], [m.get(0, 1).re, m.get(0, 1).im]],
        [[m.get(1, 0).re, m.get(1, 0).im], [m.get(1, 1).re, m.get(1, 1).im]]
    ])
}

/// Rest-frame view of a particle with momentum `p` whose spin points along
/// the axis at polar angle `theta` and azimuth `phi`: null split, phase
/// constraint, Pauli-form matrices and spin-operator eigenvalues, as JSON.
#[wasm_bindgen]
pub fn rest_frame(m: f64, px: f64, py: f64, pz: f64, theta: f64, phi: f64, phase: f64) -> String {
    let result = (|| -> Result<Value, String> {
        if !(m.is_finite() && m > 0.0) {
            return Err(format!("mass must be > 0, got {m}"));
        }
        let e = (m * m + px * px + py * py + pz * pz).sqrt();
        let axis = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let (pi, eta) = spinors_from_momentum(&FourVector::new(e, px, py, pz), axis, phase).map_err(|e| e.to_string())?;
        let rest = boost_to_rest(&ParticleState::new(pi, eta)).map_err(|e| e.to_string())?;
        let rf = RestFrameState::from_state(&rest).map_err(|e| e.to_string())?;
        let split = null_split(&rest).map_err(|e| e.to_string())?;
        let [s, v, w] = pauli_form(&rest, false).map_err(|e| e.to_string())?;
        let canonical = pauli_form(&rest, true).map_err(|e| e.to_string())?;
        let eig: Vec<[f64; 2]> = spin_operator(&rest)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|op| {
                let [lo, hi] = op.eigenvalues();
                [lo.re, hi.re]
            })
            .collect();
        Ok(json!({
            "omega": split.omega,
            "p_pi": split.p_pi.to_array(),
            "p_eta": split.p_eta.to_array(),
            "phase_residual": rf.phase_residual(),
            "moduli_residual": rf.moduli_residual(),
            "pauli": { "s": matrix_json(&s), "v": matrix_json(&v), "w": matrix_json(&w) },
            "pauli_canonical": canonical.iter().map(matrix_json).collect::<Vec<_>>(),
            "spin_eigenvalues": eig,
        }))
    })();
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

//! Spinor equations of motion `dπ^A/dτ = K φ^{AB} π_B`, `dη^A/dτ = K φ^{AB} η_B`,
//! and everything reconstructed from the spinor pair along a trajectory.

use std::f64::consts::SQRT_2;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldConfig, FieldSpinor};
use crate::spinor::{components_of, contract, lower, outer, FourVector, Mat2, Spinor, C64, I};

/// Below this the particle is treated as massless.
pub const MASS_EPS: f64 = 1e-12;

/// Step used by [`evolve_fourvector_check`] for its central difference.
pub const FD_CHECK_STEP: f64 = 1e-3;

/// Header of the trajectory CSV, byte for byte.
pub const CSV_HEADER: &str = "tau,E,px,py,pz,s0,s1,s2,s3,v0,v1,v2,v3,w0,w1,w2,w3,x0,x1,x2,x3,mass_residual,max_ortho_residual";

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ParticleState {
    pub tau: f64,
    pub pi: Spinor,
    pub eta: Spinor,
    /// Worldline position; output only unless the field depends on it.
    pub x: FourVector,
}

impl ParticleState {
    pub fn new(pi: Spinor, eta: Spinor) -> Self {
        ParticleState { tau: 0.0, pi, eta, x: FourVector::default() }
    }

    pub fn is_finite(&self) -> bool {
        self.tau.is_finite() && self.pi.is_finite() && self.eta.is_finite() && self.x.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Rk4,
    Euler,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub step: f64,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "one")]
    pub record_every: usize,
}

fn one() -> usize {
    1
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { step: 1e-3, method: Method::Rk4, record_every: 1 }
    }
}

impl IntegratorConfig {
    pub fn rk4(step: f64) -> Self {
        IntegratorConfig { step, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidConfig(format!("integrator.step must be > 0, got {}", self.step)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("integrator.record_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// `(dπ, dη)` for the given field spinor and coupling `k`.
pub fn spinor_rhs(state: &ParticleState, phi: &FieldSpinor, k: f64) -> (Spinor, Spinor) {
    let rhs = |xi: &Spinor| {
        let low = lower(xi);
        Spinor::new(
            (phi.get(0, 0) * low.c0 + phi.get(0, 1) * low.c1) * k,
            (phi.get(1, 0) * low.c0 + phi.get(1, 1) * low.c1) * k,
        )
    };
    (rhs(&state.pi), rhs(&state.eta))
}

/// `p^{AA'} = π^A π̄^{A'} + η^A η̄^{A'}` as a four-vector.
pub fn momentum(state: &ParticleState) -> FourVector {
    hermitian_sum(&outer(&state.pi, &state.pi), &outer(&state.eta, &state.eta), 1.0)
}

/// `√2 |π^A η_A|`.
pub fn mass(state: &ParticleState) -> f64 {
    SQRT_2 * contract(&state.pi, &state.eta).norm()
}

fn hermitian_sum(a: &Mat2, b: &Mat2, scale: f64) -> FourVector {
    // Hermitian by construction; components_of reads only the Hermitian part
    components_of(&(*a + *b).scale(C64::new(scale, 0.0)))
}

/// Four-velocity used to advance the worldline.
fn velocity(state: &ParticleState) -> FourVector {
    let m = mass(state);
    if m < MASS_EPS {
        FourVector::default()
    } else {
        momentum(state) * (1.0 / m)
    }
}

/// Inner-product residuals of a tetrad, in a fixed order:
/// `s·s+1, v·v+1, w·w+1, s·p/m, s·v, s·w, v·p/m, v·w, w·p/m, p·p/m²-1`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct OrthoResiduals(pub [f64; 10]);

impl OrthoResiduals {
    pub const NAMES: [&'static str; 10] =
        ["s.s+1", "v.v+1", "w.w+1", "s.p", "s.v", "s.w", "v.p", "v.w", "w.p", "p.p/m^2-1"];

    pub fn max(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, r| acc.max(r.abs()))
    }
}

/// The momentum plus the three spacelike unit vectors attached to it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tetrad {
    pub p: FourVector,
    pub s: FourVector,
    pub v: FourVector,
    pub w: FourVector,
}

impl Tetrad {
    pub fn residuals(&self) -> OrthoResiduals {
        let m2 = self.p.minkowski_norm();
        let m = m2.abs().sqrt();
        let (p, s, v, w) = (&self.p, &self.s, &self.v, &self.w);
        OrthoResiduals([
            s.dot(s) + 1.0,
            v.dot(v) + 1.0,
            w.dot(w) + 1.0,
            s.dot(p) / m,
            s.dot(v),
            s.dot(w),
            v.dot(p) / m,
            v.dot(w),
            w.dot(p) / m,
            0.0,
        ])
    }

    /// `c0 p + c1 s + c2 v + c3 w`.
    pub fn combine(&self, coeffs: [f64; 4]) -> FourVector {
        self.p * coeffs[0] + self.s * coeffs[1] + self.v * coeffs[2] + self.w * coeffs[3]
    }

    pub fn vectors(&self) -> [FourVector; 4] {
        [self.p, self.s, self.v, self.w]
    }
}

/// `s = (ππ̄ - ηη̄)/m`, `v = (πη̄ + ηπ̄)/m`, `w = i(πη̄ - ηπ̄)/m`.
pub fn tetrad(state: &ParticleState) -> Result<Tetrad> {
    let m = mass(state);
    if m < MASS_EPS {
        return Err(Error::MasslessState { mass: m });
    }
    let (pi, eta) = (&state.pi, &state.eta);
    let pp = outer(pi, pi);
    let ee = outer(eta, eta);
    let pe = outer(pi, eta);
    let ep = outer(eta, pi);
    let inv = 1.0 / m;
    let p = hermitian_sum(&pp, &ee, 1.0);
    let s = hermitian_sum(&pp, &ee.scale(C64::new(-1.0, 0.0)), inv);
    let v = hermitian_sum(&pe, &ep, inv);
    let w = hermitian_sum(&pe.scale(I), &ep.scale(-I), inv);
    Ok(Tetrad { p, s, v, w })
}

/// Full residual set including the mass shell `p·p = m²`.
pub fn ortho_residuals(state: &ParticleState) -> Result<OrthoResiduals> {
    let t = tetrad(state)?;
    let m = mass(state);
    let mut r = t.residuals();
    r.0[9] = t.p.minkowski_norm() / (m * m) - 1.0;
    Ok(r)
}

struct Deriv {
    dpi: Spinor,
    deta: Spinor,
    dx: FourVector,
}

fn derivative(state: &ParticleState, field: &FieldConfig, k: f64) -> Deriv {
    let phi = field.phi_at(&state.x);
    let (dpi, deta) = spinor_rhs(state, &phi, k);
    Deriv { dpi, deta, dx: velocity(state) }
}

fn offset(state: &ParticleState, d: &Deriv, h: f64) -> ParticleState {
    ParticleState {
        tau: state.tau + h,
        pi: state.pi + d.dpi * h,
        eta: state.eta + d.deta * h,
        x: state.x + d.dx * h,
    }
}

fn signed_step(state: &ParticleState, field: &FieldConfig, k: f64, method: Method, h: f64) -> ParticleState {
    match method {
        Method::Euler => offset(state, &derivative(state, field, k), h),
        Method::Rk4 => {
            let k1 = derivative(state, field, k);
            let k2 = derivative(&offset(state, &k1, 0.5 * h), field, k);
            let k3 = derivative(&offset(state, &k2, 0.5 * h), field, k);
            let k4 = derivative(&offset(state, &k3, h), field, k);
            let h6 = h / 6.0;
            ParticleState {
                tau: state.tau + h,
                pi: state.pi + (k1.dpi + (k2.dpi + k3.dpi) * 2.0 + k4.dpi) * h6,
                eta: state.eta + (k1.deta + (k2.deta + k3.deta) * 2.0 + k4.deta) * h6,
                x: state.x + (k1.dx + (k2.dx + k3.dx) * 2.0 + k4.dx) * h6,
            }
        }
    }
}

/// Advances the state by `cfg.step` in proper time.
pub fn step(state: &ParticleState, field: &FieldConfig, k: f64, cfg: &IntegratorConfig) -> ParticleState {
    signed_step(state, field, k, cfg.method, cfg.step)
}

/// Exact propagator `exp(K M τ)` of the spinor equation for a uniform field.
pub fn propagator(phi: &FieldSpinor, k: f64, tau: f64) -> Mat2 {
    phi.evolution_matrix().scale(C64::new(k * tau, 0.0)).exp()
}

/// Exact step for a uniform field. The worldline is advanced with the
/// midpoint velocity, which is only second order; use it for spinors.
pub fn exact_step(state: &ParticleState, phi: &FieldSpinor, k: f64, h: f64) -> ParticleState {
    let u = propagator(phi, k, h);
    let next = ParticleState {
        tau: state.tau + h,
        pi: u.apply(&state.pi),
        eta: u.apply(&state.eta),
        x: state.x,
    };
    let half = propagator(phi, k, 0.5 * h);
    let mid = ParticleState { pi: half.apply(&state.pi), eta: half.apply(&state.eta), ..*state };
    ParticleState { x: state.x + velocity(&mid) * h, ..next }
}

/// Checks `dJ/dτ = K F J` for `J = c0 p + c1 s + c2 v + c3 w`, with the
/// left side from a central difference of the integrated spinors and the
/// right side from the real field tensor. Returns the largest component
/// mismatch.
pub fn evolve_fourvector_check(
    state: &ParticleState,
    field: &FieldConfig,
    k: f64,
    coeffs: [f64; 4],
) -> Result<f64> {
    let h = FD_CHECK_STEP;
    let fwd = signed_step(state, field, k, Method::Rk4, h);
    let bwd = signed_step(state, field, k, Method::Rk4, -h);
    let j_fwd = tetrad(&fwd)?.combine(coeffs);
    let j_bwd = tetrad(&bwd)?.combine(coeffs);
    let j = tetrad(state)?.combine(coeffs);
    let fd = (j_fwd - j_bwd) * (1.0 / (2.0 * h));
    let predicted = field.tensor_at(&state.x).apply(&j) * k;
    Ok((fd - predicted).max_abs())
}

/// `d/dτ` of `(p, s, v, w)` from the spinor right-hand side by the product
/// rule, holding `m` fixed (the flow conserves it exactly).
pub fn tetrad_derivative(state: &ParticleState, phi: &FieldSpinor, k: f64) -> Result<Tetrad> {
    let m = mass(state);
    if m < MASS_EPS {
        return Err(Error::MasslessState { mass: m });
    }
    let (dpi, deta) = spinor_rhs(state, phi, k);
    let (pi, eta) = (&state.pi, &state.eta);
    let d = |a: &Spinor, da: &Spinor, b: &Spinor, db: &Spinor| outer(da, b) + outer(a, db);
    let dpp = d(pi, &dpi, pi, &dpi);
    let dee = d(eta, &deta, eta, &deta);
    let dpe = d(pi, &dpi, eta, &deta);
    let dep = d(eta, &deta, pi, &dpi);
    let inv = 1.0 / m;
    Ok(Tetrad {
        p: hermitian_sum(&dpp, &dee, 1.0),
        s: hermitian_sum(&dpp, &dee.scale(C64::new(-1.0, 0.0)), inv),
        v: hermitian_sum(&dpe, &dep, inv),
        w: hermitian_sum(&dpe.scale(I), &dep.scale(-I), inv),
    })
}

/// Largest mismatch between [`tetrad_derivative`] and `K F J` over the
/// four tetrad vectors, relative to `|K| max|F| max|J|`.
pub fn tensor_equivalence_residual(state: &ParticleState, field: &FieldConfig, k: f64) -> Result<f64> {
    let phi = field.phi_at(&state.x);
    let f = field.tensor_at(&state.x);
    let dt = tetrad_derivative(state, &phi, k)?;
    let t = tetrad(state)?;
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for (j, dj) in t.vectors().iter().zip(dt.vectors()) {
        worst = worst.max((dj - f.apply(j) * k).max_abs());
        scale = scale.max(j.max_abs());
    }
    let scale = k.abs() * f.max_abs() * scale;
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub tau: f64,
    pub pi: Spinor,
    pub eta: Spinor,
    pub p: FourVector,
    pub s: FourVector,
    pub v: FourVector,
    pub w: FourVector,
    pub x: FourVector,
    /// `|m(τ) - m(0)| / m(0)`.
    pub mass_residual: f64,
    pub ortho: OrthoResiduals,
}

impl TrajectoryPoint {
    pub fn state(&self) -> ParticleState {
        ParticleState { tau: self.tau, pi: self.pi, eta: self.eta, x: self.x }
    }

    pub fn tetrad(&self) -> Tetrad {
        Tetrad { p: self.p, s: self.s, v: self.v, w: self.w }
    }

    pub fn max_ortho_residual(&self) -> f64 {
        self.ortho.max()
    }

    fn observe(state: &ParticleState, m0: f64) -> Result<Self> {
        if !state.is_finite() {
            return Err(Error::InvalidArgument(format!("state diverged at tau = {}", state.tau)));
        }
        let t = tetrad(state)?;
        let ortho = ortho_residuals(state)?;
        Ok(TrajectoryPoint {
            tau: state.tau,
            pi: state.pi,
            eta: state.eta,
            p: t.p,
            s: t.s,
            v: t.v,
            w: t.w,
            x: state.x,
            mass_residual: (mass(state) - m0).abs() / m0,
            ortho,
        })
    }
}

/// Recorded samples of one trajectory, `tau` strictly increasing.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrajectoryRecord {
    pub points: Vec<TrajectoryPoint>,
}

impl TrajectoryRecord {
    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }

    pub fn max_mass_residual(&self) -> f64 {
        self.points.iter().fold(0.0_f64, |acc, p| acc.max(p.mass_residual))
    }

    pub fn max_ortho_residual(&self) -> f64 {
        self.points.iter().fold(0.0_f64, |acc, p| acc.max(p.max_ortho_residual()))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for pt in &self.points {
            let mut cols = vec![pt.tau];
            cols.extend(pt.p.to_array());
            cols.extend(pt.s.to_array());
            cols.extend(pt.v.to_array());
            cols.extend(pt.w.to_array());
            cols.extend(pt.x.to_array());
            cols.push(pt.mass_residual);
            cols.push(pt.max_ortho_residual());
            let line: Vec<String> = cols.iter().map(|c| format!("{c:e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Integrates from `initial.tau` to exactly `tau_end`, taking full steps
/// of `cfg.step` and one shorter final step when the span is not a whole
/// number of steps. Records the initial point, every `record_every`-th
/// step, and the final point.
pub fn integrate(
    initial: &ParticleState,
    field: &FieldConfig,
    k: f64,
    cfg: &IntegratorConfig,
    tau_end: f64,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    field.validate()?;
    if !(tau_end > initial.tau) {
        return Err(Error::InvalidArgument(format!(
            "tau_end ({tau_end}) must exceed the initial proper time ({})",
            initial.tau
        )));
    }
    let m0 = mass(initial);
    if m0 < MASS_EPS {
        return Err(Error::MasslessState { mass: m0 });
    }
    let span = tau_end - initial.tau;
    let h = cfg.step;
    let ratio = span / h;
    let mut full_steps = ratio.round() as usize;
    if (ratio - full_steps as f64).abs() > 1e-9 * ratio.max(1.0) {
        full_steps = ratio.floor() as usize;
    }
    let remainder = span - full_steps as f64 * h;
    let has_partial = remainder > 1e-12 * h;

    let mut record = TrajectoryRecord { points: vec![TrajectoryPoint::observe(initial, m0)?] };
    let mut state = *initial;
    for i in 1..=full_steps {
        state = signed_step(&state, field, k, cfg.method, h);
        state.tau = initial.tau + i as f64 * h;
        let last = i == full_steps && !has_partial;
        if i % cfg.record_every == 0 || last {
            record.points.push(TrajectoryPoint::observe(&state, m0)?);
        }
    }
    if has_partial {
        state = signed_step(&state, field, k, cfg.method, remainder);
        state.tau = tau_end;
        record.points.push(TrajectoryPoint::observe(&state, m0)?);
    } else if let Some(last) = record.points.last_mut() {
        last.tau = tau_end;
    }
    Ok(record)
}

//! Rest-frame structure of a massive spinor pair: the boost to the proper
//! frame, the phase constraint between the four spinor components, the
//! split of `p` into two null flagpoles, and the Pauli-matrix form of the
//! `s, v, w` triad.
//!
//! Rest-frame matrices carry the `1/√2` of the Hermitian map, so the
//! canonical triad comes out as `σ₃/√2`, `σ₁/√2` and `[[0, i], [-i, 0]]/√2`.

use std::f64::consts::{PI, SQRT_2, TAU};

use serde::Serialize;

use crate::dynamics::{mass, momentum, tetrad, ParticleState, MASS_EPS};
use crate::error::{Error, Result};
use crate::spinor::{axis_matrix, flagpole, hermitian_of, FourVector, Mat2, Spinor, C64};

/// `|p⃗| / m` above which a state is not considered at rest.
pub const REST_TOL: f64 = 1e-8;

fn massive(state: &ParticleState) -> Result<f64> {
    let m = mass(state);
    if m < MASS_EPS {
        Err(Error::MasslessState { mass: m })
    } else {
        Ok(m)
    }
}

fn require_rest(state: &ParticleState) -> Result<f64> {
    let m = massive(state)?;
    let residual = momentum(state).spatial_norm() / m;
    if residual > REST_TOL {
        return Err(Error::NotAtRest { residual });
    }
    Ok(m)
}

/// Lorentz-transforms a four-vector by the SL(2,C) element `s`.
pub fn transform_fourvector(s: &Mat2, v: &FourVector) -> FourVector {
    let h = *s * *hermitian_of(v).as_mat() * s.adjoint();
    crate::spinor::components_of(&h)
}

/// The pure boost `cosh(ζ/2) - sinh(ζ/2) n̂·σ̃` that takes `p` to rest.
pub fn rest_boost(p: &FourVector, m: f64) -> Mat2 {
    let pn = p.spatial_norm();
    if pn == 0.0 {
        return Mat2::identity();
    }
    let e = p.t;
    let cosh_half = ((e + m) / (2.0 * m)).sqrt();
    let sinh_half = pn / (2.0 * m * (e + m)).sqrt();
    let n = [p.x / pn, p.y / pn, p.z / pn];
    Mat2::identity().scale(C64::new(cosh_half, 0.0)) - axis_matrix(n).scale(C64::new(sinh_half, 0.0))
}

/// Applies the rotation-free boost to the instantaneous rest frame.
pub fn boost_to_rest(state: &ParticleState) -> Result<ParticleState> {
    let m = massive(state)?;
    let s = rest_boost(&momentum(state), m);
    Ok(ParticleState {
        tau: state.tau,
        pi: s.apply(&state.pi),
        eta: s.apply(&state.eta),
        x: transform_fourvector(&s, &state.x),
    })
}

/// Polar form of a rest-frame spinor pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RestFrameState {
    pub pi: Spinor,
    pub eta: Spinor,
    pub phi0: f64,
    pub phi1: f64,
    pub xi0: f64,
    pub xi1: f64,
    pub mod_pi0: f64,
    pub mod_pi1: f64,
}

impl RestFrameState {
    pub fn from_state(state: &ParticleState) -> Result<Self> {
        require_rest(state)?;
        Ok(RestFrameState {
            pi: state.pi,
            eta: state.eta,
            phi0: state.pi.c0.arg(),
            phi1: state.pi.c1.arg(),
            xi0: state.eta.c0.arg(),
            xi1: state.eta.c1.arg(),
            mod_pi0: state.pi.c0.norm(),
            mod_pi1: state.pi.c1.norm(),
        })
    }

    /// `max(||η⁰| - |π¹||, ||η¹| - |π⁰||)`.
    pub fn moduli_residual(&self) -> f64 {
        (self.eta.c0.norm() - self.mod_pi1)
            .abs()
            .max((self.eta.c1.norm() - self.mod_pi0).abs())
    }

    /// Phase constraint residual, or 0 when `|π⁰ π¹|` vanishes and the
    /// phases carry no constraint.
    pub fn phase_residual(&self) -> f64 {
        let scale = self.mod_pi0.powi(2) + self.mod_pi1.powi(2);
        if self.mod_pi0 * self.mod_pi1 <= 1e-12 * scale {
            0.0
        } else {
            check_phase_relation(self)
        }
    }

    /// `s` rebuilt from the polar components alone:
    /// `s³ = (|π⁰|² - |π¹|²)/(√2 ω)`,
    /// `s¹ + i s² = √2 |π⁰π¹| (e^{i(φ₀-φ₁)} - e^{i(ξ₀-ξ₁)}) / (2ω)`.
    pub fn spin_from_components(&self) -> FourVector {
        let omega = (self.mod_pi0.powi(2) + self.mod_pi1.powi(2)) / SQRT_2;
        let prod = self.mod_pi0 * self.mod_pi1;
        let transverse = (C64::from_polar(1.0, self.phi0 - self.phi1)
            - C64::from_polar(1.0, self.xi0 - self.xi1))
            * (SQRT_2 * prod / (2.0 * omega));
        let z = (self.mod_pi0.powi(2) - self.mod_pi1.powi(2)) / (SQRT_2 * omega);
        FourVector::new(0.0, transverse.re, transverse.im, z)
    }
}

/// Distance of `(φ₁ - ξ₁) - (φ₀ - ξ₀)` from the nearest odd multiple of π,
/// in `[0, π]`.
pub fn check_phase_relation(rf: &RestFrameState) -> f64 {
    let d = (rf.phi1 - rf.xi1) - (rf.phi0 - rf.xi0);
    let r = (d - PI).rem_euclid(TAU);
    r.min(TAU - r).abs()
}

/// The two flagpoles of a rest-frame pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NullSplit {
    pub p_pi: FourVector,
    pub p_eta: FourVector,
    pub omega: f64,
}

impl NullSplit {
    /// Worst of: null residuals, `p⁰ - ω` for both, `|p⃗_π + p⃗_η|`, all over `m`.
    pub fn residual(&self) -> f64 {
        let m = 2.0 * self.omega;
        let sum = self.p_pi + self.p_eta;
        [
            self.p_pi.minkowski_norm() / (m * m),
            self.p_eta.minkowski_norm() / (m * m),
            (self.p_pi.t - self.omega) / m,
            (self.p_eta.t - self.omega) / m,
            sum.spatial_norm() / m,
        ]
        .iter()
        .fold(0.0_f64, |acc, r| acc.max(r.abs()))
    }
}

pub fn null_split(state: &ParticleState) -> Result<NullSplit> {
    let m = require_rest(state)?;
    Ok(NullSplit { p_pi: flagpole(&state.pi), p_eta: flagpole(&state.eta), omega: 0.5 * m })
}

/// Transversality residuals for one flagpole `k`, all scaled by `m`:
/// `k·k`, `k·v`, `k·w`, `v·w`, and the phase constraint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KResiduals {
    pub null: f64,
    pub k_dot_v: f64,
    pub k_dot_w: f64,
    pub v_dot_w: f64,
    pub phase: f64,
}

impl KResiduals {
    pub fn max(&self) -> f64 {
        [self.null, self.k_dot_v, self.k_dot_w, self.v_dot_w, self.phase]
            .iter()
            .fold(0.0_f64, |acc, r| acc.max(r.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolarizationReport {
    pub pi: KResiduals,
    pub eta: KResiduals,
}

impl PolarizationReport {
    pub fn max(&self) -> f64 {
        self.pi.max().max(self.eta.max())
    }
}

/// `v`, `w` as polarisation vectors of each flagpole. A state that is not
/// at rest is reported through [`Error::NotAtRest`] with its `|p⃗|/m`.
pub fn polarization_check(state: &ParticleState) -> Result<PolarizationReport> {
    let m = require_rest(state)?;
    let t = tetrad(state)?;
    let phase = RestFrameState::from_state(state)?.phase_residual();
    let vw = t.v.dot(&t.w);
    let per_k = |k: FourVector| KResiduals {
        null: k.minkowski_norm() / (m * m),
        k_dot_v: k.dot(&t.v) / m,
        k_dot_w: k.dot(&t.w) / m,
        v_dot_w: vw,
        phase,
    };
    Ok(PolarizationReport { pi: per_k(flagpole(&state.pi)), eta: per_k(flagpole(&state.eta)) })
}

/// Rotates a rest-frame pair so that `π = |π|e^{iφ₀}(1, 0)`,
/// `η = |π|e^{iφ₀}(0, 1)`, i.e. `s ∥ ẑ`, `v ∥ x̂`, `w ∥ ŷ`.
pub fn canonical_align(state: &ParticleState) -> Result<ParticleState> {
    require_rest(state)?;
    let pi = state.pi;
    let n = (pi.c0.norm_sqr() + pi.c1.norm_sqr()).sqrt();
    let r = Mat2::new(pi.c0.conj(), pi.c1.conj(), -pi.c1, pi.c0).scale(C64::new(1.0 / n, 0.0));
    let eta = r.apply(&state.eta);
    let alpha = 0.5 * eta.c1.arg();
    let z = Mat2::new(C64::from_polar(1.0, alpha), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::from_polar(1.0, -alpha));
    let u = z * r;
    Ok(ParticleState {
        tau: state.tau,
        pi: u.apply(&pi),
        eta: u.apply(&state.eta),
        x: transform_fourvector(&u, &state.x),
    })
}

/// Hermitian matrices of `s`, `v`, `w` for a rest-frame state, optionally
/// after [`canonical_align`].
pub fn pauli_form(state: &ParticleState, canonical: bool) -> Result<[Mat2; 3]> {
    massive(state)?;
    let st = if canonical { canonical_align(state)? } else { *state };
    let t = tetrad(&st)?;
    Ok([t.s, t.v, t.w].map(|v| hermitian_of(&v).into_mat()))
}

/// `S = ½ (s, v, w)` as matrices.
pub fn spin_operator(state: &ParticleState) -> Result<[Mat2; 3]> {
    Ok(pauli_form(state, false)?.map(|m| m.scale(C64::new(0.5, 0.0))))
}

/// Factors a timelike momentum into a spinor pair whose rest-frame spin
/// vector `s` points along `spin_axis`.
///
/// The rest-frame pair is `a(e^{iψ/2}, 0)`, `a(0, e^{-iψ/2})` with
/// `|a|² = m/√2` and `ψ = phase` (which turns `v` and `w` by `ψ` about the
/// spin axis), rotated so `ẑ → spin_axis`, then boosted along `p⃗`.
pub fn spinors_from_momentum(p: &FourVector, spin_axis: [f64; 3], phase: f64) -> Result<(Spinor, Spinor)> {
    let m2 = p.minkowski_norm();
    if !(p.t > 0.0 && m2 > 0.0 && p.is_finite()) {
        return Err(Error::NotTimelike);
    }
    let m = m2.sqrt();
    let an = (spin_axis.iter().map(|c| c * c).sum::<f64>()).sqrt();
    if !(an > 0.0 && an.is_finite()) {
        return Err(Error::InvalidArgument("spin axis must be a non-zero finite vector".into()));
    }
    let axis = spin_axis.map(|c| c / an);
    let a = (m / SQRT_2).sqrt();
    let pi = Spinor::new(C64::from_polar(a, 0.5 * phase), C64::new(0.0, 0.0));
    let eta = Spinor::new(C64::new(0.0, 0.0), C64::from_polar(a, -0.5 * phase));

    let theta = axis[2].clamp(-1.0, 1.0).acos();
    let azimuth = axis[1].atan2(axis[0]);
    let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let rot = Mat2::new(
        C64::new(c, 0.0),
        -C64::from_polar(s, azimuth),
        C64::from_polar(s, -azimuth),
        C64::new(c, 0.0),
    );
    let boost = {
        let pn = p.spatial_norm();
        if pn == 0.0 {
            Mat2::identity()
        } else {
            let cosh_half = ((p.t + m) / (2.0 * m)).sqrt();
            let sinh_half = pn / (2.0 * m * (p.t + m)).sqrt();
            Mat2::identity().scale(C64::new(cosh_half, 0.0))
                + axis_matrix([p.x / pn, p.y / pn, p.z / pn]).scale(C64::new(sinh_half, 0.0))
        }
    };
    let u = boost * rot;
    Ok((u.apply(&pi), u.apply(&eta)))
}

//! JSON scenario files: particle, initial condition, field, integrator and
//! proper-time span.
//!
//! ```json
//! {
//!   "particle": { "charge": 1.0, "mass": 1.0 },
//!   "initial": { "momentum": { "p": [1.25, 0.6, 0.0, 0.45], "spin_axis": [0, 0, 1], "phase": 0.0 } },
//!   "field": { "kind": "constant", "E": [0, 0, 0], "B": [0, 0, 1] },
//!   "integrator": { "step": 0.001, "method": "rk4", "record_every": 10 },
//!   "tau_end": 10.0
//! }
//! ```
//!
//! Spinor initial conditions are written as
//! `{ "spinors": { "pi": [[re, im], [re, im]], "eta": [[re, im], [re, im]] } }`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{mass, IntegratorConfig, ParticleState, MASS_EPS};
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::rest_frame::spinors_from_momentum;
use crate::spinor::{FourVector, Spinor, C64};

/// Relative tolerance between `particle.mass` and the mass carried by the
/// initial spinors.
pub const MASS_MATCH_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Particle {
    pub charge: f64,
    pub mass: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinorPair {
    pub pi: [[f64; 2]; 2],
    pub eta: [[f64; 2]; 2],
}

impl SpinorPair {
    pub fn from_spinors(pi: &Spinor, eta: &Spinor) -> Self {
        let pair = |s: &Spinor| [[s.c0.re, s.c0.im], [s.c1.re, s.c1.im]];
        SpinorPair { pi: pair(pi), eta: pair(eta) }
    }

    pub fn to_spinors(&self) -> (Spinor, Spinor) {
        let sp = |a: &[[f64; 2]; 2]| Spinor::new(C64::new(a[0][0], a[0][1]), C64::new(a[1][0], a[1][1]));
        (sp(&self.pi), sp(&self.eta))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumInit {
    pub p: [f64; 4],
    pub spin_axis: [f64; 3],
    #[serde(default)]
    pub phase: f64,
}

/// Exactly one of the two styles must be present.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spinors: Option<SpinorPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<MomentumInit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub particle: Particle,
    pub initial: Initial,
    pub field: FieldConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    pub tau_end: f64,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// `K = q/m`.
    pub fn coupling(&self) -> f64 {
        self.particle.charge / self.particle.mass
    }

    /// Static checks; anything needing the physics (massless spinors) is
    /// left to [`Scenario::initial_state`].
    pub fn validate(&self) -> Result<()> {
        let Particle { charge, mass } = self.particle;
        if !(mass.is_finite() && mass > 0.0) {
            return Err(config_err(format!("particle.mass must be > 0, got {mass}")));
        }
        if !charge.is_finite() {
            return Err(config_err(format!("particle.charge must be finite, got {charge}")));
        }
        if !(self.tau_end.is_finite() && self.tau_end > 0.0) {
            return Err(config_err(format!("tau_end must be > 0, got {}", self.tau_end)));
        }
        self.integrator.validate()?;
        self.field.validate()?;
        match (&self.initial.spinors, &self.initial.momentum) {
            (Some(pair), None) => {
                let finite = pair.pi.iter().chain(&pair.eta).flatten().all(|c| c.is_finite());
                if !finite {
                    return Err(config_err("initial.spinors must be finite"));
                }
            }
            (None, Some(mom)) => {
                let p = FourVector::from_array(mom.p);
                if !(p.is_finite() && p.t > 0.0 && p.minkowski_norm() > 0.0) {
                    return Err(config_err("initial.momentum.p must be timelike and future-pointing"));
                }
                let axis = mom.spin_axis;
                if !axis.iter().all(|c| c.is_finite()) || axis.iter().all(|c| *c == 0.0) {
                    return Err(config_err("initial.momentum.spin_axis must be a non-zero finite vector"));
                }
                if !mom.phase.is_finite() {
                    return Err(config_err("initial.momentum.phase must be finite"));
                }
                let m = p.minkowski_norm().sqrt();
                if (m - mass).abs() > MASS_MATCH_TOL * mass {
                    return Err(config_err(format!(
                        "initial.momentum.p has invariant mass {m} but particle.mass is {mass}"
                    )));
                }
            }
            _ => return Err(config_err("initial: exactly one of `spinors` or `momentum` must be given")),
        }
        Ok(())
    }

    /// The initial spinor pair at `τ = 0`, `x = 0`.
    ///
    /// Spinors whose mass is below the massless threshold give
    /// [`Error::MasslessState`]; a massive pair that disagrees with
    /// `particle.mass` is a config error.
    pub fn initial_state(&self) -> Result<ParticleState> {
        let (pi, eta) = match (&self.initial.spinors, &self.initial.momentum) {
            (Some(pair), None) => pair.to_spinors(),
            (None, Some(mom)) => spinors_from_momentum(&FourVector::from_array(mom.p), mom.spin_axis, mom.phase)
                .map_err(|e| config_err(format!("initial.momentum: {e}")))?,
            _ => return Err(config_err("initial: exactly one of `spinors` or `momentum` must be given")),
        };
        let state = ParticleState::new(pi, eta);
        let m = mass(&state);
        if m < MASS_EPS {
            return Err(Error::MasslessState { mass: m });
        }
        let expected = self.particle.mass;
        if (m - expected).abs() > MASS_MATCH_TOL * expected {
            return Err(config_err(format!(
                "initial.spinors carry mass {m} (sqrt2 |pi.eta|) but particle.mass is {expected}"
            )));
        }
        Ok(state)
    }

    /// Copy with a different charge.
    pub fn with_charge(&self, charge: f64) -> Self {
        Scenario { particle: Particle { charge, ..self.particle }, ..self.clone() }
    }
}

//! Relativistic spin dynamics of a charged particle in the two-spinor
//! formalism: a pair of SL(2,C) spinors `π`, `η` carries the momentum and
//! a spin tetrad, and evolves linearly under the electromagnetic field
//! spinor.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod oracle;
pub mod rest_frame;
pub mod scenario;
pub mod spinor;
pub mod verify;

pub use dynamics::{
    integrate, mass, momentum, tetrad, IntegratorConfig, Method, ParticleState, Tetrad, TrajectoryPoint,
    TrajectoryRecord,
};
pub use error::{Error, Result};
pub use field::{EmField, FieldConfig, FieldSpinor, FieldTensor, Potential};
pub use scenario::Scenario;
pub use spinor::{FourVector, HermitianMatrix, Mat2, Spinor, C64};

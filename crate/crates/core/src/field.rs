//! Field spinors `φ^{AB}`, the rank-four spinor `F^{AA'BB'}` and the
//! equivalent real field tensor `F_{αβ}`.
//!
//! The charge-to-mass factor `K` is never folded into `φ`; the dynamics
//! applies it at integration time.
//!
//! Sign note: the field spinor built from `(E, B)` together with the
//! Hermitian map (`√2 H^{01'} = x + iy`) yields the textbook field tensor
//! of the field reflected through the xz-plane: `E_y`, `B_x` and `B_z`
//! change sign, `E_x`, `E_z`, `B_y` do not. Energy is still conserved in a
//! pure magnetic field and `dp_x/dτ = K E_x p⁰` still holds in a pure
//! electric field along x, but transverse momentum in `B ẑ` turns in the
//! positive sense (`p_x + i p_y ∝ e^{+iKBτ}`). [`FieldTensor::from_em`]
//! follows this convention so that the spinor and tensor paths describe
//! the same motion.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spinor::{
    fourvector_of, generator_matrix, hermitian_of, FourVector, Mat2, Sl2cGenerator, C64,
    EPSILON,
};

/// Tolerance above which `tensor_from_bigf` reports the map as non-real.
pub const REALITY_TOL: f64 = 1e-10;

/// Default central-difference step for potentials, natural units.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Minkowski metric diagonal.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Symmetric field spinor `φ^{AB}`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FieldSpinor(pub Mat2);

impl FieldSpinor {
    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.0 .0[a][b]
    }

    pub fn symmetry_residual(&self) -> f64 {
        (self.get(0, 1) - self.get(1, 0)).norm()
    }

    /// The matrix `M` with `dξ/dτ = M ξ` for `K = 1`, i.e. `M^A_C = φ^{AB} ε_{CB}`:
    /// `[[φ^{01}, -φ^{00}], [φ^{11}, -φ^{01}]]`.
    pub fn evolution_matrix(&self) -> Mat2 {
        let mut m = Mat2::zero();
        for a in 0..2 {
            for c in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..2 {
                    acc += self.get(a, b) * EPSILON[c][b];
                }
                m.0[a][c] = acc;
            }
        }
        m
    }
}

/// Electric and magnetic 3-vectors in natural units.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct EmField {
    #[serde(rename = "E")]
    pub e: [f64; 3],
    #[serde(rename = "B")]
    pub b: [f64; 3],
}

impl EmField {
    pub fn new(e: [f64; 3], b: [f64; 3]) -> Self {
        EmField { e, b }
    }

    pub fn magnetic(b: [f64; 3]) -> Self {
        EmField { e: [0.0; 3], b }
    }

    pub fn electric(e: [f64; 3]) -> Self {
        EmField { e, b: [0.0; 3] }
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().chain(self.b.iter()).all(|c| c.is_finite())
    }
}

/// Real field tensor with both indices down, `F_{αβ}`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FieldTensor(pub [[f64; 4]; 4]);

impl FieldTensor {
    /// Builds the tensor directly from E and B in this crate's sign convention,
    /// the one the field spinor produces through the Hermitian map:
    /// `F_{0x} = E_x`, `F_{0y} = -E_y`, `F_{0z} = E_z`, `F_{yz} = B_x`,
    /// `F_{zx} = -B_y`, `F_{xy} = B_z`. This is the textbook tensor of the
    /// field reflected through the xz-plane, so the motion it drives is the
    /// mirror image (in y) of the textbook motion.
    pub fn from_em(f: &EmField) -> Self {
        let [ex, ey, ez] = f.e;
        let [bx, by, bz] = f.b;
        FieldTensor([
            [0.0, ex, -ey, ez],
            [-ex, 0.0, bz, by],
            [ey, -bz, 0.0, bx],
            [-ez, -by, -bx, 0.0],
        ])
    }

    /// Reads E and B back out (inverse of [`FieldTensor::from_em`] on the
    /// antisymmetric part).
    pub fn to_em(&self) -> EmField {
        let f = &self.0;
        let half = |a: f64, b: f64| 0.5 * (a - b);
        EmField {
            e: [half(f[0][1], f[1][0]), -half(f[0][2], f[2][0]), half(f[0][3], f[3][0])],
            b: [half(f[2][3], f[3][2]), -half(f[3][1], f[1][3]), half(f[1][2], f[2][1])],
        }
    }

    /// `F^α_β = g^{αα} F_{αβ}`.
    pub fn mixed(&self) -> [[f64; 4]; 4] {
        let mut m = self.0;
        for (a, row) in m.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v *= METRIC[a];
            }
        }
        m
    }

    /// `J^α ↦ F^α_β J^β`.
    pub fn apply(&self, j: &FourVector) -> FourVector {
        let m = self.mixed();
        let j = j.to_array();
        FourVector::from_array(std::array::from_fn(|a| (0..4).map(|b| m[a][b] * j[b]).sum()))
    }

    /// `max |F_{αβ} + F_{βα}|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let f = &self.0;
        let mut r = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                r = r.max((f[a][b] + f[b][a]).abs());
            }
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// `F^{AA'BB'}`, indexed `[A][A'][B][B']`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FieldSpinor4(pub [[[[C64; 2]; 2]; 2]; 2]);

impl FieldSpinor4 {
    pub fn get(&self, a: usize, ap: usize, b: usize, bp: usize) -> C64 {
        self.0[a][ap][b][bp]
    }

    /// `max |F^{AA'BB'} - conj(F^{A'ABB'}...)|`: the Hermiticity condition
    /// `conj(F^{AA'BB'}) = F^{A'AB'B}` that makes the induced vector map real.
    pub fn reality_residual(&self) -> f64 {
        let mut r = 0.0_f64;
        for a in 0..2 {
            for ap in 0..2 {
                for b in 0..2 {
                    for bp in 0..2 {
                        let d = self.get(a, ap, b, bp).conj() - self.get(ap, a, bp, b);
                        r = r.max(d.norm());
                    }
                }
            }
        }
        r
    }
}

/// `φ^{AB}` from physical E and B.
pub fn phi_from_eb(f: &EmField) -> FieldSpinor {
    let [ex, ey, ez] = f.e;
    let [bx, by, bz] = f.b;
    let p00 = C64::new(-(ex + by), ey - bx) * 0.5;
    let p01 = C64::new(ez, bz) * 0.5;
    let p11 = C64::new(ex - by, ey + bx) * 0.5;
    FieldSpinor(Mat2::new(p00, p01, p01, p11))
}

/// `φ^{AB} = -ε^{AC} (δα·σ)_C^B` with boost field `eps` and rotation field `beta`.
pub fn phi_from_generators(eps: [f64; 3], beta: [f64; 3]) -> FieldSpinor {
    let g = generator_matrix(&Sl2cGenerator { omega: eps, theta: beta });
    let mut phi = Mat2::zero();
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..2 {
                acc -= g.get(c, b) * EPSILON[a][c];
            }
            phi.0[a][b] = acc;
        }
    }
    FieldSpinor(phi)
}

/// `F^{AA'BB'} = ε^{AB} conj(φ)^{A'B'} + ε^{A'B'} φ^{AB}`.
pub fn bigf_from_phi(phi: &FieldSpinor) -> FieldSpinor4 {
    let mut out = FieldSpinor4::default();
    for a in 0..2 {
        for ap in 0..2 {
            for b in 0..2 {
                for bp in 0..2 {
                    out.0[a][ap][b][bp] = phi.get(ap, bp).conj() * EPSILON[a][b]
                        + phi.get(a, b) * EPSILON[ap][bp];
                }
            }
        }
    }
    out
}

/// `k^{AA'} ↦ F^{AA'BB'} k_{BB'}` with `k_{BB'} = k^{CC'} ε_{CB} ε_{C'B'}`.
pub fn apply_bigf(f4: &FieldSpinor4, k: &Mat2) -> Mat2 {
    let mut k_low = Mat2::zero();
    for b in 0..2 {
        for bp in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..2 {
                for cp in 0..2 {
                    acc += k.get(c, cp) * (EPSILON[c][b] * EPSILON[cp][bp]);
                }
            }
            k_low.0[b][bp] = acc;
        }
    }
    let mut out = Mat2::zero();
    for a in 0..2 {
        for ap in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..2 {
                for bp in 0..2 {
                    acc += f4.get(a, ap, b, bp) * k_low.get(b, bp);
                }
            }
            out.0[a][ap] = acc;
        }
    }
    out
}

/// Real tensor equivalent to `F^{AA'BB'}`, found by pushing the four
/// coordinate basis vectors through the spinor map and reading columns.
pub fn tensor_from_bigf(f4: &FieldSpinor4) -> Result<FieldTensor> {
    let mut mixed = [[0.0; 4]; 4];
    for beta in 0..4 {
        let mut e = [0.0; 4];
        e[beta] = 1.0;
        let image = apply_bigf(f4, hermitian_of(&FourVector::from_array(e)).as_mat());
        let col = fourvector_of(&image).map_err(|err| match err {
            Error::NonHermitian { residual } => Error::NonReal { residual },
            other => other,
        })?;
        for (alpha, row) in mixed.iter_mut().enumerate() {
            row[beta] = col[alpha];
        }
    }
    for (alpha, row) in mixed.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v *= METRIC[alpha];
        }
    }
    Ok(FieldTensor(mixed))
}

/// Tensor from `φ` through the rank-four spinor. Infallible for a genuine
/// symmetric `φ`.
pub fn tensor_from_phi(phi: &FieldSpinor) -> FieldTensor {
    tensor_from_bigf(&bigf_from_phi(phi)).expect("F^{AA'BB'} built from φ is always real")
}

/// `A_α(x)`, covariant components, as an arbitrary re-entrant callback.
#[derive(Clone)]
pub struct CustomPotential(pub Arc<dyn Fn(&FourVector) -> [f64; 4] + Send + Sync>);

impl CustomPotential {
    pub fn new(f: impl Fn(&FourVector) -> [f64; 4] + Send + Sync + 'static) -> Self {
        CustomPotential(Arc::new(f))
    }
}

impl fmt::Debug for CustomPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomPotential(..)")
    }
}

impl PartialEq for CustomPotential {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

/// Analytic four-potentials `A_α(x)` (covariant components).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Potential {
    /// Uniform fields: `A_β = ½ F_{αβ} x^α` with `F` from [`FieldTensor::from_em`].
    Uniform {
        #[serde(rename = "E")]
        e: [f64; 3],
        #[serde(rename = "B")]
        b: [f64; 3],
    },
    /// `A_y = b0 x + ½ gradient x²`, i.e. `B_z = b0 + gradient·x`.
    MagneticGradient { b0: f64, gradient: f64 },
    /// Linearly polarised wave travelling along `+z`:
    /// `A_x = amplitude · sin(omega (t - z))`, optionally on top of a
    /// uniform `B_z` background.
    PlaneWave {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        background_bz: f64,
    },
    #[serde(skip)]
    Custom(CustomPotential),
}

impl Potential {
    pub fn eval(&self, x: &FourVector) -> [f64; 4] {
        match self {
            Potential::Uniform { e, b } => {
                // A_β = ½ F_{αβ} x^α
                let f = FieldTensor::from_em(&EmField::new(*e, *b));
                let xs = x.to_array();
                let mut a = [0.0; 4];
                for (beta, slot) in a.iter_mut().enumerate() {
                    *slot = 0.5 * (0..4).map(|alpha| f.0[alpha][beta] * xs[alpha]).sum::<f64>();
                }
                a
            }
            Potential::MagneticGradient { b0, gradient } => {
                [0.0, 0.0, b0 * x.x + 0.5 * gradient * x.x * x.x, 0.0]
            }
            Potential::PlaneWave { amplitude, omega, background_bz } => [
                0.0,
                amplitude * (omega * (x.t - x.z)).sin() - 0.5 * background_bz * x.y,
                0.5 * background_bz * x.x,
                0.0,
            ],
            Potential::Custom(f) => (f.0)(x),
        }
    }
}

/// Field description consumed by the integrators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldConfig {
    Constant {
        #[serde(rename = "E", default)]
        e: [f64; 3],
        #[serde(rename = "B", default)]
        b: [f64; 3],
    },
    Potential {
        potential: Potential,
        #[serde(default = "default_fd_step")]
        h: f64,
    },
}

fn default_fd_step() -> f64 {
    DEFAULT_FD_STEP
}

impl FieldConfig {
    pub fn constant(f: EmField) -> Self {
        FieldConfig::Constant { e: f.e, b: f.b }
    }

    pub fn zero() -> Self {
        FieldConfig::constant(EmField::default())
    }

    pub fn potential(potential: Potential) -> Self {
        FieldConfig::Potential { potential, h: DEFAULT_FD_STEP }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FieldConfig::Constant { e, b } => {
                if !EmField::new(*e, *b).is_finite() {
                    return Err(Error::InvalidConfig("field: E and B must be finite".into()));
                }
            }
            FieldConfig::Potential { h, .. } => {
                if !(h.is_finite() && *h > 0.0) {
                    return Err(Error::InvalidConfig(format!("field.h must be > 0, got {h}")));
                }
            }
        }
        Ok(())
    }

    /// The uniform field, if this config is position independent.
    pub fn as_uniform(&self) -> Option<EmField> {
        match self {
            FieldConfig::Constant { e, b } => Some(EmField::new(*e, *b)),
            FieldConfig::Potential { .. } => None,
        }
    }

    pub fn em_at(&self, x: &FourVector) -> EmField {
        match self {
            FieldConfig::Constant { e, b } => EmField::new(*e, *b),
            FieldConfig::Potential { potential, h } => {
                field_from_potential(potential, *h, x).to_em()
            }
        }
    }

    pub fn phi_at(&self, x: &FourVector) -> FieldSpinor {
        phi_from_eb(&self.em_at(x))
    }

    pub fn tensor_at(&self, x: &FourVector) -> FieldTensor {
        match self {
            FieldConfig::Constant { e, b } => tensor_from_phi(&phi_from_eb(&EmField::new(*e, *b))),
            FieldConfig::Potential { potential, h } => field_from_potential(potential, *h, x),
        }
    }
}

/// `F_{αβ} = ∂_α A_β - ∂_β A_α` by central differences with step `h`.
pub fn field_from_potential(potential: &Potential, h: f64, x: &FourVector) -> FieldTensor {
    // grad[α][β] = ∂_α A_β
    let mut grad = [[0.0; 4]; 4];
    let base = x.to_array();
    for (alpha, row) in grad.iter_mut().enumerate() {
        let mut plus = base;
        let mut minus = base;
        plus[alpha] += h;
        minus[alpha] -= h;
        let ap = potential.eval(&FourVector::from_array(plus));
        let am = potential.eval(&FourVector::from_array(minus));
        for beta in 0..4 {
            row[beta] = (ap[beta] - am[beta]) / (2.0 * h);
        }
    }
    let mut f = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            f[a][b] = grad[a][b] - grad[b][a];
        }
    }
    FieldTensor(f)
}

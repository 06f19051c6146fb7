//! Two-spinor algebra: the epsilon metric, index gymnastics, the
//! Hermitian-matrix form of four-vectors and the SL(2,C) generators.
//!
//! Conventions used everywhere in this crate:
//!
//! * `ε_{01} = ε^{01} = +1`, indices lowered as `ξ_A = ξ^B ε_{BA}`, so
//!   `ξ_0 = -ξ^1` and `ξ_1 = ξ^0`. This is the only sign choice that gives
//!   `dπ^0/dτ = -φ^{00} π^1 + φ^{01} π^0` for the spinor equation of motion.
//! * Four-vectors map to Hermitian matrices with a `1/√2`:
//!   `√2 H^{00'} = t + z`, `√2 H^{11'} = t - z`, `√2 H^{01'} = x + iy`.
//!   With this map `2 det H = t² - x² - y² - z²`.
//! * Metric signature `(+, -, -, -)`.

use std::f64::consts::SQRT_2;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Components of `ε^{AB}` (numerically identical to `ε_{AB}`).
pub const EPSILON: [[f64; 2]; 2] = [[0.0, 1.0], [-1.0, 0.0]];

/// Tolerance above which `fourvector_of` rejects a matrix as non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A contravariant two-spinor `ξ^A`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Spinor {
    pub c0: C64,
    pub c1: C64,
}

/// A covariant two-spinor `ξ_A`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DualSpinor {
    pub c0: C64,
    pub c1: C64,
}

impl Spinor {
    pub const fn new(c0: C64, c1: C64) -> Self {
        Spinor { c0, c1 }
    }

    pub fn from_re(c0: f64, c1: f64) -> Self {
        Spinor::new(C64::new(c0, 0.0), C64::new(c1, 0.0))
    }

    pub fn zero() -> Self {
        Spinor::default()
    }

    pub fn scale(&self, a: C64) -> Self {
        Spinor::new(self.c0 * a, self.c1 * a)
    }

    pub fn conj(&self) -> Self {
        Spinor::new(self.c0.conj(), self.c1.conj())
    }

    /// Largest component modulus.
    pub fn max_abs(&self) -> f64 {
        self.c0.norm().max(self.c1.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.c1.is_finite()
    }

    pub fn components(&self) -> [C64; 2] {
        [self.c0, self.c1]
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, o: Spinor) -> Spinor {
        Spinor::new(self.c0 + o.c0, self.c1 + o.c1)
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, o: Spinor) -> Spinor {
        Spinor::new(self.c0 - o.c0, self.c1 - o.c1)
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor::new(-self.c0, -self.c1)
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, a: f64) -> Spinor {
        Spinor::new(self.c0 * a, self.c1 * a)
    }
}

/// The spin basis `o^A = (0, 1)`, `ι^A = (1, 0)`.
pub struct SpinBasis;

impl SpinBasis {
    pub const O: Spinor = Spinor::new(ZERO, ONE);
    pub const I: Spinor = Spinor::new(ONE, ZERO);
}

pub fn lower(s: &Spinor) -> DualSpinor {
    DualSpinor {
        c0: -s.c1,
        c1: s.c0,
    }
}

pub fn raise(d: &DualSpinor) -> Spinor {
    Spinor::new(d.c1, -d.c0)
}

/// `a^A b_A = a^1 b^0 - a^0 b^1`.
pub fn contract(a: &Spinor, b: &Spinor) -> C64 {
    let b_low = lower(b);
    a.c0 * b_low.c0 + a.c1 * b_low.c1
}

/// A 2×2 complex matrix, row index first.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Mat2([[m00, m01], [m10, m11]])
    }

    pub fn from_re(m: [[f64; 2]; 2]) -> Self {
        Mat2::new(
            C64::new(m[0][0], 0.0),
            C64::new(m[0][1], 0.0),
            C64::new(m[1][0], 0.0),
            C64::new(m[1][1], 0.0),
        )
    }

    pub fn zero() -> Self {
        Mat2::default()
    }

    pub fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn scale(&self, a: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * a, m[0][1] * a, m[1][0] * a, m[1][1] * a)
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, s: &Spinor) -> Spinor {
        let m = &self.0;
        Spinor::new(m[0][0] * s.c0 + m[0][1] * s.c1, m[1][0] * s.c0 + m[1][1] * s.c1)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// `max |H - H†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn commutator(&self, o: &Mat2) -> Mat2 {
        *self * *o - *o * *self
    }

    /// Eigenvalues of the matrix, ordered by real part (ascending).
    pub fn eigenvalues(&self) -> [C64; 2] {
        let half_tr = self.trace() * 0.5;
        let disc = (half_tr * half_tr - self.det()).sqrt();
        let (a, b) = (half_tr - disc, half_tr + disc);
        if a.re <= b.re {
            [a, b]
        } else {
            [b, a]
        }
    }

    /// Closed-form matrix exponential.
    ///
    /// Splits off the trace, then uses `exp(B) = cosh(λ) + sinh(λ)/λ · B`
    /// for the traceless part `B` with `λ² = -det B`.
    pub fn exp(&self) -> Mat2 {
        let mu = self.trace() * 0.5;
        let b = *self - Mat2::identity().scale(mu);
        let lambda_sq = -b.det();
        let (cosh, sinhc) = if lambda_sq.norm() < 1e-6 {
            let l2 = lambda_sq;
            let l4 = l2 * l2;
            let l6 = l4 * l2;
            (
                ONE + l2 / 2.0 + l4 / 24.0 + l6 / 720.0,
                ONE + l2 / 6.0 + l4 / 120.0 + l6 / 5040.0,
            )
        } else {
            let lambda = lambda_sq.sqrt();
            (lambda.cosh(), lambda.sinh() / lambda)
        };
        (Mat2::identity().scale(cosh) + b.scale(sinhc)).scale(mu.exp())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        out
    }
}

/// Real four-vector `(t, x, y, z)` in natural units.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector { t, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        FourVector::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn spatial_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Minkowski inner product with signature `(+,-,-,-)`.
    pub fn dot(&self, o: &FourVector) -> f64 {
        self.t * o.t - self.x * o.x - self.y * o.y - self.z * o.z
    }

    pub fn minkowski_norm(&self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |acc, c| acc.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.t,
            1 => &self.x,
            2 => &self.y,
            3 => &self.z,
            _ => panic!("four-vector index {i} out of range"),
        }
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, a: f64) -> FourVector {
        FourVector::new(self.t * a, self.x * a, self.y * a, self.z * a)
    }
}

/// A 2×2 matrix `H^{AA'}` known to equal its conjugate transpose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianMatrix(Mat2);

impl HermitianMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        let residual = m.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NonHermitian { residual });
        }
        Ok(HermitianMatrix(m))
    }

    pub fn as_mat(&self) -> &Mat2 {
        &self.0
    }

    pub fn into_mat(self) -> Mat2 {
        self.0
    }

    pub fn to_fourvector(&self) -> FourVector {
        components_of(&self.0)
    }
}

pub fn hermitian_of(v: &FourVector) -> HermitianMatrix {
    let r = 1.0 / SQRT_2;
    HermitianMatrix(Mat2::new(
        C64::new((v.t + v.z) * r, 0.0),
        C64::new(v.x * r, v.y * r),
        C64::new(v.x * r, -v.y * r),
        C64::new((v.t - v.z) * r, 0.0),
    ))
}

pub(crate) fn components_of(h: &Mat2) -> FourVector {
    let m = &h.0;
    let r = 1.0 / SQRT_2;
    let plus = m[0][0].re;
    let minus = m[1][1].re;
    // average the two off-diagonal entries so tiny anti-Hermitian noise cancels
    let off = (m[0][1] + m[1][0].conj()) * 0.5;
    FourVector::new((plus + minus) * r, off.re * SQRT_2, off.im * SQRT_2, (plus - minus) * r)
}

/// Inverse of [`hermitian_of`]; rejects matrices more than
/// [`HERMITIAN_TOL`] away from Hermitian.
pub fn fourvector_of(h: &Mat2) -> Result<FourVector> {
    HermitianMatrix::new(*h).map(|h| h.to_fourvector())
}

/// `M^{AA'} = a^A conj(b)^{A'}`.
pub fn outer(a: &Spinor, b: &Spinor) -> Mat2 {
    Mat2::new(
        a.c0 * b.c0.conj(),
        a.c0 * b.c1.conj(),
        a.c1 * b.c0.conj(),
        a.c1 * b.c1.conj(),
    )
}

/// Null flagpole `a^A conj(a)^{A'}` as a four-vector.
pub fn flagpole(a: &Spinor) -> FourVector {
    components_of(&outer(a, a))
}

/// Infinitesimal SL(2,C) parameters per unit `K δτ`: boosts `omega`,
/// rotations `theta`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Sl2cGenerator {
    pub omega: [f64; 3],
    pub theta: [f64; 3],
}

/// `(δα·σ)` with `δα = ½(omega + i theta)`:
/// `[[δα₃, δα₁ + iδα₂], [δα₁ - iδα₂, -δα₃]]`.
pub fn generator_matrix(g: &Sl2cGenerator) -> Mat2 {
    let a: [C64; 3] =
        std::array::from_fn(|k| C64::new(0.5 * g.omega[k], 0.5 * g.theta[k]));
    Mat2::new(a[2], a[0] + I * a[1], a[0] - I * a[1], -a[2])
}

/// `n·σ̃ = [[n_z, n_x + i n_y], [n_x - i n_y, -n_z]]`, the matrix whose
/// conjugation action generates boosts and rotations about `n` in the
/// Hermitian map above.
pub fn axis_matrix(n: [f64; 3]) -> Mat2 {
    Mat2::new(
        C64::new(n[2], 0.0),
        C64::new(n[0], n[1]),
        C64::new(n[0], -n[1]),
        C64::new(-n[2], 0.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lower_examples() {
        let d = lower(&Spinor::from_re(1.0, 0.0));
        assert_eq!((d.c0, d.c1), (c(0.0, 0.0), c(1.0, 0.0)));
        let d = lower(&Spinor::from_re(0.0, 1.0));
        assert_eq!((d.c0, d.c1), (c(-1.0, 0.0), c(0.0, 0.0)));
        let d = lower(&Spinor::new(c(2.0, 1.0), c(3.0, 0.0)));
        assert_eq!((d.c0, d.c1), (c(-3.0, 0.0), c(2.0, 1.0)));
    }

    #[test]
    fn raise_examples() {
        let s = raise(&DualSpinor { c0: ZERO, c1: ONE });
        assert_eq!(s, Spinor::from_re(1.0, 0.0));
        let s = raise(&DualSpinor { c0: -ONE, c1: ZERO });
        assert_eq!(s, Spinor::from_re(0.0, 1.0));
        let s = Spinor::new(c(1.0, 2.0), c(-3.0, 0.0));
        assert_eq!(raise(&lower(&s)), s);
    }

    #[test]
    fn contract_examples() {
        assert_eq!(contract(&SpinBasis::I, &SpinBasis::O), c(-1.0, 0.0));
        let a = Spinor::new(c(2.0, 0.0), c(0.0, 3.0));
        assert_eq!(contract(&a, &a), ZERO);
        // a^1 b^0 - a^0 b^1 = 2*3 - 1*4
        assert_eq!(contract(&Spinor::from_re(1.0, 2.0), &Spinor::from_re(3.0, 4.0)), c(2.0, 0.0));
    }

    #[test]
    fn spin_basis_normalisation() {
        assert!((contract(&SpinBasis::I, &SpinBasis::O).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermitian_examples() {
        let h = hermitian_of(&FourVector::new(SQRT_2, 0.0, 0.0, 0.0));
        assert!((*h.as_mat() - Mat2::identity()).max_abs() < 1e-15);
        let h = hermitian_of(&FourVector::new(0.0, 0.0, 0.0, SQRT_2));
        assert!((*h.as_mat() - Mat2::from_re([[1.0, 0.0], [0.0, -1.0]])).max_abs() < 1e-15);
        let h = hermitian_of(&FourVector::new(1.0, 1.0, 0.0, 0.0));
        let r = 1.0 / SQRT_2;
        assert!((*h.as_mat() - Mat2::from_re([[r, r], [r, r]])).max_abs() < 1e-15);
        assert!(h.as_mat().det().norm() < 1e-15);
    }

    #[test]
    fn fourvector_examples() {
        let v = fourvector_of(&Mat2::identity()).unwrap();
        assert!((v - FourVector::new(SQRT_2, 0.0, 0.0, 0.0)).max_abs() < 1e-15);
        let v = fourvector_of(&Mat2::from_re([[1.0, 0.0], [0.0, 0.0]])).unwrap();
        let r = 1.0 / SQRT_2;
        assert!((v - FourVector::new(r, 0.0, 0.0, r)).max_abs() < 1e-15);
        let v = FourVector::new(5.0, 1.0, 2.0, 3.0);
        let back = fourvector_of(hermitian_of(&v).as_mat()).unwrap();
        assert!((back - v).max_abs() < 1e-14);
    }

    #[test]
    fn fourvector_rejects_non_hermitian() {
        let m = Mat2::new(ONE, ONE, ZERO, ONE);
        assert!(matches!(fourvector_of(&m), Err(Error::NonHermitian { .. })));
        let m = Mat2::new(I, ZERO, ZERO, ONE);
        assert!(matches!(fourvector_of(&m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn outer_examples() {
        let e0 = Spinor::from_re(1.0, 0.0);
        assert_eq!(outer(&e0, &e0), Mat2::from_re([[1.0, 0.0], [0.0, 0.0]]));
        let r = 1.0 / SQRT_2;
        let d = Spinor::from_re(r, r);
        let m = outer(&d, &d);
        assert!((m - Mat2::from_re([[0.5, 0.5], [0.5, 0.5]])).max_abs() < 1e-15);
        assert!(m.det().norm() < 1e-15);
        assert_eq!(
            outer(&e0, &Spinor::from_re(0.0, 1.0)),
            Mat2::from_re([[0.0, 1.0], [0.0, 0.0]])
        );
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generator_matrix(&Sl2cGenerator::default()), Mat2::zero());
        let g = Sl2cGenerator { omega: [0.0, 0.0, 2.0], theta: [0.0; 3] };
        assert_eq!(generator_matrix(&g), Mat2::from_re([[1.0, 0.0], [0.0, -1.0]]));
        let g = Sl2cGenerator { omega: [0.0; 3], theta: [0.0, 0.0, 2.0] };
        assert_eq!(generator_matrix(&g), Mat2::new(I, ZERO, ZERO, -I));
    }

    #[test]
    fn exp_matches_series() {
        let a = Mat2::new(c(0.3, -0.1), c(0.2, 0.5), c(-0.4, 0.1), c(-0.2, 0.7));
        // truncated Taylor series as reference
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for k in 1..40 {
            term = (term * a).scale(c(1.0 / k as f64, 0.0));
            sum += term;
        }
        assert!((a.exp() - sum).max_abs() < 1e-14);
        let tiny = a.scale(c(1e-5, 0.0));
        let mut sum = Mat2::identity();
        let mut term = Mat2::identity();
        for k in 1..10 {
            term = (term * tiny).scale(c(1.0 / k as f64, 0.0));
            sum += term;
        }
        assert!((tiny.exp() - sum).max_abs() < 1e-16);
    }

    #[test]
    fn index_out_of_range_panics() {
        let v = FourVector::default();
        assert!(std::panic::catch_unwind(|| v[4]).is_err());
    }
}

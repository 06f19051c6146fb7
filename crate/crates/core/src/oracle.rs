//! Ground truth for the spinor engine: closed-form motion in a constant
//! magnetic field along `z`, an independent RK4 integrator for the tensor
//! equation `dp_α/dτ = K F_{αβ} p^β`, and a least-squares rotation fit.
//!
//! Nothing here calls into [`crate::dynamics`]' stepping code.

use serde::{Deserialize, Serialize};

use crate::dynamics::{momentum, ParticleState};
use crate::error::{Error, Result};
use crate::field::{FieldTensor, METRIC};
use crate::spinor::{FourVector, Spinor, C64};

/// Charged particle of mass `m` in `B ẑ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantBScenario {
    pub q: f64,
    pub b: f64,
    pub m: f64,
    pub initial: ParticleState,
}

impl ConstantBScenario {
    /// Angular frequency of transverse four-vector rotation in proper time,
    /// `qB/m`. Positive means counter-clockwise about `+z`.
    pub fn omega(&self) -> f64 {
        self.q * self.b / self.m
    }
}

/// Rotates the transverse part of `v` by `angle` about `+z`.
pub fn rotate_transverse(v: &FourVector, angle: f64) -> FourVector {
    let (sin, cos) = angle.sin_cos();
    FourVector::new(v.t, v.x * cos - v.y * sin, v.x * sin + v.y * cos, v.z)
}

/// `π^0 → π^0 e^{iωτ/2}`, `π^1 → π^1 e^{-iωτ/2}` (same for `η`), with the
/// worldline advanced along the matching helix.
///
/// The rotation sense follows from `φ(B ẑ)` and the lowering convention;
/// it is opposite to the `e^{-iqBτ/2}` phase often quoted for this problem.
pub fn spinor_solution(sc: &ConstantBScenario, tau: f64) -> ParticleState {
    let dt = tau - sc.initial.tau;
    let half = 0.5 * sc.omega() * dt;
    let up = C64::from_polar(1.0, half);
    let down = up.conj();
    let evolve = |s: &Spinor| Spinor::new(s.c0 * up, s.c1 * down);
    let p0 = momentum(&sc.initial);
    let m = crate::dynamics::mass(&sc.initial);
    let x = if m > 0.0 {
        let omega = sc.omega();
        let transverse = C64::new(p0.x, p0.y);
        let swept = if omega.abs() * dt.abs() < 1e-12 {
            transverse * dt
        } else {
            transverse * (C64::from_polar(1.0, omega * dt) - 1.0) / C64::new(0.0, omega)
        };
        sc.initial.x + FourVector::new(p0.t * dt, swept.re, swept.im, p0.z * dt) * (1.0 / m)
    } else {
        sc.initial.x
    };
    ParticleState { tau, pi: evolve(&sc.initial.pi), eta: evolve(&sc.initial.eta), x }
}

/// `E`, `p_z` constant; `p_x + i p_y = (p_x + i p_y)(0) e^{iωτ}`.
pub fn momentum_solution(sc: &ConstantBScenario, tau: f64) -> FourVector {
    fourvector_solution(&momentum(&sc.initial), sc.omega(), tau - sc.initial.tau)
}

/// Any tetrad vector evolves the same way as the momentum.
pub fn fourvector_solution(initial: &FourVector, omega: f64, dt: f64) -> FourVector {
    rotate_transverse(initial, omega * dt)
}

fn tensor_rhs(mixed: &[[f64; 4]; 4], k: f64, p: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|a| k * (0..4).map(|b| mixed[a][b] * p[b]).sum::<f64>())
}

/// Classical RK4 on `dp^α/dτ = K g^{αα} F_{αβ} p^β`. Returns `(τ, p)` at
/// `τ = 0, h, 2h, …` and a final sample exactly at `tau_end`.
pub fn tensor_integrate(
    f: &FieldTensor,
    k: f64,
    p0: &FourVector,
    h: f64,
    tau_end: f64,
) -> Result<Vec<(f64, FourVector)>> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be > 0, got {h}")));
    }
    if !(tau_end >= 0.0) {
        return Err(Error::InvalidArgument(format!("tau_end must be >= 0, got {tau_end}")));
    }
    let mut mixed = f.0;
    for (a, row) in mixed.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v *= METRIC[a];
        }
    }
    let rk4 = |p: &[f64; 4], dt: f64| -> [f64; 4] {
        let k1 = tensor_rhs(&mixed, k, p);
        let y2: [f64; 4] = std::array::from_fn(|i| p[i] + 0.5 * dt * k1[i]);
        let k2 = tensor_rhs(&mixed, k, &y2);
        let y3: [f64; 4] = std::array::from_fn(|i| p[i] + 0.5 * dt * k2[i]);
        let k3 = tensor_rhs(&mixed, k, &y3);
        let y4: [f64; 4] = std::array::from_fn(|i| p[i] + dt * k3[i]);
        let k4 = tensor_rhs(&mixed, k, &y4);
        std::array::from_fn(|i| p[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    };

    let ratio = tau_end / h;
    let mut n = ratio.round() as usize;
    if (ratio - n as f64).abs() > 1e-9 * ratio.max(1.0) {
        n = ratio.floor() as usize;
    }
    let mut out = Vec::with_capacity(n + 2);
    let mut p = p0.to_array();
    out.push((0.0, *p0));
    for i in 1..=n {
        p = rk4(&p, h);
        out.push((i as f64 * h, FourVector::from_array(p)));
    }
    let rest = tau_end - n as f64 * h;
    if rest > 1e-12 * h {
        p = rk4(&p, rest);
        out.push((tau_end, FourVector::from_array(p)));
    } else if let Some(last) = out.last_mut() {
        last.0 = tau_end;
    }
    Ok(out)
}

/// Result of fitting `(x, y) = A (cos(ωτ + φ), -sin(ωτ + φ))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecessionFit {
    /// Signed: positive for clockwise rotation seen from `+z`.
    pub frequency: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub rms_residual: f64,
}

/// Least-squares rotation fit. The frequency is seeded from a linear fit
/// to the unwrapped angle and refined by Gauss-Newton on all three
/// parameters. Needs at least four samples per period so the unwrapping
/// is unambiguous.
pub fn fit_precession(samples: &[(f64, f64, f64)]) -> Result<PrecessionFit> {
    if samples.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {}", samples.len())));
    }
    let z: Vec<C64> = samples.iter().map(|&(_, x, y)| C64::new(x, -y)).collect();
    let tau: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let amplitude = z.iter().map(|c| c.norm()).sum::<f64>() / z.len() as f64;
    let spread = z.iter().fold(0.0_f64, |acc, c| acc.max((c - z[0]).norm()));
    if amplitude < 1e-12 || spread <= 1e-14 * amplitude {
        return Err(Error::DegenerateFit { amplitude: if spread <= 1e-14 * amplitude { spread } else { amplitude } });
    }

    // unwrapped angle, then ordinary least squares for (ω, φ)
    let mut theta = Vec::with_capacity(z.len());
    theta.push(z[0].arg());
    for w in z.windows(2) {
        let d = (w[1] / w[0]).arg();
        theta.push(theta.last().unwrap() + d);
    }
    let n = tau.len() as f64;
    let mean_t = tau.iter().sum::<f64>() / n;
    let mean_th = theta.iter().sum::<f64>() / n;
    let cov: f64 = tau.iter().zip(&theta).map(|(t, th)| (t - mean_t) * (th - mean_th)).sum();
    let var: f64 = tau.iter().map(|t| (t - mean_t).powi(2)).sum();
    let mut omega = cov / var;
    let mut phase = mean_th - omega * mean_t;
    let mut amp = amplitude;

    for _ in 0..8 {
        // normal equations for δ(A, ω, φ)
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (zk, &tk) in z.iter().zip(&tau) {
            let e = C64::from_polar(1.0, omega * tk + phase);
            let r = zk - e * amp;
            let cols = [e, C64::new(0.0, amp * tk) * e, C64::new(0.0, amp) * e];
            for i in 0..3 {
                jtr[i] += cols[i].re * r.re + cols[i].im * r.im;
                for j in 0..3 {
                    jtj[i][j] += cols[i].re * cols[j].re + cols[i].im * cols[j].im;
                }
            }
        }
        let Some(delta) = solve3(jtj, jtr) else { break };
        amp += delta[0];
        omega += delta[1];
        phase += delta[2];
        if delta.iter().all(|d| d.abs() < 1e-15) {
            break;
        }
    }
    let sq: f64 = z
        .iter()
        .zip(&tau)
        .map(|(zk, &tk)| (zk - C64::from_polar(amp, omega * tk + phase)).norm_sqr())
        .sum();
    Ok(PrecessionFit {
        frequency: omega,
        amplitude: amp,
        phase: phase.rem_euclid(std::f64::consts::TAU),
        rms_residual: (sq / n).sqrt(),
    })
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&a);
    if d.abs() < 1e-300 || !d.is_finite() {
        return None;
    }
    let mut x = [0.0; 3];
    for (col, xc) in x.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *xc = det(&m) / d;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{phi_from_eb, tensor_from_phi, EmField};
    use std::f64::consts::PI;

    fn scenario() -> ConstantBScenario {
        let initial = ParticleState::new(
            Spinor::new(C64::new(0.8, 0.1), C64::new(0.3, -0.4)),
            Spinor::new(C64::new(-0.2, 0.5), C64::new(0.6, 0.2)),
        );
        ConstantBScenario { q: 1.0, b: 1.0, m: 1.0, initial }
    }

    #[test]
    fn spinor_solution_at_zero_is_initial() {
        let sc = scenario();
        assert_eq!(spinor_solution(&sc, 0.0).pi, sc.initial.pi);
        assert_eq!(spinor_solution(&sc, 0.0).eta, sc.initial.eta);
    }

    #[test]
    fn spinor_period_is_four_pi() {
        let sc = scenario();
        let s = spinor_solution(&sc, 4.0 * PI);
        assert!((s.pi - sc.initial.pi).max_abs() < 1e-14);
        let half = spinor_solution(&sc, 2.0 * PI);
        assert!((half.pi + sc.initial.pi).max_abs() < 1e-14);
    }

    #[test]
    fn spinor_modulus_preserved() {
        let sc = scenario();
        for i in 0..50 {
            let s = spinor_solution(&sc, 0.37 * i as f64);
            assert!((s.pi.c0.norm() - sc.initial.pi.c0.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn momentum_with_no_transverse_part_is_constant() {
        let mut sc = scenario();
        let a = 0.7;
        sc.initial = ParticleState::new(Spinor::from_re(a, 0.0), Spinor::from_re(0.0, 0.3));
        let p0 = momentum(&sc.initial);
        assert!(p0.x.abs() < 1e-15 && p0.y.abs() < 1e-15);
        assert!((momentum_solution(&sc, 3.3) - p0).max_abs() < 1e-15);
    }

    #[test]
    fn quarter_turn_sense() {
        // p_x = 1, p_y = 0 at τ = 0 turns into p_y = +1 at τ = π/2
        let v = fourvector_solution(&FourVector::new(2.0, 1.0, 0.0, 0.0), 1.0, PI / 2.0);
        assert!((v.x).abs() < 1e-15);
        assert!((v.y - 1.0).abs() < 1e-15);
        // and the tensor oracle agrees on the sense
        let f = tensor_from_phi(&phi_from_eb(&EmField::magnetic([0.0, 0.0, 1.0])));
        let traj = tensor_integrate(&f, 1.0, &FourVector::new(2.0, 1.0, 0.0, 0.0), 1e-3, PI / 2.0).unwrap();
        let end = traj.last().unwrap().1;
        assert!((end - v).max_abs() < 1e-10);
    }

    #[test]
    fn momentum_solution_consistent_with_spinor_solution() {
        let sc = scenario();
        for i in 0..100 {
            let tau = 0.1 * i as f64;
            let from_spinors = momentum(&spinor_solution(&sc, tau));
            assert!((from_spinors - momentum_solution(&sc, tau)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn tensor_integrate_zero_field() {
        let p0 = FourVector::new(3.0, 0.1, 0.2, 0.3);
        let traj = tensor_integrate(&FieldTensor::default(), 1.0, &p0, 0.1, 1.0).unwrap();
        assert!(traj.iter().all(|(_, p)| *p == p0));
        assert_eq!(traj.last().unwrap().0, 1.0);
    }

    #[test]
    fn tensor_integrate_pure_b_conserves() {
        let f = tensor_from_phi(&phi_from_eb(&EmField::magnetic([0.2, -0.4, 1.0])));
        let p0 = FourVector::new(2.0, 0.5, -0.3, 0.8);
        let traj = tensor_integrate(&f, 1.0, &p0, 1e-3, 10.0).unwrap();
        for (_, p) in &traj {
            assert!((p.minkowski_norm() - p0.minkowski_norm()).abs() < 1e-10);
            assert!((p.t - p0.t).abs() < 1e-10);
        }
    }

    #[test]
    fn tensor_integrate_pure_e_boosts() {
        let f = tensor_from_phi(&phi_from_eb(&EmField::electric([0.5, 0.0, 0.0])));
        let p0 = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let traj = tensor_integrate(&f, 1.0, &p0, 1e-3, 2.0).unwrap();
        for (tau, p) in &traj {
            assert!((p.minkowski_norm() - 1.0).abs() < 1e-10);
            // hyperbolic rotation with rapidity Eτ
            assert!((p.t - (0.5 * tau).cosh()).abs() < 1e-10);
            assert!((p.x - (0.5 * tau).sinh()).abs() < 1e-10);
        }
    }

    #[test]
    fn tensor_integrate_rejects_bad_step() {
        assert!(tensor_integrate(&FieldTensor::default(), 1.0, &FourVector::default(), 0.0, 1.0).is_err());
    }

    #[test]
    fn fit_recovers_generator() {
        let samples: Vec<_> = (0..200)
            .map(|i| {
                let t = 0.05 * i as f64;
                (t, 0.7 * (t + 0.3).cos(), -0.7 * (t + 0.3).sin())
            })
            .collect();
        let fit = fit_precession(&samples).unwrap();
        assert!((fit.frequency - 1.0).abs() < 1e-10);
        assert!((fit.amplitude - 0.7).abs() < 1e-10);
        assert!((fit.phase - 0.3).abs() < 1e-10);
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn fit_reports_counter_clockwise_as_negative() {
        let samples: Vec<_> = (0..100)
            .map(|i| {
                let t = 0.1 * i as f64;
                (t, (2.0 * t).cos(), (2.0 * t).sin())
            })
            .collect();
        let fit = fit_precession(&samples).unwrap();
        assert!((fit.frequency + 2.0).abs() < 1e-10);
    }

    #[test]
    fn fit_degenerate_inputs() {
        let zeros: Vec<_> = (0..10).map(|i| (i as f64, 0.0, 0.0)).collect();
        assert!(matches!(fit_precession(&zeros), Err(Error::DegenerateFit { .. })));
        let constant: Vec<_> = (0..10).map(|i| (i as f64, 0.4, -0.2)).collect();
        assert!(matches!(fit_precession(&constant), Err(Error::DegenerateFit { .. })));
    }
}

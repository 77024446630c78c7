//! Master equation with the clock-induced dissipator
//!
//! `d rho / dT = -i [H, rho] - sigma(T) [H, [H, rho]]`,
//!
//! a Lindblad equation with the single Lindblad operator `H`. In the energy
//! eigenbasis the populations are constant and each coherence decays at a
//! rate proportional to the square of its Bohr frequency.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::EvolutionConfig;
use crate::accuracy::decoherence_exponent;
use crate::clock::{ClockKind, ClockModel};
use crate::error::{invalid, Error, Result};
use crate::operator::{eigendecompose, ComplexMatrix, DensityMatrix, EnergyDecomposition, HermitianOperator};

/// Largest admissible `h * (|H|^2 sigma + |H|)` for one stepper step.
const MAX_STEP_MEASURE: f64 = 0.1;
/// Trace drift above this before renormalization signals a failed step.
const MAX_TRACE_DRIFT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub state: DensityMatrix,
}

/// Right-hand side of the master equation, `-i[H, rho] - sigma [H, [H, rho]]`.
pub fn lindblad_generator(rho: &ComplexMatrix, h: &HermitianOperator, sigma: f64) -> ComplexMatrix {
    let d = derivative(rho.as_dmatrix(), h.matrix().as_dmatrix(), 1.0, sigma);
    ComplexMatrix::new(d).expect("square")
}

fn derivative(rho: &DMatrix<C64>, h: &DMatrix<C64>, rate: f64, sigma: f64) -> DMatrix<C64> {
    let comm = h * rho - rho * h;
    let double = h * &comm - &comm * h;
    comm * C64::new(0.0, -rate) - double * C64::new(sigma, 0.0)
}

/// Classical fourth-order Runge-Kutta step. `sigma` and `rate` hold the values
/// at the start, midpoint and end of the step.
fn rk4(rho: &DMatrix<C64>, h: &DMatrix<C64>, rate: [f64; 3], sigma: [f64; 3], step: f64) -> DMatrix<C64> {
    let half = C64::new(0.5 * step, 0.0);
    let full = C64::new(step, 0.0);
    let k1 = derivative(rho, h, rate[0], sigma[0]);
    let k2 = derivative(&(rho + &k1 * half), h, rate[1], sigma[1]);
    let k3 = derivative(&(rho + &k2 * half), h, rate[1], sigma[1]);
    let k4 = derivative(&(rho + &k3 * full), h, rate[2], sigma[2]);
    rho + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(step / 6.0, 0.0)
}

fn finish_step(m: DMatrix<C64>, time: f64) -> Result<DensityMatrix> {
    let tr = m.trace();
    if !(tr.re.is_finite()) || (tr - C64::new(1.0, 0.0)).norm() > MAX_TRACE_DRIFT {
        return Err(Error::IntegrationFailure {
            time,
            reason: format!("trace drifted to {tr}"),
        });
    }
    let m = ComplexMatrix::new(m / C64::new(tr.re, 0.0))?;
    DensityMatrix::from_evolved(m).map_err(|e| Error::IntegrationFailure {
        time,
        reason: format!("{e}; try a smaller step"),
    })
}

fn check_step(step: f64, norm: f64, sigma: f64) -> Result<()> {
    let measure = step * (norm * norm * sigma + norm);
    if !(measure < MAX_STEP_MEASURE) {
        return Err(Error::StepTooLarge { step, measure });
    }
    Ok(())
}

/// Advances the master equation by one step of size `step` at constant
/// `sigma`.
pub fn master_step(rho: &DensityMatrix, h: &HermitianOperator, sigma: f64, step: f64) -> Result<DensityMatrix> {
    master_step_with_rate(rho, h, 1.0, sigma, step)
}

/// Variant of [`master_step`] with a clock-rate factor on the commutator,
/// `d rho / dT = -i rate [H, rho] - sigma [H, [H, rho]]`.
///
/// An expansion clock with a drifting first-order coefficient `a(T)` runs
/// at `rate = 1 + da/dT`.
pub fn master_step_with_rate(
    rho: &DensityMatrix,
    h: &HermitianOperator,
    rate: f64,
    sigma: f64,
    step: f64,
) -> Result<DensityMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(invalid("sigma", format!("must be non-negative, got {sigma}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid("step", format!("must be positive, got {step}")));
    }
    if !rate.is_finite() {
        return Err(invalid("rate", "must be finite"));
    }
    let norm = eigendecompose(h)?.spectral_norm() * rate.abs().max(1.0);
    check_step(step, norm, sigma)?;
    let next = rk4(
        rho.matrix().as_dmatrix(),
        h.matrix().as_dmatrix(),
        [rate; 3],
        [sigma; 3],
        step,
    );
    finish_step(next, step)
}

/// `rho_nm(0) exp(-i omega T) exp(-sigma omega^2 T)`, the exact coherence for
/// constant `sigma`.
pub fn analytic_offdiagonal(rho0: C64, omega: f64, sigma: f64, t: f64) -> C64 {
    rho0 * C64::from_polar(1.0, -omega * t) * (-sigma * omega * omega * t).exp()
}

/// Fundamental suppression `exp(-omega^2 T_planck^(4/3) T^(2/3))` of a
/// coherence with Bohr frequency `omega`.
pub fn fundamental_decay_factor(omega: f64, t: f64, t_planck: f64) -> f64 {
    (-decoherence_exponent(omega, t, t_planck)).exp()
}

/// Suppression `exp(-omega^2 int_0^T sigma)` obtained by integrating the
/// clock's width growth rate directly.
///
/// For the fundamental-limit clock with `T_max = T` this carries an extra
/// factor 3/2 in the exponent relative to [`fundamental_decay_factor`].
pub fn integrated_decay_factor(omega: f64, clock: &ClockModel, t: f64) -> Result<f64> {
    Ok((-omega * omega * clock.integrated_sigma(0.0, t)?).exp())
}

fn sample_times(t_final: f64, step: f64) -> Vec<f64> {
    let steps = ((t_final / step) - 1e-9).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..steps).map(|k| k as f64 * step).collect();
    times.push(t_final);
    times
}

/// Integrates the master equation from `T = 0` to `t_final`, returning every
/// step including both endpoints.
///
/// Ideal and expansion clocks are stepped with fourth-order Runge-Kutta, with
/// `sigma(T)` sampled at the stage times. Fundamental-limit clocks are
/// advanced in the energy eigenbasis with the closed-form suppression
/// exponent, which stays well conditioned as `T` approaches `T_max`.
pub fn evolve_master(
    rho0: &DensityMatrix,
    h: &HermitianOperator,
    clock: &ClockModel,
    t_final: f64,
    cfg: &EvolutionConfig,
) -> Result<Vec<TrajectoryPoint>> {
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho0.dim(),
        });
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(invalid("t_final", format!("must be non-negative, got {t_final}")));
    }
    let mut trajectory = vec![TrajectoryPoint {
        time: 0.0,
        state: rho0.clone(),
    }];
    if t_final == 0.0 {
        return Ok(trajectory);
    }
    let times = sample_times(t_final, cfg.step());
    let dec = eigendecompose(h)?;

    match clock.kind() {
        ClockKind::FundamentalLimit { t_planck, t_max } => {
            if t_final >= *t_max {
                return Err(Error::ClockDomain {
                    time: t_final,
                    t_max: *t_max,
                });
            }
            let tilde0 = dec.to_eigenbasis(rho0.matrix()).into_dmatrix();
            for &t in &times[1..] {
                let state = fundamental_state(&dec, &tilde0, t, *t_planck)?;
                trajectory.push(TrajectoryPoint { time: t, state });
            }
        }
        ClockKind::Ideal | ClockKind::Expansion { .. } => {
            let hm = h.matrix().as_dmatrix();
            let norm = dec.spectral_norm();
            let mut rho = rho0.matrix().as_dmatrix().clone();
            for pair in times.windows(2) {
                let (t0, t1) = (pair[0], pair[1]);
                let step = t1 - t0;
                let mid = t0 + 0.5 * step;
                let sigma = [clock.sigma(t0)?, clock.sigma(mid)?, clock.sigma(t1)?];
                let rate = [
                    1.0 + clock.drift_rate(t0),
                    1.0 + clock.drift_rate(mid),
                    1.0 + clock.drift_rate(t1),
                ];
                let stage_norm = norm * rate.iter().fold(1.0_f64, |a, r| a.max(r.abs()));
                let worst = sigma.iter().fold(0.0_f64, |a, &s| a.max(s));
                check_step(step, stage_norm, worst)?;
                let state = finish_step(rk4(&rho, hm, rate, sigma, step), t1)?;
                rho = state.matrix().as_dmatrix().clone();
                trajectory.push(TrajectoryPoint { time: t1, state });
            }
        }
        kind @ ClockKind::Gaussian { .. } => {
            return Err(Error::UnsupportedClockKind {
                operation: "evolve_master",
                kind: kind.name(),
            })
        }
    }
    Ok(trajectory)
}

fn fundamental_state(dec: &EnergyDecomposition, tilde0: &DMatrix<C64>, t: f64, t_planck: f64) -> Result<DensityMatrix> {
    let n = dec.dim();
    let tilde = DMatrix::from_fn(n, n, |i, j| {
        let omega = dec.bohr(i, j);
        tilde0[(i, j)] * C64::from_polar(1.0, -omega * t) * fundamental_decay_factor(omega, t, t_planck)
    });
    let back = dec.from_eigenbasis(&ComplexMatrix::new(tilde)?);
    DensityMatrix::from_evolved(back).map_err(|e| Error::IntegrationFailure {
        time: t,
        reason: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::unitary_evolve;
    use crate::quadrature::TimeGrid;

    fn plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap()
    }

    fn cfg(step: f64) -> EvolutionConfig {
        EvolutionConfig::new(step, TimeGrid::new(0.0, 1.0, 3).unwrap()).unwrap()
    }

    #[test]
    fn zero_sigma_step_is_unitary_to_fifth_order() {
        let h = HermitianOperator::qubit(1.0);
        let step = 0.01;
        let a = master_step(&plus(), &h, 0.0, step).unwrap();
        let b = unitary_evolve(&plus(), &h, step).unwrap();
        let err = (&a.matrix().clone() - b.matrix()).max_abs();
        assert!(err < 1e-11, "{err}");
    }

    #[test]
    fn zero_hamiltonian_is_stationary() {
        let h = HermitianOperator::zero(2);
        let out = master_step(&plus(), &h, 0.4, 0.01).unwrap();
        assert!((&out.matrix().clone() - plus().matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn oversized_step_rejected() {
        let h = HermitianOperator::qubit(10.0);
        assert!(matches!(
            master_step(&plus(), &h, 1.0, 0.01),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(master_step(&plus(), &h, -0.1, 1e-4).is_err());
    }

    #[test]
    fn trajectory_endpoints() {
        let h = HermitianOperator::qubit(1.0);
        let clock = ClockModel::constant_sigma(0.1).unwrap();
        let traj = evolve_master(&plus(), &h, &clock, 0.0105, &cfg(1e-3)).unwrap();
        assert_eq!(traj.first().unwrap().time, 0.0);
        assert_eq!(traj.last().unwrap().time, 0.0105);
        assert_eq!(traj.len(), 12);
    }

    #[test]
    fn diagonal_state_is_stationary() {
        let h = HermitianOperator::qubit(2.0);
        let rho = DensityMatrix::from_diagonal(&[0.25, 0.75]).unwrap();
        let traj = evolve_master(&rho, &h, &ClockModel::ideal(), 1.0, &cfg(1e-2)).unwrap();
        for p in &traj {
            assert!((&p.state.matrix().clone() - rho.matrix()).max_abs() < 1e-15);
        }
    }

    #[test]
    fn fundamental_clock_domain() {
        let clock = ClockModel::fundamental_limit(1e-2, 5.0).unwrap();
        let err = evolve_master(&plus(), &HermitianOperator::qubit(1.0), &clock, 5.0, &cfg(0.1));
        assert!(matches!(err, Err(Error::ClockDomain { .. })));
    }

    #[test]
    fn gaussian_clock_not_supported() {
        let clock = ClockModel::gaussian(1.0).unwrap();
        let err = evolve_master(&plus(), &HermitianOperator::qubit(1.0), &clock, 1.0, &cfg(0.1));
        assert!(matches!(err, Err(Error::UnsupportedClockKind { .. })));
    }

    #[test]
    fn analytic_offdiagonal_limits() {
        let z = C64::new(0.3, -0.2);
        assert_eq!(analytic_offdiagonal(z, 0.0, 0.7, 12.0), z);
        let period = analytic_offdiagonal(z, 1.0, 0.0, 2.0 * std::f64::consts::PI);
        assert!((period - z).norm() < 1e-15);
    }

    #[test]
    fn decay_factor_limits() {
        assert_eq!(fundamental_decay_factor(0.0, 3.0, 1.0), 1.0);
        assert!((fundamental_decay_factor(1.0, 1.0, 1.0) - (-1f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn integrated_route_carries_three_halves() {
        let t = 8.0;
        let clock = ClockModel::fundamental_limit(1e-2, t).unwrap();
        let integrated = integrated_decay_factor(2.0, &clock, t).unwrap();
        let canonical = fundamental_decay_factor(2.0, t, 1e-2);
        assert!((integrated.ln() / canonical.ln() - 1.5).abs() < 1e-12);
    }
}

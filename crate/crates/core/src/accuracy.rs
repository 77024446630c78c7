//! Fundamental limits on clock accuracy and the decoherence they imply.
//!
//! All bounds are order-of-magnitude relations with their hidden constants set
//! to 1. Quantities are in natural units: with `T_planck` chosen as the time
//! unit, masses are inverse times.

use crate::error::{invalid, Result};

/// Clock error of a mass-`M` light clock after time `t`: `sqrt(t / M)`.
pub fn salecker_wigner_error(mass: f64, t: f64) -> f64 {
    (t / mass).sqrt()
}

/// Best achievable accuracy when measuring an interval `T`:
/// `T_planck^(2/3) * T^(1/3)`.
pub fn ng_vandam_limit(t: f64, t_planck: f64) -> f64 {
    t_planck.cbrt().powi(2) * t.cbrt()
}

/// Exponent of the fundamental off-diagonal suppression,
/// `omega^2 * T_planck^(4/3) * T^(2/3)`.
pub fn decoherence_exponent(omega: f64, t: f64, t_planck: f64) -> f64 {
    omega * omega * t_planck.cbrt().powi(4) * t.cbrt().powi(2)
}

/// Time at which the fundamental suppression reaches one half:
/// `(ln 2 / (omega^2 T_planck^(4/3)))^(3/2)`. Infinite for `omega = 0`.
pub fn half_coherence_time(omega: f64, t_planck: f64) -> f64 {
    let rate = omega * omega * t_planck.cbrt().powi(4);
    if rate == 0.0 {
        return f64::INFINITY;
    }
    (std::f64::consts::LN_2 / rate).powf(1.5)
}

/// Physical parameters of a clock used for one experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClockBudget {
    pub t_planck: f64,
    pub mass: f64,
    pub duration: f64,
}

impl ClockBudget {
    pub fn new(t_planck: f64, mass: f64, duration: f64) -> Result<Self> {
        for (name, v) in [("t_planck", t_planck), ("mass", mass), ("duration", duration)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(Self {
            t_planck,
            mass,
            duration,
        })
    }

    pub fn salecker_wigner(&self) -> f64 {
        salecker_wigner_error(self.mass, self.duration)
    }

    pub fn ng_vandam(&self) -> f64 {
        ng_vandam_limit(self.duration, self.t_planck)
    }
}

/// Feasibility summary for observing fundamental decoherence at one Bohr
/// frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentReport {
    pub omega: f64,
    pub duration: f64,
    pub t_planck: f64,
    pub exponent: f64,
    pub decay_factor: f64,
    /// `f64::INFINITY` when `omega = 0`.
    pub half_coherence_time: f64,
    pub clock_uncertainty: f64,
    /// Set when the Bohr frequency vanishes and no decoherence occurs.
    pub no_decoherence: bool,
}

pub fn experiment_report(omega: f64, t: f64, t_planck: f64) -> Result<ExperimentReport> {
    if !omega.is_finite() {
        return Err(invalid("omega", "must be finite"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be non-negative, got {t}")));
    }
    if !(t_planck > 0.0 && t_planck.is_finite()) {
        return Err(invalid("t_planck", format!("must be positive, got {t_planck}")));
    }
    let exponent = decoherence_exponent(omega, t, t_planck);
    Ok(ExperimentReport {
        omega,
        duration: t,
        t_planck,
        exponent,
        decay_factor: (-exponent).exp(),
        half_coherence_time: half_coherence_time(omega, t_planck),
        clock_uncertainty: ng_vandam_limit(t, t_planck),
        no_decoherence: omega == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn salecker_wigner_values() {
        assert_eq!(salecker_wigner_error(1.0, 0.0), 0.0);
        assert_eq!(salecker_wigner_error(1.0, 1.0), 1.0);
        assert_eq!(salecker_wigner_error(4.0, 9.0), 1.5);
    }

    #[test]
    fn ng_vandam_values() {
        assert_eq!(ng_vandam_limit(0.0, 1e-3), 0.0);
        let tp = 0.37;
        assert!((ng_vandam_limit(tp, tp) - tp).abs() < 1e-15);
        assert!((ng_vandam_limit(8.0, 1e-3) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn exponent_values() {
        assert_eq!(decoherence_exponent(0.0, 5.0, 1.0), 0.0);
        assert_eq!(decoherence_exponent(1.0, 1.0, 1.0), 1.0);
    }

    #[test]
    fn report_zero_frequency() {
        let r = experiment_report(0.0, 3.0, 1.0).unwrap();
        assert!(r.no_decoherence);
        assert!(r.half_coherence_time.is_infinite());
        assert_eq!(r.decay_factor, 1.0);
    }

    #[test]
    fn half_time_scaling() {
        let base = half_coherence_time(1.0, 1.0);
        assert!((base - std::f64::consts::LN_2.powf(1.5)).abs() < 1e-15);
        let doubled = half_coherence_time(2.0, 1.0);
        assert!((base / doubled - 8.0).abs() < 1e-12);
    }

    #[test]
    fn budget_rejects_nonpositive() {
        assert!(ClockBudget::new(1.0, 0.0, 1.0).is_err());
        let b = ClockBudget::new(1.0, 4.0, 9.0).unwrap();
        assert_eq!(b.salecker_wigner(), 1.5);
    }
}

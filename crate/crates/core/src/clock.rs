//! Models of the probability density `P_t(T)` that a clock reads `T` when the
//! ideal time is `t`.
//!
//! Densities are normalized over the ideal time `t` at fixed reading `T`,
//! which is what keeps the smeared density matrix at unit trace.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// Real function of the clock reading.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Location of the peak of `P_t(.)` as a function of the ideal time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PeakMap {
    /// `T_max(t) = t`.
    Identity,
    /// `T_max(t) = offset + rate * t`, `rate > 0`.
    Affine { offset: f64, rate: f64 },
}

impl PeakMap {
    pub fn peak(&self, t: f64) -> f64 {
        match *self {
            PeakMap::Identity => t,
            PeakMap::Affine { offset, rate } => offset + rate * t,
        }
    }

    /// Ideal time at which the peak sits at reading `reading`.
    pub fn ideal_time(&self, reading: f64) -> f64 {
        match *self {
            PeakMap::Identity => reading,
            PeakMap::Affine { offset, rate } => (reading - offset) / rate,
        }
    }

    pub fn rate(&self) -> f64 {
        match *self {
            PeakMap::Identity => 1.0,
            PeakMap::Affine { rate, .. } => rate,
        }
    }
}

#[derive(Clone)]
pub enum ClockKind {
    /// Perfect clock, `P_t(T) = delta(T - t)`.
    Ideal,
    /// Normal distribution of readings with standard deviation `width(T)`.
    Gaussian { width: ScalarFn },
    /// Semiclassical expansion `delta + a delta' + b delta''` with `b >= 0`.
    Expansion {
        drift: ScalarFn,
        spread: ScalarFn,
        /// Analytic `db/dT`, if known.
        spread_rate: Option<ScalarFn>,
    },
    /// Width growth at the fundamental accuracy limit,
    /// `sigma(T) = (T_planck / (T_max - T))^(1/3) T_planck`.
    FundamentalLimit { t_planck: f64, t_max: f64 },
}

impl ClockKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClockKind::Ideal => "ideal",
            ClockKind::Gaussian { .. } => "gaussian",
            ClockKind::Expansion { .. } => "expansion",
            ClockKind::FundamentalLimit { .. } => "fundamental-limit",
        }
    }
}

impl fmt::Debug for ClockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClockKind::FundamentalLimit { t_planck, t_max } => f
                .debug_struct("FundamentalLimit")
                .field("t_planck", t_planck)
                .field("t_max", t_max)
                .finish(),
            other => f.write_str(other.name()),
        }
    }
}

/// Value of `P_t(T)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClockDensity {
    /// The density is a Dirac delta at `t = T_max^{-1}(T)`; callers evaluate
    /// at that point instead of integrating.
    Delta,
    Value(f64),
}

#[derive(Clone, Debug)]
pub struct ClockModel {
    kind: ClockKind,
    peak_map: PeakMap,
}

impl ClockModel {
    pub fn ideal() -> Self {
        Self {
            kind: ClockKind::Ideal,
            peak_map: PeakMap::Identity,
        }
    }

    /// Gaussian clock of constant width.
    pub fn gaussian(width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(invalid("width", format!("must be positive, got {width}")));
        }
        Ok(Self::gaussian_with(Arc::new(move |_| width)))
    }

    /// Gaussian clock whose width depends on the reading.
    pub fn gaussian_with(width: ScalarFn) -> Self {
        Self {
            kind: ClockKind::Gaussian { width },
            peak_map: PeakMap::Identity,
        }
    }

    /// Expansion clock with `b(T) = sigma * T`, i.e. constant `sigma`.
    pub fn constant_sigma(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be non-negative, got {sigma}")));
        }
        Ok(Self::expansion(
            Arc::new(|_| 0.0),
            Arc::new(move |t| sigma * t),
            Some(Arc::new(move |_| sigma)),
        ))
    }

    pub fn expansion(drift: ScalarFn, spread: ScalarFn, spread_rate: Option<ScalarFn>) -> Self {
        Self {
            kind: ClockKind::Expansion {
                drift,
                spread,
                spread_rate,
            },
            peak_map: PeakMap::Identity,
        }
    }

    pub fn fundamental_limit(t_planck: f64, t_max: f64) -> Result<Self> {
        if !(t_planck > 0.0 && t_planck.is_finite()) {
            return Err(invalid("t_planck", format!("must be positive, got {t_planck}")));
        }
        if !t_max.is_finite() {
            return Err(invalid("t_max", "must be finite"));
        }
        Ok(Self {
            kind: ClockKind::FundamentalLimit { t_planck, t_max },
            peak_map: PeakMap::Identity,
        })
    }

    pub fn with_peak_map(mut self, peak_map: PeakMap) -> Result<Self> {
        if let PeakMap::Affine { offset, rate } = peak_map {
            if !(rate > 0.0 && rate.is_finite() && offset.is_finite()) {
                return Err(invalid(
                    "peak_map",
                    format!("must be strictly increasing, got rate {rate}"),
                ));
            }
        }
        self.peak_map = peak_map;
        Ok(self)
    }

    pub fn kind(&self) -> &ClockKind {
        &self.kind
    }

    pub fn peak_map(&self) -> PeakMap {
        self.peak_map
    }

    /// `P_t(T)`.
    pub fn pdf(&self, reading: f64, t: f64) -> Result<ClockDensity> {
        match &self.kind {
            ClockKind::Ideal => Ok(ClockDensity::Delta),
            ClockKind::Gaussian { width } => {
                let w = width(reading);
                if w == 0.0 {
                    return Ok(ClockDensity::Delta);
                }
                if !(w > 0.0 && w.is_finite()) {
                    return Err(invalid("width", format!("w({reading}) = {w}")));
                }
                let u = (self.peak_map.peak(t) - reading) / w;
                // Jacobian of the peak map keeps the t-integral at 1.
                let jac = self.peak_map.rate();
                Ok(ClockDensity::Value(
                    jac * (-0.5 * u * u).exp() / ((2.0 * PI).sqrt() * w),
                ))
            }
            kind => Err(Error::UnsupportedClockKind {
                operation: "pdf",
                kind: kind.name(),
            }),
        }
    }

    /// Width growth rate `sigma(T)`, the coefficient of the double commutator
    /// in the master equation.
    pub fn sigma(&self, reading: f64) -> Result<f64> {
        let sigma = match &self.kind {
            ClockKind::Ideal => 0.0,
            ClockKind::Expansion {
                spread, spread_rate, ..
            } => {
                if spread(reading) < 0.0 {
                    return Err(invalid(
                        "spread",
                        format!("b({reading}) is negative; the expansion needs b >= 0"),
                    ));
                }
                match spread_rate {
                    Some(rate) => rate(reading),
                    None => {
                        let h = 1e-6 * reading.abs().max(1.0);
                        (spread(reading + h) - spread(reading - h)) / (2.0 * h)
                    }
                }
            }
            ClockKind::FundamentalLimit { t_planck, t_max } => {
                if reading >= *t_max {
                    return Err(Error::ClockDomain {
                        time: reading,
                        t_max: *t_max,
                    });
                }
                (t_planck / (t_max - reading)).cbrt() * t_planck
            }
            kind @ ClockKind::Gaussian { .. } => {
                return Err(Error::UnsupportedClockKind {
                    operation: "sigma",
                    kind: kind.name(),
                })
            }
        };
        if !(sigma >= 0.0) {
            return Err(invalid(
                "sigma",
                format!("width growth rate at T = {reading} is {sigma}, must be non-negative"),
            ));
        }
        Ok(sigma)
    }

    /// `integral_{from}^{to} sigma(T) dT`, in closed form.
    pub fn integrated_sigma(&self, from: f64, to: f64) -> Result<f64> {
        if !(from <= to) {
            return Err(invalid("interval", format!("need from <= to, got [{from}, {to}]")));
        }
        match &self.kind {
            ClockKind::Ideal => Ok(0.0),
            ClockKind::Expansion { spread, .. } => Ok(spread(to) - spread(from)),
            ClockKind::FundamentalLimit { t_planck, t_max } => {
                if to > *t_max {
                    return Err(Error::ClockDomain {
                        time: to,
                        t_max: *t_max,
                    });
                }
                let rest = |x: f64| (t_max - x).cbrt().powi(2);
                Ok(t_planck.cbrt().powi(4) * 1.5 * (rest(from) - rest(to)))
            }
            kind @ ClockKind::Gaussian { .. } => Err(Error::UnsupportedClockKind {
                operation: "integrated_sigma",
                kind: kind.name(),
            }),
        }
    }

    /// `da/dT` of the first-order expansion coefficient; zero for every other
    /// kind.
    pub(crate) fn drift_rate(&self, reading: f64) -> f64 {
        match &self.kind {
            ClockKind::Expansion { drift, .. } => {
                let h = 1e-6 * reading.abs().max(1.0);
                (drift(reading + h) - drift(reading - h)) / (2.0 * h)
            }
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(d: ClockDensity) -> f64 {
        match d {
            ClockDensity::Value(v) => v,
            ClockDensity::Delta => panic!("delta"),
        }
    }

    #[test]
    fn gaussian_peak_and_tail() {
        let clock = ClockModel::gaussian(1.0).unwrap();
        let peak = value(clock.pdf(0.0, 0.0).unwrap());
        assert!((peak - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        let tail = value(clock.pdf(0.0, 3.0).unwrap());
        assert!((tail - (-4.5f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-17);
    }

    #[test]
    fn ideal_is_delta() {
        assert_eq!(ClockModel::ideal().pdf(1.0, 2.0).unwrap(), ClockDensity::Delta);
    }

    #[test]
    fn pdf_unsupported_kinds() {
        let clock = ClockModel::fundamental_limit(1.0, 2.0).unwrap();
        assert!(matches!(clock.pdf(0.0, 0.0), Err(Error::UnsupportedClockKind { .. })));
        let clock = ClockModel::constant_sigma(0.1).unwrap();
        assert!(clock.pdf(0.0, 0.0).is_err());
    }

    #[test]
    fn fundamental_sigma_unit_case() {
        let clock = ClockModel::fundamental_limit(1.0, 2.0).unwrap();
        assert!((clock.sigma(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(clock.sigma(2.0), Err(Error::ClockDomain { .. })));
        assert!(clock.sigma(3.0).is_err());
    }

    #[test]
    fn expansion_sigma_linear_spread() {
        let clock = ClockModel::expansion(Arc::new(|_| 0.0), Arc::new(|t| 0.1 * t), None);
        for t in [0.0_f64, 1.0, 17.5, -3.0] {
            assert!((clock.sigma(t.max(0.0)).unwrap() - 0.1).abs() < 1e-9);
        }
        assert!((clock.integrated_sigma(0.0, 5.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_interval_integrates_to_zero() {
        let f = ClockModel::fundamental_limit(1.0, 1.0).unwrap();
        assert_eq!(f.integrated_sigma(0.3, 0.3).unwrap(), 0.0);
        let e = ClockModel::constant_sigma(0.4).unwrap();
        assert_eq!(e.integrated_sigma(2.0, 2.0).unwrap(), 0.0);
        assert!(f.integrated_sigma(0.5, 0.2).is_err());
    }

    #[test]
    fn fundamental_integral_to_singularity() {
        let f = ClockModel::fundamental_limit(1.0, 1.0).unwrap();
        assert!((f.integrated_sigma(0.0, 1.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn negative_spread_rejected() {
        let clock = ClockModel::expansion(Arc::new(|_| 0.0), Arc::new(|t| -t), None);
        assert!(clock.sigma(1.0).is_err());
    }

    #[test]
    fn peak_map_must_increase() {
        let g = ClockModel::gaussian(1.0).unwrap();
        assert!(g
            .clone()
            .with_peak_map(PeakMap::Affine {
                offset: 0.0,
                rate: -1.0
            })
            .is_err());
        let shifted = g.with_peak_map(PeakMap::Affine { offset: 1.0, rate: 2.0 }).unwrap();
        assert_eq!(shifted.peak_map().ideal_time(5.0), 2.0);
    }
}

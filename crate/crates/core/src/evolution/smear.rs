use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::EvolutionConfig;
use crate::clock::{ClockDensity, ClockKind, ClockModel};
use crate::error::{Error, Result};
use crate::operator::{eigendecompose, unitary_evolve, ComplexMatrix, DensityMatrix, HermitianOperator};
use crate::quadrature::simpson_with_estimate;

/// State at clock reading `reading`: the unitary trajectory averaged with the
/// clock density, `rho(T) = int dt U(t) rho U(t)^dagger P_t(T)`.
///
/// The integral runs over the configured time grid. The density is divided by
/// its grid integral, so a grid that cuts off more than `quad_tol` of the
/// clock distribution is rejected rather than silently renormalized.
pub fn smear_density(
    rho: &DensityMatrix,
    h: &HermitianOperator,
    clock: &ClockModel,
    reading: f64,
    cfg: &EvolutionConfig,
) -> Result<DensityMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    match clock.kind() {
        ClockKind::Ideal => unitary_evolve(rho, h, clock.peak_map().ideal_time(reading)),
        ClockKind::Gaussian { .. } => {
            let grid = cfg.grid();
            let times: Vec<f64> = grid.points().collect();
            let mut density = Vec::with_capacity(times.len());
            for &t in &times {
                match clock.pdf(reading, t)? {
                    ClockDensity::Value(v) => density.push(v),
                    ClockDensity::Delta => return unitary_evolve(rho, h, clock.peak_map().ideal_time(reading)),
                }
            }
            let dt = grid.spacing();
            let tol = cfg.quad_tol();
            let (mass, mass_err) = simpson_with_estimate(&density, dt);
            if (mass - 1.0).abs() > tol {
                return Err(Error::InsufficientGrid(format!(
                    "clock density integrates to {mass} over [{}, {}]",
                    grid.t_min(),
                    grid.t_max()
                )));
            }
            if mass_err > tol {
                return Err(Error::InsufficientGrid(format!(
                    "spacing {dt} too coarse for the clock density (error estimate {mass_err:e})"
                )));
            }

            let dec = eigendecompose(h)?;
            let n = dec.dim();
            let mut tilde: DMatrix<C64> = dec.to_eigenbasis(rho.matrix()).into_dmatrix();
            let mut re = vec![0.0; times.len()];
            let mut im = vec![0.0; times.len()];
            for i in 0..n {
                for j in (i + 1)..n {
                    let omega = dec.bohr(i, j);
                    for (k, &t) in times.iter().enumerate() {
                        let (s, c) = (omega * t).sin_cos();
                        re[k] = density[k] * c;
                        im[k] = -density[k] * s;
                    }
                    let (cre, ere) = simpson_with_estimate(&re, dt);
                    let (cim, eim) = simpson_with_estimate(&im, dt);
                    if ere.max(eim) > tol {
                        return Err(Error::InsufficientGrid(format!(
                            "spacing {dt} does not resolve Bohr frequency {omega}"
                        )));
                    }
                    let chi = C64::new(cre, cim) / mass;
                    tilde[(i, j)] *= chi;
                    tilde[(j, i)] = tilde[(i, j)].conj();
                }
            }
            let back = dec.from_eigenbasis(&ComplexMatrix::new(tilde)?);
            DensityMatrix::from_evolved(back)
        }
        kind => Err(Error::UnsupportedClockKind {
            operation: "smear_density",
            kind: kind.name(),
        }),
    }
}

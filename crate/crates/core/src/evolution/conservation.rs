use super::{evolve_master, EvolutionConfig};
use crate::clock::ClockModel;
use crate::error::{Error, Result};
use crate::operator::{DensityMatrix, HermitianOperator};

/// Largest commutator norm `|[C, H]|` accepted for a conserved observable.
const COMMUTATOR_TOL: f64 = 1e-10;
/// Spread of `Tr(C rho)` below which the observable counts as conserved.
const CONSERVATION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ConservationReport {
    /// `(T, Tr(C rho(T)))` along the trajectory.
    pub samples: Vec<(f64, f64)>,
    /// Max minus min of the expectation.
    pub max_fluctuation: f64,
    pub conserved: bool,
}

/// Tracks `Tr(C rho(T))` for an observable commuting with `H` along a master
/// equation trajectory.
pub fn despagnat_conservation(
    c: &HermitianOperator,
    h: &HermitianOperator,
    rho0: &DensityMatrix,
    clock: &ClockModel,
    t_final: f64,
    cfg: &EvolutionConfig,
) -> Result<ConservationReport> {
    let norm = c.commutator_norm(h)?;
    if norm > COMMUTATOR_TOL {
        return Err(Error::NonCommuting { norm });
    }
    let trajectory = evolve_master(rho0, h, clock, t_final, cfg)?;
    let samples = trajectory
        .iter()
        .map(|p| Ok((p.time, c.expectation(&p.state)?)))
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| {
            (lo.min(v), hi.max(v))
        });
    let max_fluctuation = hi - lo;
    Ok(ConservationReport {
        samples,
        max_fluctuation,
        conserved: max_fluctuation <= CONSERVATION_TOL,
    })
}

//! Relational conditional probabilities: the probability that an observable
//! lies in an interval given that a clock reads a value in another interval,
//! with both events integrated over the unobservable ideal time.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::EvolutionConfig;
use crate::clock::{ClockDensity, ClockModel};
use crate::error::{invalid, Error, Result};
use crate::operator::{
    build_projector, eigendecompose, unitary_evolve, ComplexMatrix, DensityMatrix, EnergyDecomposition,
    HermitianOperator, Projector,
};
use crate::quadrature::{simpson_with_estimate, TimeGrid};

/// Grid doublings attempted before the ideal-time limit is declared
/// non-convergent.
const MAX_DOUBLINGS: usize = 4;
/// Ranks of `rho_cl` below this weight are dropped.
const MIXTURE_CUTOFF: f64 = 1e-14;

/// `Tr(P rho) / Tr(rho)`.
pub fn ordinary_probability(rho: &impl AsRef<ComplexMatrix>, projector: &Projector) -> Result<f64> {
    let rho = rho.as_ref();
    if rho.dim() != projector.dim() {
        return Err(Error::DimensionMismatch {
            expected: projector.dim(),
            found: rho.dim(),
        });
    }
    let tr = rho.trace().re;
    if !(tr.abs() > f64::EPSILON) {
        return Err(Error::DegenerateState);
    }
    Ok((projector.matrix() * rho).trace().re / tr)
}

/// What a clock contributes to the conditional probability at ideal time `t`.
pub trait ClockReadout {
    /// Probability (or probability density) that the clock reads inside the
    /// query window at ideal time `t`.
    fn reading_weight(&self, t: f64) -> Result<f64>;

    /// Expected clock reading at ideal time `t`, used to check that the clock
    /// never reads the same value twice. `None` skips the check.
    fn mean_reading(&self, t: f64) -> Option<f64>;
}

/// A clock given by its reading distribution `P_t(T)` at a fixed reading.
#[derive(Clone, Debug)]
pub struct ModelClock<'a> {
    pub clock: &'a ClockModel,
    pub reading: f64,
}

impl ClockReadout for ModelClock<'_> {
    fn reading_weight(&self, t: f64) -> Result<f64> {
        match self.clock.pdf(self.reading, t)? {
            ClockDensity::Value(v) => Ok(v),
            ClockDensity::Delta => Err(invalid("clock", "a delta-distributed clock has no pointwise weight")),
        }
    }

    fn mean_reading(&self, t: f64) -> Option<f64> {
        Some(self.clock.peak_map().peak(t))
    }
}

/// A clock that is itself a quantum system, read by projecting its evolved
/// state onto an eigen-window of a clock observable.
#[derive(Clone, Debug)]
pub struct QuantumClock {
    energies: Vec<f64>,
    /// Pure components of `rho_cl` in the energy basis, with their weights.
    components: Vec<(f64, DVector<C64>)>,
    /// Range of the window projector in the energy basis, adjointed.
    window: DMatrix<C64>,
    /// Clock observable in the energy basis.
    observable: DMatrix<C64>,
}

impl QuantumClock {
    pub fn new(
        rho: &DensityMatrix,
        h: &HermitianOperator,
        observable: &HermitianOperator,
        window: &Projector,
    ) -> Result<Self> {
        let dim = h.dim();
        for found in [rho.dim(), observable.dim(), window.dim()] {
            if found != dim {
                return Err(Error::DimensionMismatch { expected: dim, found });
            }
        }
        let dec = eigendecompose(h)?;
        let mix = eigendecompose(&HermitianOperator::new(rho.matrix().clone())?)?;
        let vectors = dec.coordinates(mix.eigenvectors().as_dmatrix());
        let components = mix
            .eigenvalues()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > MIXTURE_CUTOFF)
            .map(|(k, &p)| (p, vectors.column(k).into_owned()))
            .collect();
        Ok(Self {
            energies: dec.eigenvalues().to_vec(),
            components,
            window: dec.coordinates(window.range_basis()).adjoint(),
            observable: dec.to_eigenbasis(observable.matrix()).into_dmatrix(),
        })
    }

    fn evolved(&self, state: &DVector<C64>, t: f64) -> DVector<C64> {
        DVector::from_iterator(
            state.len(),
            state
                .iter()
                .zip(&self.energies)
                .map(|(c, &e)| c * C64::from_polar(1.0, -e * t)),
        )
    }
}

impl ClockReadout for QuantumClock {
    fn reading_weight(&self, t: f64) -> Result<f64> {
        Ok(self
            .components
            .iter()
            .map(|(p, state)| p * (&self.window * self.evolved(state, t)).norm_squared())
            .sum())
    }

    fn mean_reading(&self, t: f64) -> Option<f64> {
        Some(
            self.components
                .iter()
                .map(|(p, state)| {
                    let c = self.evolved(state, t);
                    p * c.dotc(&(&self.observable * &c)).re
                })
                .sum(),
        )
    }
}

/// Observable window, clock observable and reading window of a conditional
/// probability.
#[derive(Clone, Debug)]
pub struct ConditionalQuery {
    pub observable: HermitianOperator,
    pub o_center: f64,
    pub o_halfwidth: f64,
    pub clock_operator: HermitianOperator,
    pub t_center: f64,
    pub t_halfwidth: f64,
}

impl ConditionalQuery {
    pub fn new(
        observable: HermitianOperator,
        o_center: f64,
        o_halfwidth: f64,
        clock_operator: HermitianOperator,
        t_center: f64,
        t_halfwidth: f64,
    ) -> Result<Self> {
        for (name, value) in [("o_halfwidth", o_halfwidth), ("t_halfwidth", t_halfwidth)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {value}")));
            }
        }
        Ok(Self {
            observable,
            o_center,
            o_halfwidth,
            clock_operator,
            t_center,
            t_halfwidth,
        })
    }

    /// The reading window must be narrow compared with the time span of
    /// interest.
    pub fn check_against(&self, grid: &TimeGrid) -> Result<()> {
        let limit = 0.01 * grid.span();
        if !(self.t_halfwidth < limit) {
            return Err(invalid(
                "t_halfwidth",
                format!(
                    "{} is not small against the grid span (limit {limit})",
                    self.t_halfwidth
                ),
            ));
        }
        Ok(())
    }
}

/// `Tr(P_O U(t) rho U(t)^dagger)` evaluated in the energy basis.
struct SystemReadout {
    dec: EnergyDecomposition,
    /// `P~_mn rho~_nm`, the weight of each Bohr phase.
    weights: DMatrix<C64>,
    trace: f64,
}

impl SystemReadout {
    fn new(rho: &DensityMatrix, h: &HermitianOperator, projector: &Projector) -> Result<Self> {
        for found in [rho.dim(), projector.dim()] {
            if found != h.dim() {
                return Err(Error::DimensionMismatch {
                    expected: h.dim(),
                    found,
                });
            }
        }
        let dec = eigendecompose(h)?;
        let p = dec.to_eigenbasis(projector.matrix()).into_dmatrix();
        let r = dec.to_eigenbasis(rho.matrix()).into_dmatrix();
        let weights = p.transpose().component_mul(&r);
        Ok(Self {
            dec,
            weights,
            trace: rho.matrix().trace().re,
        })
    }

    fn probability(&self, t: f64) -> f64 {
        let n = self.dec.dim();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                sum += (self.weights[(i, j)] * C64::from_polar(1.0, -self.dec.bohr(i, j) * t)).re;
            }
        }
        sum
    }
}

struct GridResult {
    numerator: f64,
    denominator: f64,
}

fn integrate_on(
    clock: &impl ClockReadout,
    system: &SystemReadout,
    grid: &TimeGrid,
    quad_tol: f64,
) -> Result<GridResult> {
    let mut num = Vec::with_capacity(grid.n_points());
    let mut den = Vec::with_capacity(grid.n_points());
    let mut direction = 0.0_f64;
    let mut previous: Option<f64> = None;
    for t in grid.points() {
        if let Some(mean) = clock.mean_reading(t) {
            if let Some(prev) = previous {
                let step = mean - prev;
                if step == 0.0 || step * direction < 0.0 {
                    return Err(Error::ClockFolding { time: t });
                }
                direction = step.signum();
            }
            previous = Some(mean);
        }
        let w = clock.reading_weight(t)?;
        num.push(w * system.probability(t));
        den.push(w * system.trace);
    }
    let h = grid.spacing();
    let (numerator, num_err) = simpson_with_estimate(&num, h);
    let (denominator, den_err) = simpson_with_estimate(&den, h);
    if denominator > 0.0 && num_err.max(den_err) > quad_tol * denominator {
        return Err(Error::InsufficientGrid(format!(
            "spacing {h} does not resolve the conditional-probability integrands"
        )));
    }
    Ok(GridResult { numerator, denominator })
}

/// Conditional probability for an arbitrary clock readout. The ideal-time
/// integrals start on the configured grid, which is doubled in span until the
/// ratio changes by less than `quad_tol`.
pub fn conditional_probability_with(
    clock: &impl ClockReadout,
    rho_sys: &DensityMatrix,
    h_sys: &HermitianOperator,
    p_o: &Projector,
    cfg: &EvolutionConfig,
) -> Result<f64> {
    let system = SystemReadout::new(rho_sys, h_sys, p_o)?;
    let tol = cfg.quad_tol();
    let mut grid = *cfg.grid();
    let mut previous: Option<f64> = None;
    let mut change = f64::INFINITY;
    for _ in 0..=MAX_DOUBLINGS {
        let r = integrate_on(clock, &system, &grid, tol)?;
        let current = (r.denominator > 0.0).then(|| r.numerator / r.denominator);
        if let (Some(prev), Some(cur)) = (previous, current) {
            change = (cur - prev).abs() / cur.abs().max(1.0);
            if change < tol {
                if !(-tol..=1.0 + tol).contains(&cur) {
                    return Err(Error::IntegrationFailure {
                        time: grid.t_max(),
                        reason: format!("conditional probability {cur} outside [0, 1]"),
                    });
                }
                return Ok(cur);
            }
        }
        previous = current;
        grid = grid.enlarged();
    }
    match previous {
        None => Err(Error::ClockNeverReads),
        Some(_) => Err(Error::GridConvergence { change }),
    }
}

/// Conditional probability with a model clock, `P(O | T)`. An ideal clock
/// reduces to the ordinary probability at the corresponding ideal time.
pub fn conditional_probability_model(
    rho_sys: &DensityMatrix,
    h_sys: &HermitianOperator,
    p_o: &Projector,
    clock: &ClockModel,
    reading: f64,
    cfg: &EvolutionConfig,
) -> Result<f64> {
    if let ClockDensity::Delta = clock.pdf(reading, cfg.grid().t_min())? {
        let rho = unitary_evolve(rho_sys, h_sys, clock.peak_map().ideal_time(reading))?;
        return ordinary_probability(&rho, p_o);
    }
    conditional_probability_with(&ModelClock { clock, reading }, rho_sys, h_sys, p_o, cfg)
}

/// Conditional probability for a quantum clock and a system prepared in the
/// product state `rho_cl (x) rho_sys`.
pub fn conditional_probability(
    rho_cl: &DensityMatrix,
    rho_sys: &DensityMatrix,
    h_cl: &HermitianOperator,
    h_sys: &HermitianOperator,
    query: &ConditionalQuery,
    cfg: &EvolutionConfig,
) -> Result<f64> {
    query.check_against(cfg.grid())?;
    let p_o = build_projector(&query.observable, query.o_center, query.o_halfwidth)?;
    let p_t = build_projector(&query.clock_operator, query.t_center, query.t_halfwidth)?;
    let clock = QuantumClock::new(rho_cl, h_cl, &query.clock_operator, &p_t)?;
    conditional_probability_with(&clock, rho_sys, h_sys, &p_o, cfg)
}

//! Density-matrix evolution in the time read by a real clock.
//!
//! Two routes lead to the state at clock reading `T`: smearing the unitary
//! trajectory over the clock's reading distribution, and integrating the
//! master equation whose dissipator is the double commutator with `H`. The
//! conditional-probability formalism ties both back to measurable
//! probabilities.

mod conditional;
mod conservation;
mod free_particle;
mod master;
mod smear;

pub use conditional::{
    conditional_probability, conditional_probability_model, conditional_probability_with, ordinary_probability,
    ClockReadout, ConditionalQuery, ModelClock, QuantumClock,
};
pub use conservation::{despagnat_conservation, ConservationReport};
pub use free_particle::FreeParticleClock;
pub use master::{
    analytic_offdiagonal, evolve_master, fundamental_decay_factor, integrated_decay_factor, lindblad_generator,
    master_step, master_step_with_rate, TrajectoryPoint,
};
pub use smear::smear_density;

use crate::error::{invalid, Result};
use crate::quadrature::TimeGrid;

/// Order of the explicit stepper used for the master equation.
pub const STEPPER_ORDER: usize = 4;

pub const DEFAULT_QUAD_TOL: f64 = 1e-8;

/// Numerical settings shared by the evolution operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionConfig {
    step: f64,
    grid: TimeGrid,
    quad_tol: f64,
}

impl EvolutionConfig {
    pub fn new(step: f64, grid: TimeGrid) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(invalid("step", format!("must be positive, got {step}")));
        }
        Ok(Self {
            step,
            grid,
            quad_tol: DEFAULT_QUAD_TOL,
        })
    }

    pub fn with_quad_tol(mut self, quad_tol: f64) -> Result<Self> {
        if !(quad_tol > 0.0 && quad_tol.is_finite()) {
            return Err(invalid("quad_tol", format!("must be positive, got {quad_tol}")));
        }
        self.quad_tol = quad_tol;
        Ok(self)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }
}

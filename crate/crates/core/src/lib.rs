//! Quantum evolution measured by real, imperfect clocks.
//!
//! A clock whose reading fluctuates turns ordinary unitary evolution into a
//! Lindblad-type evolution that slowly destroys coherence between energy
//! eigenstates. This crate provides the operator types, clock models, the
//! smeared and master-equation evolutions, the relational conditional
//! probability, fundamental clock-accuracy bounds and Zurek's spin-bath
//! measurement model.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accuracy;
pub mod clock;
pub mod error;
pub mod evolution;
pub mod operator;
pub mod quadrature;
pub mod zurek;

pub use error::{Error, Result};
pub use num_complex::Complex64;

//! Reference computations for the test suites, written independently of the
//! library under test: arbitrary-precision fixed-point arithmetic, quadrature
//! rules, a matrix exponential and a root finder.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bigfixed;
pub mod expm;
pub mod quad;

pub use bigfixed::BigFixed;
pub use expm::{expm, CMatrix};
pub use quad::{adaptive_simpson, bisect, tanh_sinh};

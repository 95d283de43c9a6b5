//! Numerical workbench for the two-term linear functional-composition equation
//!
//! ```text
//! f(x) = phi(x) * f(phi1(x)) + (1 - phi(x)) * f(phi2(x)),   x in [0, 1],
//! ```
//!
//! solved in the class of Lipschitz functions with f(0) = 0 and f(1) = 1.
//!
//! The crate provides:
//!
//! * [`grid`] - piecewise-linear functions on a uniform grid, Lipschitz norms,
//!   and the sup / L2 / Lipschitz distances between them;
//! * [`equation`] - the equation right-hand side as an operator on grid
//!   functions, plus contraction certificates derived from the coefficient
//!   norms;
//! * [`solver`] - Picard iteration toward the fixed point with per-step
//!   convergence diagnostics and exponential-rate fitting;
//! * [`approx`] - a closed-form suboptimal quadratic approximation for the
//!   two-parameter linear-coefficient family, its residue analysis, and a
//!   numerically optimal quadratic for comparison;
//! * [`exact`] - a coefficient family with the known solution `x^m`, used as
//!   ground truth for error measurement;
//! * [`oracle`] - a seeded Monte-Carlo estimator of the fixed point via the
//!   absorbing chain `x -> phi1(x)` with probability `phi(x)`, else
//!   `x -> phi2(x)`;
//! * [`expr`] - a small arithmetic expression language for defining custom
//!   coefficient functions from text.
//!
//! The crate is `no_std`-compatible (allocation required): disable the default
//! `std` feature and enable `libm` to route the transcendental math through
//! [`libm`].

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` and friends deliberately treat NaN as a failed check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(any(feature = "std", test))]
extern crate std;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("funeq-core needs either the `std` feature or the `libm` feature for f64 math");

pub mod approx;
pub mod equation;
pub mod exact;
pub mod expr;
pub mod grid;
mod math;
pub mod oracle;
pub mod solver;

pub use equation::{AnalyticNorms, BoundaryChecks, ContractionReport, EquationError, EquationSpec, FamilyTag, NormSource, NormValue};
pub use expr::{EvalError, ExprAst, ParseError};
pub use grid::{distance, GridFunction, GridError, Metric, DEFAULT_GRID};
pub use solver::{fit_exponential, residual, solve, solve_with_clock, ConvergenceHistory, ExpFit, FitError, SolveError, SolveOptions, StopReason};

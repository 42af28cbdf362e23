//! Model-order reduction for feedback control via dynamic programming.
//!
//! A semi-discretized PDE control system is projected onto a low-dimensional
//! basis (POD, adjoint POD, balanced truncation or the Riccati basis), the
//! reduced Hamilton-Jacobi-Bellman equation is solved by semi-Lagrangian value
//! iteration, and the resulting feedback is applied to the full system.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod experiments;
pub mod hjb;
pub mod io;
pub mod linalg;
pub mod models;
pub mod reduction;

pub use experiments::{Benchmark, ComparisonReport, ExperimentError, ScenarioConfig};
pub use hjb::{ControlSet, HjbError, HjbOptions, HjbSolution, ValueGrid};
pub use linalg::{DenseMatrix, DenseVector, LinalgError};
pub use models::{ControlSystem, Interval, ModelError, Trajectory};
pub use reduction::{Method, ReducedBasis, ReducedSystem, ReductionError};

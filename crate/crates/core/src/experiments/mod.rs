//! Benchmark scenarios, reference LQR solutions and report generation.

mod bases;
mod config;
mod lqr;
mod report;
mod tables;

use thiserror::Error;

use crate::hjb::HjbError;
use crate::io::IoError;
use crate::linalg::LinalgError;
use crate::models::ModelError;
use crate::reduction::ReductionError;

pub use bases::BasisFactory;
pub use config::{Benchmark, ConfigError, InitialCondition, ScenarioConfig};
pub use lqr::{quadrature_cost, run_lqr_reference, LqrReference};
pub use report::{
    emit_basis, emit_control_trace, emit_output_trace, emit_report, emit_state_snapshots,
    emit_value_slice, write_series,
};
pub use tables::{
    mean_relative_error, run_table1, run_table2, sample_states, solve_cell, table2_name, Cell,
    ComparisonReport, MetricKind, ReportRow, SolvedCell,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error(transparent)]
    Reduction(#[from] ReductionError),

    #[error(transparent)]
    Hjb(#[from] HjbError),

    #[error(transparent)]
    Io(#[from] IoError),
}

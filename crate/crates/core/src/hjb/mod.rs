//! Semi-Lagrangian value iteration for the reduced HJB equation.

mod controls;
mod export;
mod feedback;
mod grid;
mod solver;

use thiserror::Error;

use crate::io::IoError;
use crate::models::ModelError;

pub use controls::ControlSet;
pub use export::{read_value_grid, write_value_grid};
pub use feedback::{closed_loop, evaluate_value, feedback_control, feedback_from_reduced};
pub use grid::{ValueGrid, MAX_DIM};
pub use solver::{
    default_nodes, value_iteration, HjbOptions, HjbSolution, SemiLagrangian, DIVERGENCE_BOUND,
};

#[derive(Debug, Error)]
pub enum HjbError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid control set: {0}")]
    InvalidControls(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value iteration diverged at iteration {iteration}: sup |V| = {sup:.3e}")]
    Diverged { iteration: usize, sup: f64 },

    #[error("malformed value grid file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] IoError),

    #[error(transparent)]
    Model(#[from] ModelError),
}

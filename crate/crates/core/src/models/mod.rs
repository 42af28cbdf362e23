//! Semi-discretized benchmark PDEs and their time integration.

mod fd;
mod simulate;
mod system;

use thiserror::Error;

use crate::linalg::LinalgError;

pub use fd::{build_advection_diffusion, build_burgers, indicator, interior_grid, UpwindTransport};
pub use simulate::{simulate, simulate_adjoint, simulate_feedback, Trajectory, BLOW_UP_GUARD};
pub use system::{ControlSystem, Interval, NonlinearTerm};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("simulation blew up at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

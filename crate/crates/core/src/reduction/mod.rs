//! Reduced bases (POD, adjoint POD, balanced truncation, Riccati) and projection.

mod basis;
mod bt;
mod pod;
mod project;
mod riccati;

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::models::ModelError;

pub use basis::{Method, ReducedBasis};
pub use bt::{bt_basis, bt_basis_from_gramians, psd_factor, Gramians};
pub use pod::{
    adjoint_basis_from_snapshots, adjoint_snapshots, pod_adjoint_basis, pod_basis, state_pod_basis,
    state_snapshots, SnapshotSettings, RANK_TOL,
};
pub use project::{project, reduced_domain, ReducedSystem};
pub use riccati::riccati_basis;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("requested {requested} basis vectors but the numerical rank is {rank}")]
    RankDeficient { requested: usize, rank: usize },

    #[error("system matrix is not Hurwitz stable")]
    Unstable,

    #[error("basis is not biorthogonal: max |WᵀV - I| = {0:.3e}")]
    NotBiorthogonal(f64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error(transparent)]
    Model(#[from] ModelError),
}

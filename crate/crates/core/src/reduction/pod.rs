//! Snapshot POD, from state or adjoint trajectories.

use crate::linalg::{normalize_column_signs, svd, DenseMatrix, DenseVector};
use crate::models::{simulate, simulate_adjoint, ControlSystem};

use super::basis::{Method, ReducedBasis};
use super::ReductionError;

/// Relative singular-value floor below which a mode counts as numerically absent.
pub const RANK_TOL: f64 = 1e-13;

/// How snapshot trajectories are generated.
#[derive(Debug, Clone)]
pub struct SnapshotSettings {
    pub initial_state: DenseVector,
    pub dt_sim: f64,
    pub horizon: f64,
    /// Stored states are thinned by a uniform stride to at most this many columns.
    pub max_columns: usize,
}

impl SnapshotSettings {
    /// Zero initial state, `Δt = 1e-4`, horizon `2π`, 500 columns.
    pub fn standard(n: usize) -> Self {
        Self {
            initial_state: vec![0.0; n],
            dt_sim: 1e-4,
            horizon: 2.0 * std::f64::consts::PI,
            max_columns: 500,
        }
    }
}

/// First `ℓ` left singular vectors of the snapshot matrix `Y`.
pub fn pod_basis(snapshots: &DenseMatrix, ell: usize) -> Result<ReducedBasis, ReductionError> {
    pod_basis_tagged(snapshots, ell, Method::Pod)
}

fn pod_basis_tagged(
    snapshots: &DenseMatrix,
    ell: usize,
    method: Method,
) -> Result<ReducedBasis, ReductionError> {
    if ell == 0 {
        return Err(ReductionError::Shape(
            "basis dimension must be at least 1".into(),
        ));
    }
    let dec = svd(snapshots)?;
    let rank = dec.numerical_rank(RANK_TOL);
    if ell > rank {
        return Err(ReductionError::RankDeficient {
            requested: ell,
            rank,
        });
    }
    let mut v = dec.left_vectors.leading_columns(ell);
    normalize_column_signs(&mut v);
    ReducedBasis::new(v.clone(), v, dec.singular_values, method)
}

/// POD of state snapshots under the open-loop input `control`.
pub fn state_pod_basis(
    sys: &ControlSystem,
    control: &dyn Fn(f64) -> DenseVector,
    settings: &SnapshotSettings,
    ell: usize,
) -> Result<ReducedBasis, ReductionError> {
    let y = state_snapshots(sys, control, settings)?;
    pod_basis(&y, ell)
}

pub fn state_snapshots(
    sys: &ControlSystem,
    control: &dyn Fn(f64) -> DenseVector,
    settings: &SnapshotSettings,
) -> Result<DenseMatrix, ReductionError> {
    let fwd = simulate(
        sys,
        &settings.initial_state,
        control,
        settings.dt_sim,
        settings.horizon,
    )?;
    Ok(fwd.snapshot_matrix(settings.max_columns))
}

pub fn adjoint_snapshots(
    sys: &ControlSystem,
    control: &dyn Fn(f64) -> DenseVector,
    settings: &SnapshotSettings,
) -> Result<DenseMatrix, ReductionError> {
    let fwd = simulate(
        sys,
        &settings.initial_state,
        control,
        settings.dt_sim,
        settings.horizon,
    )?;
    let adj = simulate_adjoint(sys, &fwd, fwd.final_time())?;
    Ok(adj.snapshot_matrix(settings.max_columns))
}

/// POD of the adjoint snapshots `p(t_k)` driven by the forward run.
pub fn pod_adjoint_basis(
    sys: &ControlSystem,
    control: &dyn Fn(f64) -> DenseVector,
    settings: &SnapshotSettings,
    ell: usize,
) -> Result<ReducedBasis, ReductionError> {
    let p = adjoint_snapshots(sys, control, settings)?;
    adjoint_basis_from_snapshots(&p, ell)
}

/// POD of precomputed adjoint snapshots, tagged as the adjoint method.
pub fn adjoint_basis_from_snapshots(
    snapshots: &DenseMatrix,
    ell: usize,
) -> Result<ReducedBasis, ReductionError> {
    pod_basis_tagged(snapshots, ell, Method::PodAdj)
}

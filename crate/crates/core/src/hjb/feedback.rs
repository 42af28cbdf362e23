use log::debug;

use crate::linalg::{norm2, DenseVector};
use crate::models::{simulate_feedback, ControlSystem, Trajectory};
use crate::reduction::{ReducedBasis, ReducedSystem};

use super::solver::HjbSolution;
use super::HjbError;

/// `v̂(x) = I[V](Wᵀx)`; reduced coordinates outside the grid are clamped.
pub fn evaluate_value(sol: &HjbSolution, basis: &ReducedBasis, x: &[f64]) -> f64 {
    let y = basis.reduce(x);
    if outside(sol, &y) {
        debug!("evaluating the value function outside the reduced domain; clamping");
    }
    sol.grid.interpolate(&y)
}

fn outside(sol: &HjbSolution, y: &[f64]) -> bool {
    let g = &sol.grid;
    y.iter()
        .enumerate()
        .any(|(d, &v)| v < g.lower()[d] || v > g.upper()[d])
}

/// Argmin over the control set of `e^{-λΔt} I[V](y + Δt f_r(y,u)) + Δt g(y,u)`.
///
/// Ties go to the control of smallest norm, then to the smallest index.
pub fn feedback_from_reduced(sol: &HjbSolution, rsys: &ReducedSystem, y: &[f64]) -> DenseVector {
    let dt = sol.dt;
    let decay = (-sol.discount * dt).exp();
    let drift = rsys.drift(y);
    let state_cost = rsys.state_cost(y);
    let mut foot = vec![0.0; y.len()];
    let mut best = (f64::INFINITY, f64::INFINITY, 0);
    for (j, u) in sol.controls.iter().enumerate() {
        let bu = rsys.b_r.matvec(u);
        for d in 0..y.len() {
            foot[d] = y[d] + dt * (drift[d] + bu[d]);
        }
        let q = decay * sol.grid.interpolate(&foot) + dt * (state_cost + rsys.control_cost(u));
        let size = norm2(u);
        if q < best.0 || (q == best.0 && size < best.1) {
            best = (q, size, j);
        }
    }
    sol.controls.get(best.2).to_vec()
}

pub fn feedback_control(sol: &HjbSolution, rsys: &ReducedSystem, x: &[f64]) -> DenseVector {
    feedback_from_reduced(sol, rsys, &rsys.basis.reduce(x))
}

/// Full-order explicit Euler under the reduced feedback, held constant over
/// each update period `sol.dt`.
pub fn closed_loop(
    sol: &HjbSolution,
    rsys: &ReducedSystem,
    sys: &ControlSystem,
    x0: &[f64],
    dt_sim: f64,
    horizon: f64,
) -> Result<Trajectory, HjbError> {
    if !(dt_sim > 0.0) {
        return Err(HjbError::InvalidParameter(format!(
            "simulation step {dt_sim} must be positive"
        )));
    }
    let period = ((sol.dt / dt_sim).round() as usize).max(1);
    let mut held: DenseVector = Vec::new();
    let traj = simulate_feedback(
        sys,
        x0,
        |k, _, y| {
            if k % period == 0 {
                held = feedback_control(sol, rsys, y);
            }
            held.clone()
        },
        dt_sim,
        horizon,
    )?;
    Ok(traj)
}

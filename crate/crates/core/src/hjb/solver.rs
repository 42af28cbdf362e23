use log::{debug, warn};

use crate::reduction::ReducedSystem;

use super::controls::ControlSet;
use super::grid::ValueGrid;
use super::HjbError;

/// Value iteration fails once `sup |V|` exceeds this bound.
pub const DIVERGENCE_BOUND: f64 = 1e9;

/// Nodes per axis used when no grid is requested explicitly.
pub fn default_nodes(ell: usize) -> usize {
    match ell {
        0..=2 => 41,
        3 => 21,
        4 => 11,
        _ => 7,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HjbOptions {
    pub dt: f64,
    pub tol: f64,
    pub k_max: usize,
}

impl Default for HjbOptions {
    fn default() -> Self {
        Self {
            dt: 0.01,
            tol: 1e-6,
            k_max: 5000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HjbSolution {
    pub grid: ValueGrid,
    pub controls: ControlSet,
    pub dt: f64,
    pub discount: f64,
    pub iterations: usize,
    pub final_increment: f64,
    /// False when the iteration cap was reached before the tolerance.
    pub converged: bool,
    /// Sup-norm increment `‖V^{k+1} - V^k‖_∞` of every sweep.
    pub increments: Vec<f64>,
}

/// The fixed-point map `V ↦ min_u { e^{-λΔt} I[V](y + Δt f_r(y,u)) + Δt g(y,u) }` on a grid.
///
/// Foot-point offsets and running costs are precomputed: the drift per node,
/// `Δt B_r u` and `Δt uᵀRu` per control.
#[derive(Debug, Clone)]
pub struct SemiLagrangian {
    grid: ValueGrid,
    decay: f64,
    /// `y_i + Δt (A_r y_i + Wᵀ f̃(V y_i))`, node-major.
    drift_feet: Vec<f64>,
    node_costs: Vec<f64>,
    /// `Δt B_r u_j`, control-major.
    control_shifts: Vec<f64>,
    control_costs: Vec<f64>,
}

impl SemiLagrangian {
    pub fn new(
        rsys: &ReducedSystem,
        counts: &[usize],
        controls: &ControlSet,
        dt: f64,
    ) -> Result<Self, HjbError> {
        let ell = rsys.dim();
        if counts.len() != ell {
            return Err(HjbError::InvalidGrid(format!(
                "{} node counts for a {ell}-dimensional reduced system",
                counts.len()
            )));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(HjbError::InvalidParameter(format!(
                "time step {dt} must be positive"
            )));
        }
        if controls.input_dim() != rsys.input_dim() {
            return Err(HjbError::InvalidControls(format!(
                "controls have dimension {}, system has {} inputs",
                controls.input_dim(),
                rsys.input_dim()
            )));
        }
        let grid = ValueGrid::new(rsys.lower.clone(), rsys.upper.clone(), counts.to_vec())?;

        let mut drift_feet = Vec::with_capacity(grid.len() * ell);
        let mut node_costs = Vec::with_capacity(grid.len());
        for k in 0..grid.len() {
            let y = grid.node(k);
            let f = rsys.drift(&y);
            drift_feet.extend(y.iter().zip(&f).map(|(yi, fi)| yi + dt * fi));
            node_costs.push(dt * rsys.state_cost(&y));
        }
        let mut control_shifts = Vec::with_capacity(controls.len() * ell);
        let mut control_costs = Vec::with_capacity(controls.len());
        for u in controls.iter() {
            control_shifts.extend(rsys.b_r.matvec(u).iter().map(|v| dt * v));
            control_costs.push(dt * rsys.control_cost(u));
        }
        Ok(Self {
            grid,
            decay: (-rsys.discount * dt).exp(),
            drift_feet,
            node_costs,
            control_shifts,
            control_costs,
        })
    }

    pub fn grid(&self) -> &ValueGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// One Jacobi sweep `out = T(v)`; returns `‖out - v‖_∞`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) -> f64 {
        let ell = self.grid.dim();
        assert_eq!(v.len(), self.len());
        assert_eq!(out.len(), self.len());
        let mut foot = [0.0; super::MAX_DIM];
        let mut increment = 0.0_f64;
        for (i, o) in out.iter_mut().enumerate() {
            let base = &self.drift_feet[i * ell..(i + 1) * ell];
            let mut best = f64::INFINITY;
            for (j, shift) in self.control_shifts.chunks_exact(ell).enumerate() {
                for d in 0..ell {
                    foot[d] = base[d] + shift[d];
                }
                let q = self.decay * self.grid.interpolate_values(v, &foot[..ell])
                    + self.control_costs[j];
                best = best.min(q);
            }
            *o = best + self.node_costs[i];
            increment = increment.max((*o - v[i]).abs());
        }
        increment
    }
}

/// Iterates the semi-Lagrangian map from `V⁰ ≡ 0` until the sup-norm increment
/// drops to `tol` or `k_max` sweeps have run.
pub fn value_iteration(
    rsys: &ReducedSystem,
    counts: &[usize],
    controls: &ControlSet,
    options: &HjbOptions,
) -> Result<HjbSolution, HjbError> {
    if options.k_max == 0 {
        return Err(HjbError::InvalidParameter("k_max must be positive".into()));
    }
    let op = SemiLagrangian::new(rsys, counts, controls, options.dt)?;
    let mut current = vec![0.0; op.len()];
    let mut next = vec![0.0; op.len()];
    let mut increments = Vec::new();
    let mut converged = false;
    for k in 1..=options.k_max {
        let inc = op.apply(&current, &mut next);
        std::mem::swap(&mut current, &mut next);
        increments.push(inc);
        let sup = current.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !(sup <= DIVERGENCE_BOUND) {
            return Err(HjbError::Diverged { iteration: k, sup });
        }
        if k % 500 == 0 {
            debug!("value iteration sweep {k}: increment {inc:.3e}");
        }
        if inc <= options.tol {
            converged = true;
            break;
        }
    }
    let final_increment = *increments.last().expect("at least one sweep");
    if !converged {
        warn!(
            "value iteration hit k_max = {} with increment {final_increment:.3e} > {:.1e}",
            options.k_max, options.tol
        );
    }
    let mut grid = op.grid;
    grid.values = current;
    Ok(HjbSolution {
        grid,
        controls: controls.clone(),
        dt: options.dt,
        discount: rsys.discount,
        iterations: increments.len(),
        final_increment,
        converged,
        increments,
    })
}

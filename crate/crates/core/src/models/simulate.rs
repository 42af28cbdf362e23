//! Explicit Euler forward simulation and backward adjoint integration.

use std::io::{self, Write};
use std::path::Path;

use log::warn;

use crate::io::{write_csv_row, write_file, IoError};
use crate::linalg::{norm_inf, DenseMatrix, DenseVector};

use super::system::ControlSystem;
use super::ModelError;

/// States with `‖y‖_∞` above this are treated as a blow-up.
pub const BLOW_UP_GUARD: f64 = 1e6;

/// Uniformly sampled time series of states, inputs and outputs.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DenseVector>,
    pub controls: Vec<DenseVector>,
    pub outputs: Vec<DenseVector>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn step(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// States as columns of an `n × k` matrix.
    pub fn state_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_columns(&self.states)
    }

    /// Snapshot matrix thinned by a uniform stride to at most `max_columns` columns.
    pub fn snapshot_matrix(&self, max_columns: usize) -> DenseMatrix {
        let k = self.states.len();
        let stride = k.div_ceil(max_columns.max(1)).max(1);
        let cols: Vec<DenseVector> = self.states.iter().step_by(stride).cloned().collect();
        DenseMatrix::from_columns(&cols)
    }

    /// State closest to time `t`.
    pub fn state_at(&self, t: f64) -> &[f64] {
        let dt = self.step();
        let k = if dt > 0.0 {
            ((t - self.times[0]) / dt)
                .round()
                .clamp(0.0, (self.len() - 1) as f64) as usize
        } else {
            0
        };
        &self.states[k]
    }

    /// CSV with header `t,y_1..y_n,u_1..u_m,z_1..z_q`.
    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        let m = self.controls.first().map_or(0, Vec::len);
        let q = self.outputs.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("y_{i}")));
        header.extend((1..=m).map(|i| format!("u_{i}")));
        header.extend((1..=q).map(|i| format!("z_{i}")));
        writeln!(w, "{}", header.join(","))?;
        for k in 0..self.len() {
            let row = std::iter::once(self.times[k])
                .chain(self.states[k].iter().copied())
                .chain(self.controls[k].iter().copied())
                .chain(self.outputs[k].iter().copied());
            write_csv_row(w, row)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), IoError> {
        write_file(path, |w| self.write_csv(w))
    }
}

fn step_count(dt: f64, horizon: f64) -> Result<usize, ModelError> {
    if !(dt > 0.0) || !(horizon >= 0.0) || !dt.is_finite() || !horizon.is_finite() {
        return Err(ModelError::InvalidParameter(format!(
            "time step {dt} and horizon {horizon} must be positive and finite"
        )));
    }
    Ok((horizon / dt).round() as usize)
}

fn warn_if_unstable_step(sys: &ControlSystem, dt: f64) {
    let bound = dt * sys.a.gershgorin_radius();
    if bound > 2.0 {
        warn!("explicit Euler step {dt:e} may be unstable: Δt·ρ(A) estimate {bound:.3} exceeds 2");
    }
}

/// `y_{k+1} = y_k + Δt f(y_k, u(t_k))` for an open-loop input `t ↦ u`.
pub fn simulate(
    sys: &ControlSystem,
    x0: &[f64],
    control: impl Fn(f64) -> DenseVector,
    dt: f64,
    horizon: f64,
) -> Result<Trajectory, ModelError> {
    simulate_feedback(sys, x0, |_, t, _| control(t), dt, horizon)
}

/// Explicit Euler under a policy `(step, t, y) ↦ u`.
pub fn simulate_feedback(
    sys: &ControlSystem,
    x0: &[f64],
    mut policy: impl FnMut(usize, f64, &[f64]) -> DenseVector,
    dt: f64,
    horizon: f64,
) -> Result<Trajectory, ModelError> {
    let n = sys.state_dim();
    if x0.len() != n {
        return Err(ModelError::Shape(format!(
            "initial state has length {}, expected {n}",
            x0.len()
        )));
    }
    let steps = step_count(dt, horizon)?;
    warn_if_unstable_step(sys, dt);

    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        controls: Vec::with_capacity(steps + 1),
        outputs: Vec::with_capacity(steps + 1),
    };
    let mut y = x0.to_vec();
    let mut f = vec![0.0; n];
    for k in 0..=steps {
        let t = k as f64 * dt;
        let u = policy(k, t, &y);
        if u.len() != sys.input_dim() {
            return Err(ModelError::Shape(format!(
                "control has length {}, expected {}",
                u.len(),
                sys.input_dim()
            )));
        }
        traj.times.push(t);
        traj.outputs.push(sys.output(&y));
        if k < steps {
            sys.dynamics_into(&y, &u, &mut f);
            let next: DenseVector = y.iter().zip(&f).map(|(a, b)| a + dt * b).collect();
            traj.states.push(std::mem::replace(&mut y, next));
            if !(norm_inf(&y) <= BLOW_UP_GUARD) {
                return Err(ModelError::BlowUp {
                    step: k + 1,
                    time: t + dt,
                });
            }
        } else {
            traj.states.push(y.clone());
        }
        traj.controls.push(u);
    }
    Ok(traj)
}

/// Backward explicit Euler for `-ṗ = f_y(y)ᵀ p + 2 Q y`, `p(T) = 0`, on the forward time grid.
///
/// The returned trajectory holds adjoint states `p(t_k)`, the forward controls, and `C p`.
pub fn simulate_adjoint(
    sys: &ControlSystem,
    forward: &Trajectory,
    horizon: f64,
) -> Result<Trajectory, ModelError> {
    let len = forward.len();
    if len < 2 {
        return Err(ModelError::InvalidParameter(
            "adjoint needs a forward trajectory with at least two samples".into(),
        ));
    }
    let dt = forward.step();
    if (forward.final_time() - horizon).abs() > 1e-9 * horizon.max(1.0) || forward.times[0] != 0.0 {
        return Err(ModelError::InvalidParameter(format!(
            "forward trajectory spans [{}, {}], adjoint needs [0, {horizon}]",
            forward.times[0],
            forward.final_time()
        )));
    }
    warn_if_unstable_step(sys, dt);

    let n = sys.state_dim();
    let at = sys.a.transpose();
    let q2 = sys.q_cost.scale(2.0);
    let mut adj = vec![vec![0.0; n]; len];
    let mut rhs = vec![0.0; n];
    for k in (1..len).rev() {
        let y = &forward.states[k];
        let p = &adj[k];
        at.matvec_into(p, &mut rhs);
        if let Some(nl) = &sys.nonlinear {
            nl.add_jacobian_transpose_product(y, p, &mut rhs);
        }
        for (r, g) in rhs.iter_mut().zip(q2.matvec(y)) {
            *r += g;
        }
        let prev: DenseVector = p.iter().zip(&rhs).map(|(a, b)| a + dt * b).collect();
        if !(norm_inf(&prev) <= BLOW_UP_GUARD) {
            return Err(ModelError::BlowUp {
                step: k - 1,
                time: forward.times[k - 1],
            });
        }
        adj[k - 1] = prev;
    }
    let outputs = adj.iter().map(|p| sys.output(p)).collect();
    Ok(Trajectory {
        times: forward.times.clone(),
        states: adj,
        controls: forward.controls.clone(),
        outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fd::build_advection_diffusion;
    use crate::models::Interval;

    fn scalar_system(a: f64, b: f64, q: f64) -> ControlSystem {
        ControlSystem {
            a: DenseMatrix::from_row_major(1, 1, vec![a]),
            b: DenseMatrix::from_row_major(1, 1, vec![b]),
            c: DenseMatrix::identity(1),
            nonlinear: None,
            q_cost: DenseMatrix::from_row_major(1, 1, vec![q]),
            r_cost: DenseMatrix::identity(1),
            discount: 0.0,
            grid_points: vec![0.0],
            mesh: 1.0,
        }
    }

    #[test]
    fn zero_dynamics_keep_state() {
        let mut sys = scalar_system(0.0, 0.0, 1.0);
        sys.a = DenseMatrix::zeros(2, 2);
        sys.b = DenseMatrix::zeros(2, 1);
        sys.c = DenseMatrix::zeros(1, 2);
        let tr = simulate(&sys, &[1.5, -2.0], |t| vec![t.sin()], 0.1, 1.0).unwrap();
        assert_eq!(tr.len(), 11);
        assert!(tr.states.iter().all(|s| s == &vec![1.5, -2.0]));
    }

    #[test]
    fn scalar_decay_matches_euler_closed_form() {
        let sys = scalar_system(-1.0, 0.0, 1.0);
        let tr = simulate(&sys, &[1.0], |_| vec![0.0], 0.1, 2.0).unwrap();
        for (k, s) in tr.states.iter().enumerate() {
            assert!((s[0] - 0.9_f64.powi(k as i32)).abs() < 1e-14);
        }
        assert!((tr.times[20] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn blow_up_names_step() {
        let sys = scalar_system(100.0, 0.0, 1.0);
        match simulate(&sys, &[1.0], |_| vec![0.0], 0.1, 10.0) {
            Err(ModelError::BlowUp { step, .. }) => assert_eq!(step, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_forward_gives_zero_adjoint() {
        let sys = build_advection_diffusion(
            21,
            0.2,
            2.0,
            Interval::new(-0.5, -0.1),
            Interval::new(0.1, 0.6),
        )
        .unwrap()
        .with_output_cost(20.0, 0.1, 0.0);
        let fwd = simulate(&sys, &[0.0; 21], |_| vec![0.0], 1e-3, 0.5).unwrap();
        let adj = simulate_adjoint(&sys, &fwd, 0.5).unwrap();
        assert!(adj.states.iter().all(|p| p.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn scalar_adjoint_matches_variation_of_constants() {
        // ẏ = -y, y(0)=1 → y = e^{-t}; -ṗ = -p + 2y, p(T)=0
        // → p(t) = e^{t} ∫_t^T 2 e^{-2s} ds = e^{t} (e^{-2t} - e^{-2T})
        let sys = scalar_system(-1.0, 0.0, 1.0);
        let horizon = 2.0;
        let mut errors = Vec::new();
        for dt in [1e-3, 5e-4] {
            let fwd = simulate(&sys, &[1.0], |_| vec![0.0], dt, horizon).unwrap();
            let adj = simulate_adjoint(&sys, &fwd, horizon).unwrap();
            let err = adj
                .times
                .iter()
                .zip(&adj.states)
                .map(|(&t, p)| (p[0] - t.exp() * ((-2.0 * t).exp() - (-2.0 * horizon).exp())).abs())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        assert!(errors[0] < 2e-3, "{errors:?}");
        let ratio = errors[0] / errors[1];
        assert!((1.7..2.3).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn adjoint_requires_matching_horizon() {
        let sys = scalar_system(-1.0, 0.0, 1.0);
        let fwd = simulate(&sys, &[1.0], |_| vec![0.0], 0.1, 1.0).unwrap();
        assert!(simulate_adjoint(&sys, &fwd, 2.0).is_err());
    }

    #[test]
    fn snapshot_thinning_respects_cap() {
        let sys = scalar_system(-1.0, 0.0, 1.0);
        let tr = simulate(&sys, &[1.0], |_| vec![0.0], 0.001, 2.0).unwrap();
        assert_eq!(tr.len(), 2001);
        let y = tr.snapshot_matrix(500);
        assert!(y.cols() <= 500 && y.cols() >= 400, "{}", y.cols());
        assert_eq!(y[(0, 0)], 1.0);
    }

    #[test]
    fn csv_header_layout() {
        let sys = scalar_system(-1.0, 1.0, 1.0);
        let tr = simulate(&sys, &[1.0], |_| vec![0.5], 0.5, 1.0).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,y_1,u_1,z_1"));
        assert_eq!(lines.count(), 3);
    }
}

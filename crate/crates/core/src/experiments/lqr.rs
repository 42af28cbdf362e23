use crate::linalg::{solve_are_detailed, DenseMatrix, LinalgError};
use crate::models::{simulate_feedback, ControlSystem, ModelError, Trajectory};

/// Riccati solution of the linear(ized) problem with its feedback `u = -K x`.
#[derive(Debug, Clone)]
pub struct LqrReference {
    pub p: DenseMatrix,
    /// `K = R⁻¹ Bᵀ P`.
    pub gain: DenseMatrix,
    pub iterations: usize,
}

impl LqrReference {
    /// `v(x) = xᵀ P x`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.p.quadratic_form(x)
    }

    pub fn control(&self, x: &[f64]) -> Vec<f64> {
        self.gain.matvec(x).into_iter().map(|v| -v).collect()
    }

    /// Full-order simulation with the feedback applied at every step.
    pub fn closed_loop(
        &self,
        sys: &ControlSystem,
        x0: &[f64],
        dt_sim: f64,
        horizon: f64,
    ) -> Result<Trajectory, ModelError> {
        simulate_feedback(sys, x0, |_, _, y| self.control(y), dt_sim, horizon)
    }
}

/// Solves the discounted ARE for the linear part of `sys`.
pub fn run_lqr_reference(sys: &ControlSystem) -> Result<LqrReference, LinalgError> {
    let sol = solve_are_detailed(&sys.a, &sys.b, &sys.q_cost, &sys.r_cost, sys.discount)?;
    Ok(LqrReference {
        p: sol.p,
        gain: sol.gain,
        iterations: sol.iterations,
    })
}

/// Trapezoidal rule for `∫₀ᵀ (w_z |z|² + w_u |u|²) e^{-λt} dt` on the trajectory's time grid.
pub fn quadrature_cost(traj: &Trajectory, weight_z: f64, weight_u: f64, discount: f64) -> f64 {
    let integrand: Vec<f64> = (0..traj.len())
        .map(|k| {
            let z2: f64 = traj.outputs[k].iter().map(|z| z * z).sum();
            let u2: f64 = traj.controls[k].iter().map(|u| u * u).sum();
            (weight_z * z2 + weight_u * u2) * (-discount * traj.times[k]).exp()
        })
        .collect();
    integrand
        .windows(2)
        .zip(traj.times.windows(2))
        .map(|(f, t)| 0.5 * (t[1] - t[0]) * (f[0] + f[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_advection_diffusion, Interval};

    fn synthetic(times: Vec<f64>, z: impl Fn(f64) -> f64) -> Trajectory {
        Trajectory {
            outputs: times.iter().map(|&t| vec![z(t)]).collect(),
            controls: times.iter().map(|_| vec![0.0]).collect(),
            states: times.iter().map(|_| vec![0.0]).collect(),
            times,
        }
    }

    fn grid(dt: f64, horizon: f64) -> Vec<f64> {
        let steps = (horizon / dt).round() as usize;
        (0..=steps).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn zero_and_constant_integrands() {
        assert_eq!(
            quadrature_cost(&synthetic(grid(0.1, 2.0), |_| 0.0), 1.0, 1.0, 0.0),
            0.0
        );
        let c = quadrature_cost(&synthetic(grid(0.25, 2.0), |_| 1.0), 1.0, 1.0, 0.0);
        assert!((c - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_integrand_converges_at_second_order() {
        let exact = (1.0 - (-15.0f64).exp()) / 3.0;
        let err = |dt: f64| {
            (quadrature_cost(&synthetic(grid(dt, 5.0), |t| (-t).exp()), 1.0, 0.0, 1.0) - exact)
                .abs()
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        assert!(e1 < 1e-4);
        assert!((e1 / e2 - 4.0).abs() < 0.05, "ratio {}", e1 / e2);
    }

    #[test]
    fn zero_state_weight_gives_zero_solution() {
        let sys = build_advection_diffusion(
            11,
            0.2,
            2.0,
            Interval::new(-0.5, -0.1),
            Interval::new(0.1, 0.6),
        )
        .unwrap()
        .with_output_cost(0.0, 0.1, 0.0);
        let lqr = run_lqr_reference(&sys).unwrap();
        assert_eq!(lqr.p.max_abs(), 0.0);
        assert_eq!(lqr.gain.max_abs(), 0.0);
    }

    #[test]
    fn gain_is_ten_bt_p_for_r_point_one() {
        let sys = build_advection_diffusion(
            15,
            0.2,
            2.0,
            Interval::new(-0.5, -0.1),
            Interval::new(0.1, 0.6),
        )
        .unwrap()
        .with_output_cost(20.0, 0.1, 0.0);
        let lqr = run_lqr_reference(&sys).unwrap();
        let expected = sys.b.tr_matmul(&lqr.p).scale(10.0);
        assert!((&lqr.gain - &expected).max_abs() < 1e-10 * expected.max_abs());
    }
}

//! Finite-difference semi-discretizations on `n` interior points of `(-1, 1)`
//! with homogeneous Dirichlet boundaries.

use std::sync::Arc;

use crate::linalg::DenseMatrix;

use super::system::{ControlSystem, Interval, NonlinearTerm};
use super::ModelError;

/// Interior nodes `ξᵢ = -1 + i h`, `h = 2 / (n + 1)`.
pub fn interior_grid(n: usize) -> (Vec<f64>, f64) {
    let h = 2.0 / (n as f64 + 1.0);
    let xi = (1..=n).map(|i| -1.0 + i as f64 * h).collect();
    (xi, h)
}

pub fn indicator(grid: &[f64], set: Interval) -> Vec<f64> {
    grid.iter()
        .map(|&x| if set.contains(x) { 1.0 } else { 0.0 })
        .collect()
}

fn check_interval(name: &str, set: Interval) -> Result<(), ModelError> {
    if !(set.lo >= -1.0 && set.hi <= 1.0 && set.lo < set.hi) {
        return Err(ModelError::InvalidInterval(format!(
            "{name} = {set} must be a nonempty subinterval of (-1, 1)"
        )));
    }
    Ok(())
}

fn check_size(n: usize, diffusion: f64) -> Result<(), ModelError> {
    if n < 3 {
        return Err(ModelError::InvalidParameter(format!(
            "need n >= 3 grid points, got {n}"
        )));
    }
    if !(diffusion > 0.0) {
        return Err(ModelError::InvalidParameter(format!(
            "diffusion coefficient {diffusion} must be positive"
        )));
    }
    Ok(())
}

/// Central second differences scaled by `diffusion`.
fn diffusion_matrix(n: usize, h: f64, diffusion: f64) -> DenseMatrix {
    let k = diffusion / (h * h);
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = -2.0 * k;
        if i > 0 {
            a[(i, i - 1)] = k;
        }
        if i + 1 < n {
            a[(i, i + 1)] = k;
        }
    }
    a
}

/// `w_t = μ_diff w_ξξ - μ_adv w_ξ + 1_{Ω_B} u`, `z = |Ω_C|⁻¹ ∫_{Ω_C} w`.
///
/// Advection is upwinded: backward differences for `μ_adv > 0`, forward otherwise.
pub fn build_advection_diffusion(
    n: usize,
    mu_diff: f64,
    mu_adv: f64,
    omega_b: Interval,
    omega_c: Interval,
) -> Result<ControlSystem, ModelError> {
    check_size(n, mu_diff)?;
    check_interval("Ω_B", omega_b)?;
    check_interval("Ω_C", omega_c)?;
    let (xi, h) = interior_grid(n);

    let mut a = diffusion_matrix(n, h, mu_diff);
    let adv = mu_adv / h;
    for i in 0..n {
        if mu_adv >= 0.0 {
            a[(i, i)] -= adv;
            if i > 0 {
                a[(i, i - 1)] += adv;
            }
        } else {
            a[(i, i)] += adv;
            if i + 1 < n {
                a[(i, i + 1)] -= adv;
            }
        }
    }

    let b = DenseMatrix::column_vector(&indicator(&xi, omega_b));
    let weight = h / omega_c.len();
    let c = DenseMatrix::row_vector(
        &indicator(&xi, omega_c)
            .into_iter()
            .map(|v| v * weight)
            .collect::<Vec<_>>(),
    );
    Ok(assemble(a, b, c, None, xi, h))
}

/// `w_t = ν w_ξξ - c w w_ξ + 1_{Ω_B} u`, `z = ∫ w`.
pub fn build_burgers(
    n: usize,
    nu: f64,
    advection_coeff: f64,
    omega_b: Interval,
) -> Result<ControlSystem, ModelError> {
    check_size(n, nu)?;
    check_interval("Ω_B", omega_b)?;
    let (xi, h) = interior_grid(n);
    let a = diffusion_matrix(n, h, nu);
    let b = DenseMatrix::column_vector(&indicator(&xi, omega_b));
    let c = DenseMatrix::row_vector(&vec![h; n]);
    let term = UpwindTransport {
        coeff: advection_coeff,
        h,
    };
    Ok(assemble(a, b, c, Some(Arc::new(term)), xi, h))
}

fn assemble(
    a: DenseMatrix,
    b: DenseMatrix,
    c: DenseMatrix,
    nonlinear: Option<Arc<dyn NonlinearTerm>>,
    grid_points: Vec<f64>,
    mesh: f64,
) -> ControlSystem {
    let m = b.cols();
    ControlSystem {
        q_cost: c.tr_matmul(&c),
        r_cost: DenseMatrix::identity(m),
        a,
        b,
        c,
        nonlinear,
        discount: 0.0,
        grid_points,
        mesh,
    }
}

/// Non-conservative transport `-c · yᵢ · D(y)ᵢ` where `D` is the first difference
/// upwinded by the sign of `yᵢ`; Dirichlet ghosts are zero.
#[derive(Debug, Clone, Copy)]
pub struct UpwindTransport {
    pub coeff: f64,
    pub h: f64,
}

impl UpwindTransport {
    #[inline]
    fn neighbors(y: &[f64], i: usize) -> (f64, f64) {
        let left = if i > 0 { y[i - 1] } else { 0.0 };
        let right = y.get(i + 1).copied().unwrap_or(0.0);
        (left, right)
    }
}

impl NonlinearTerm for UpwindTransport {
    fn eval_into(&self, y: &[f64], out: &mut [f64]) {
        let k = self.coeff / self.h;
        for (i, o) in out.iter_mut().enumerate() {
            let (left, right) = Self::neighbors(y, i);
            let yi = y[i];
            let diff = if yi >= 0.0 { yi - left } else { right - yi };
            *o = -k * yi * diff;
        }
    }

    fn jacobian(&self, y: &[f64]) -> DenseMatrix {
        let n = y.len();
        let k = self.coeff / self.h;
        let mut j = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let (left, right) = Self::neighbors(y, i);
            let yi = y[i];
            if yi >= 0.0 {
                j[(i, i)] = -k * (2.0 * yi - left);
                if i > 0 {
                    j[(i, i - 1)] = k * yi;
                }
            } else {
                j[(i, i)] = -k * (right - 2.0 * yi);
                if i + 1 < n {
                    j[(i, i + 1)] = -k * yi;
                }
            }
        }
        j
    }

    fn add_jacobian_transpose_product(&self, y: &[f64], p: &[f64], out: &mut [f64]) {
        let n = y.len();
        let k = self.coeff / self.h;
        for i in 0..n {
            let (left, right) = Self::neighbors(y, i);
            let yi = y[i];
            if yi >= 0.0 {
                out[i] += -k * (2.0 * yi - left) * p[i];
                if i > 0 {
                    out[i - 1] += k * yi * p[i];
                }
            } else {
                out[i] += -k * (right - 2.0 * yi) * p[i];
                if i + 1 < n {
                    out[i + 1] += -k * yi * p[i];
                }
            }
        }
    }
}

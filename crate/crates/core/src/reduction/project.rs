use std::sync::Arc;

use crate::linalg::{DenseMatrix, DenseVector};
use crate::models::{ControlSystem, NonlinearTerm};

use super::basis::ReducedBasis;
use super::ReductionError;

/// Petrov-Galerkin projection `ẏ = Wᵀ f(V y, u)` with lifted cost `(Vy)ᵀ Q (Vy) + uᵀ R u`.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub a_r: DenseMatrix,
    pub b_r: DenseMatrix,
    pub q_r: DenseMatrix,
    pub r_cost: DenseMatrix,
    pub discount: f64,
    pub basis: ReducedBasis,
    pub nonlinear: Option<Arc<dyn NonlinearTerm>>,
    /// Box `Θ_ℓ` containing `Wᵀ x` for every `‖x‖_∞ ≤ a`.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ReducedSystem {
    pub fn dim(&self) -> usize {
        self.a_r.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b_r.cols()
    }

    /// Control-independent part `A_r y + Wᵀ f̃(V y)`.
    pub fn drift(&self, y: &[f64]) -> DenseVector {
        let mut out = self.a_r.matvec(y);
        if let Some(nl) = &self.nonlinear {
            let full = nl.eval(&self.basis.lift(y));
            for (o, v) in out.iter_mut().zip(self.basis.reduce(&full)) {
                *o += v;
            }
        }
        out
    }

    pub fn dynamics(&self, y: &[f64], u: &[f64]) -> DenseVector {
        let mut out = self.drift(y);
        for (o, v) in out.iter_mut().zip(self.b_r.matvec(u)) {
            *o += v;
        }
        out
    }

    pub fn state_cost(&self, y: &[f64]) -> f64 {
        self.q_r.quadratic_form(y)
    }

    pub fn control_cost(&self, u: &[f64]) -> f64 {
        self.r_cost.quadratic_form(u)
    }

    pub fn running_cost(&self, y: &[f64], u: &[f64]) -> f64 {
        self.state_cost(y) + self.control_cost(u)
    }

    /// Replaces the reduced domain.
    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), self.dim());
        assert_eq!(upper.len(), self.dim());
        self.lower = lower;
        self.upper = upper;
        self
    }
}

/// `lower_i = -a Σ_j |W_ji|`, `upper_i = a Σ_j |W_ji|`.
pub fn reduced_domain(w: &DenseMatrix, a: f64) -> (Vec<f64>, Vec<f64>) {
    let upper: Vec<f64> = (0..w.cols())
        .map(|j| a * (0..w.rows()).map(|i| w[(i, j)].abs()).sum::<f64>())
        .collect();
    let lower = upper.iter().map(|u| -u).collect();
    (lower, upper)
}

pub fn project(
    sys: &ControlSystem,
    basis: &ReducedBasis,
    a: f64,
) -> Result<ReducedSystem, ReductionError> {
    if basis.full_dim() != sys.state_dim() {
        return Err(ReductionError::Shape(format!(
            "basis has {} rows but the system has {} states",
            basis.full_dim(),
            sys.state_dim()
        )));
    }
    let err = basis.biorthogonality_error();
    if !(err <= ReducedBasis::BIORTHOGONALITY_TOL) {
        return Err(ReductionError::NotBiorthogonal(err));
    }
    if !(a > 0.0) {
        return Err(ReductionError::Shape(format!(
            "domain radius {a} must be positive"
        )));
    }
    let (v, w) = (&basis.v, &basis.w);
    let (lower, upper) = reduced_domain(w, a);
    Ok(ReducedSystem {
        a_r: w.tr_matmul(&sys.a.matmul(v)),
        b_r: w.tr_matmul(&sys.b),
        q_r: v.tr_matmul(&sys.q_cost.matmul(v)).symmetrize(),
        r_cost: sys.r_cost.clone(),
        discount: sys.discount,
        basis: basis.clone(),
        nonlinear: sys.nonlinear.clone(),
        lower,
        upper,
    })
}

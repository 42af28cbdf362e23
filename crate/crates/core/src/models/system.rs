use std::fmt;
use std::sync::Arc;

use crate::linalg::{DenseMatrix, DenseVector};

use super::ModelError;

/// State-dependent part `f̃` of the dynamics `ẏ = A y + B u + f̃(y)`.
pub trait NonlinearTerm: Send + Sync + fmt::Debug {
    fn eval_into(&self, y: &[f64], out: &mut [f64]);

    /// Jacobian `f̃_y(y)`.
    fn jacobian(&self, y: &[f64]) -> DenseMatrix;

    /// `f̃_y(y)ᵀ p`, accumulated into `out`.
    fn add_jacobian_transpose_product(&self, y: &[f64], p: &[f64], out: &mut [f64]) {
        let jt = self.jacobian(y).tr_matvec(p);
        for (o, v) in out.iter_mut().zip(jt) {
            *o += v;
        }
    }

    fn eval(&self, y: &[f64]) -> DenseVector {
        let mut out = vec![0.0; y.len()];
        self.eval_into(y, &mut out);
        out
    }
}

/// Closed interval of the spatial domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        const SLACK: f64 = 1e-12;
        x >= self.lo - SLACK && x <= self.hi + SLACK
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Full-order control system `ẏ = A y + B u + f̃(y)`, `z = C y`, with running cost
/// `yᵀ Q y + uᵀ R u` discounted by `e^{-λt}`.
#[derive(Debug, Clone)]
pub struct ControlSystem {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub c: DenseMatrix,
    pub nonlinear: Option<Arc<dyn NonlinearTerm>>,
    pub q_cost: DenseMatrix,
    pub r_cost: DenseMatrix,
    pub discount: f64,
    pub grid_points: Vec<f64>,
    pub mesh: f64,
}

impl ControlSystem {
    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.rows()
    }

    pub fn is_linear(&self) -> bool {
        self.nonlinear.is_none()
    }

    /// Sets `Q = w_z CᵀC`, `R = w_u I` and the discount factor.
    pub fn with_output_cost(
        mut self,
        output_weight: f64,
        control_weight: f64,
        discount: f64,
    ) -> Self {
        self.q_cost = self.c.tr_matmul(&self.c).scale(output_weight);
        self.r_cost = DenseMatrix::identity(self.input_dim()).scale(control_weight);
        self.discount = discount;
        self
    }

    /// The system with its nonlinear term dropped, i.e. the linearization at `y = 0`
    /// whenever `f̃(0) = 0` and `f̃_y(0) = 0`.
    pub fn linear_part(&self) -> Self {
        Self {
            nonlinear: None,
            ..self.clone()
        }
    }

    pub fn dynamics_into(&self, y: &[f64], u: &[f64], out: &mut [f64]) {
        self.a.matvec_into(y, out);
        for (o, bu) in out.iter_mut().zip(self.b.matvec(u)) {
            *o += bu;
        }
        if let Some(nl) = &self.nonlinear {
            let extra = nl.eval(y);
            for (o, e) in out.iter_mut().zip(extra) {
                *o += e;
            }
        }
    }

    pub fn dynamics(&self, y: &[f64], u: &[f64]) -> DenseVector {
        let mut out = vec![0.0; self.state_dim()];
        self.dynamics_into(y, u, &mut out);
        out
    }

    /// `f_y(y) = A + f̃_y(y)`.
    pub fn state_jacobian(&self, y: &[f64]) -> DenseMatrix {
        match &self.nonlinear {
            Some(nl) => &self.a + &nl.jacobian(y),
            None => self.a.clone(),
        }
    }

    pub fn output(&self, y: &[f64]) -> DenseVector {
        self.c.matvec(y)
    }

    pub fn running_cost(&self, y: &[f64], u: &[f64]) -> f64 {
        self.q_cost.quadratic_form(y) + self.r_cost.quadratic_form(u)
    }

    /// Checks dimensions and the cost-weight requirements.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.state_dim();
        let m = self.input_dim();
        let shape_err = |what: &str| Err(ModelError::Shape(what.to_string()));
        if !self.a.is_square() {
            return shape_err("A must be square");
        }
        if self.b.rows() != n || self.c.cols() != n {
            return shape_err("B and C must match the state dimension");
        }
        if self.q_cost.shape() != (n, n) || self.r_cost.shape() != (m, m) {
            return shape_err("cost weights have the wrong shape");
        }
        if self.q_cost.asymmetry() > 1e-12 || self.r_cost.asymmetry() > 1e-12 {
            return Err(ModelError::InvalidParameter(
                "cost weights must be symmetric".into(),
            ));
        }
        if !(self.discount >= 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "discount factor {} must be nonnegative",
                self.discount
            )));
        }
        let r_eig = crate::linalg::sym_eig(&self.r_cost)?;
        if r_eig.eigenvalues.last().is_none_or(|&l| l <= 0.0) {
            return Err(ModelError::InvalidParameter(
                "R must be positive definite".into(),
            ));
        }
        let q_eig = crate::linalg::sym_eig(&self.q_cost)?;
        let q_scale = q_eig.eigenvalues.first().copied().unwrap_or(0.0).abs();
        if q_eig
            .eigenvalues
            .last()
            .is_some_and(|&l| l < -1e-12 * q_scale.max(1.0))
        {
            return Err(ModelError::InvalidParameter(
                "Q must be positive semidefinite".into(),
            ));
        }
        Ok(())
    }
}

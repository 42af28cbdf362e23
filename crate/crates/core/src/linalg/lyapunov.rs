//! Continuous Lyapunov equations `A X + X Aᵀ + RHS = 0`.
//!
//! Solved by the matrix sign-function iteration with determinant scaling.
//! For Hurwitz `A` the iterates `A_k` converge quadratically to `-I` while the
//! companion iterates converge to `2X`. Any other limit means `A` has spectrum
//! in the closed right half-plane.

use super::error::{LinalgError, Result};
use super::lu::Lu;
use super::matrix::DenseMatrix;

const MAX_ITER: usize = 100;
const SIGN_TOL: f64 = 1e-13;

/// Solves `A X + X Aᵀ + rhs = 0` for Hurwitz `A` and symmetric `rhs`.
///
/// Pass `Aᵀ` to solve the observability form `Aᵀ X + X A + rhs = 0`.
pub fn solve_lyapunov(a: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() || rhs.shape() != a.shape() {
        return Err(LinalgError::Shape(format!(
            "Lyapunov operands {:?} and {:?}",
            a.shape(),
            rhs.shape()
        )));
    }
    if !a.is_finite() || !rhs.is_finite() {
        return Err(LinalgError::NonFinite("Lyapunov input"));
    }
    let n = a.rows();
    let mut ak = a.clone();
    let mut rk = rhs.symmetrize();

    for _ in 0..MAX_ITER {
        let lu = match Lu::factor(&ak) {
            Ok(lu) => lu,
            // eigenvalue on the imaginary axis
            Err(LinalgError::Singular { .. }) => return Err(LinalgError::NotStable),
            Err(e) => return Err(e),
        };
        let inv = lu.inverse();
        let c = (lu.log_abs_determinant() / n as f64).exp();

        let mut next_a = ak.scale(0.5 / c);
        next_a.axpy(0.5 * c, &inv);
        let mut next_r = rk.scale(0.5 / c);
        next_r.axpy(0.5 * c, &inv.matmul(&rk).matmul(&inv.transpose()));
        let next_r = next_r.symmetrize();

        let step = (&next_a - &ak).frobenius_norm();
        ak = next_a;
        rk = next_r;
        if !ak.is_finite() || !rk.is_finite() {
            return Err(LinalgError::NotStable);
        }
        if step <= SIGN_TOL * ak.frobenius_norm().max(1.0) {
            break;
        }
    }

    // converged iterate is sign(A), which equals -I exactly when A is Hurwitz
    let mut dev = ak.clone();
    for i in 0..n {
        dev[(i, i)] += 1.0;
    }
    if dev.frobenius_norm() > 1e-8 * (n as f64).sqrt() {
        return Err(LinalgError::NotStable);
    }
    Ok(rk.scale(0.5))
}

/// `A X + X Aᵀ + rhs`.
pub fn lyapunov_residual(a: &DenseMatrix, x: &DenseMatrix, rhs: &DenseMatrix) -> DenseMatrix {
    let ax = a.matmul(x);
    let mut r = &ax + &ax.transpose();
    r.axpy(1.0, rhs);
    r
}

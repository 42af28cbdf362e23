//! Dense linear algebra kernels and matrix-equation solvers.

mod eig;
mod error;
mod lu;
mod lyapunov;
mod matrix;
mod riccati;
mod svd;

pub use eig::{sym_eig, SymEig};
pub use error::{LinalgError, Result};
pub use lu::{inverse, lu_solve, Lu};
pub use lyapunov::{lyapunov_residual, solve_lyapunov};
pub use matrix::{dot, norm2, norm_inf, DenseMatrix, DenseVector};
pub use riccati::{riccati_residual, solve_are, solve_are_detailed, AreSolution};
pub use svd::{svd, SvdResult};

/// Flips each column so that its entry of largest magnitude is positive.
///
/// Returns the applied signs so paired bases can be flipped consistently.
pub fn normalize_column_signs(m: &mut DenseMatrix) -> Vec<f64> {
    let mut signs = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut best = 0.0_f64;
        for i in 0..m.rows() {
            if m[(i, j)].abs() > best.abs() {
                best = m[(i, j)];
            }
        }
        let s = if best < 0.0 { -1.0 } else { 1.0 };
        if s < 0.0 {
            for i in 0..m.rows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
        signs.push(s);
    }
    signs
}

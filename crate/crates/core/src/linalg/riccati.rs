//! Shifted continuous algebraic Riccati equation
//! `(A-λI)ᵀP + P(A-λI) - P B R⁻¹ Bᵀ P + Q = 0` by Newton-Kleinman iteration.

use super::error::{LinalgError, Result};
use super::lu::{inverse, Lu};
use super::lyapunov::solve_lyapunov;
use super::matrix::DenseMatrix;

const MAX_ITER: usize = 100;
const STEP_TOL: f64 = 1e-10;

/// Solution of the shifted ARE together with the iteration record.
#[derive(Debug, Clone)]
pub struct AreSolution {
    pub p: DenseMatrix,
    /// Optimal gain `R⁻¹ Bᵀ P`.
    pub gain: DenseMatrix,
    pub iterations: usize,
    /// Frobenius norm of the Riccati residual after each Newton step.
    pub residuals: Vec<f64>,
}

pub fn solve_are(
    a: &DenseMatrix,
    b: &DenseMatrix,
    q: &DenseMatrix,
    r: &DenseMatrix,
    lambda: f64,
) -> Result<DenseMatrix> {
    solve_are_detailed(a, b, q, r, lambda).map(|s| s.p)
}

pub fn solve_are_detailed(
    a: &DenseMatrix,
    b: &DenseMatrix,
    q: &DenseMatrix,
    r: &DenseMatrix,
    lambda: f64,
) -> Result<AreSolution> {
    let n = a.rows();
    let m = b.cols();
    if !a.is_square() || b.rows() != n || q.shape() != (n, n) || r.shape() != (m, m) {
        return Err(LinalgError::Shape(format!(
            "ARE operands A {:?}, B {:?}, Q {:?}, R {:?}",
            a.shape(),
            b.shape(),
            q.shape(),
            r.shape()
        )));
    }
    if !(lambda >= 0.0) {
        return Err(LinalgError::Shape(format!(
            "discount {lambda} must be nonnegative"
        )));
    }
    let shifted = shift(a, lambda);
    let r_inv = inverse(r)?;
    let r_inv_bt = r_inv.matmul(&b.transpose());

    let mut gain = initial_gain(&shifted, b)?;
    let mut p = DenseMatrix::zeros(n, n);
    let mut residuals = Vec::new();

    for it in 1..=MAX_ITER {
        let closed = &shifted - &b.matmul(&gain);
        let mut rhs = q.clone();
        rhs.axpy(1.0, &gain.tr_matmul(&r.matmul(&gain)));
        let next = match solve_lyapunov(&closed.transpose(), &rhs.symmetrize()) {
            Ok(x) => x.symmetrize(),
            Err(LinalgError::NotStable) if it == 1 => return Err(LinalgError::NoStabilizingGuess),
            Err(e) => return Err(e),
        };
        let step = (&next - &p).frobenius_norm();
        p = next;
        gain = r_inv_bt.matmul(&p);
        residuals.push(riccati_residual(a, b, q, r, lambda, &p).frobenius_norm());
        if step <= STEP_TOL * p.frobenius_norm().max(1.0) {
            if !p.is_finite() {
                return Err(LinalgError::NonFinite("Riccati solution"));
            }
            return Ok(AreSolution {
                p,
                gain,
                iterations: it,
                residuals,
            });
        }
    }
    Err(LinalgError::RiccatiNoConvergence {
        iterations: MAX_ITER,
        residuals,
    })
}

/// `(A-λI)ᵀP + P(A-λI) - P B R⁻¹ Bᵀ P + Q`.
pub fn riccati_residual(
    a: &DenseMatrix,
    b: &DenseMatrix,
    q: &DenseMatrix,
    r: &DenseMatrix,
    lambda: f64,
    p: &DenseMatrix,
) -> DenseMatrix {
    let shifted = shift(a, lambda);
    let pa = p.matmul(&shifted);
    let pb = p.matmul(b);
    let coupling = match inverse(r) {
        Ok(r_inv) => pb.matmul(&r_inv).matmul(&pb.transpose()),
        Err(_) => DenseMatrix::from_fn(p.rows(), p.cols(), |_, _| f64::NAN),
    };
    let mut res = &pa + &pa.transpose();
    res.axpy(-1.0, &coupling);
    res.axpy(1.0, q);
    res
}

fn shift(a: &DenseMatrix, lambda: f64) -> DenseMatrix {
    let mut s = a.clone();
    for i in 0..s.rows() {
        s[(i, i)] -= lambda;
    }
    s
}

/// Zero gain when `A - λI` is Hurwitz, otherwise Bass' stabilizing gain.
fn initial_gain(shifted: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let n = shifted.rows();
    let zero = DenseMatrix::zeros(b.cols(), n);
    match solve_lyapunov(shifted, &DenseMatrix::identity(n)) {
        Ok(_) => return Ok(zero),
        Err(LinalgError::NotStable) => {}
        Err(e) => return Err(e),
    }
    // β exceeds every eigenvalue real part, so -(A+βI) is Hurwitz.
    let beta = shifted.gershgorin_radius() + 1.0;
    let mut neg = shifted.scale(-1.0);
    for i in 0..n {
        neg[(i, i)] -= beta;
    }
    let bbt = b.matmul(&b.transpose()).scale(2.0);
    let z = solve_lyapunov(&neg, &bbt).map_err(|_| LinalgError::NoStabilizingGuess)?;
    let z_lu = Lu::factor(&z).map_err(|_| LinalgError::NoStabilizingGuess)?;
    let gain = z_lu.solve(b).transpose();
    let closed = shifted - &b.matmul(&gain);
    solve_lyapunov(&closed, &DenseMatrix::identity(n))
        .map_err(|_| LinalgError::NoStabilizingGuess)?;
    Ok(gain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> DenseMatrix {
        DenseMatrix::from_row_major(1, 1, vec![v])
    }

    #[test]
    fn scalar_undiscounted() {
        let p = solve_are(&scalar(-1.0), &scalar(1.0), &scalar(1.0), &scalar(1.0), 0.0).unwrap();
        assert!((p[(0, 0)] - (2.0_f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn scalar_discounted() {
        let p = solve_are(&scalar(-1.0), &scalar(1.0), &scalar(1.0), &scalar(1.0), 1.0).unwrap();
        assert!((p[(0, 0)] - (5.0_f64.sqrt() - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn no_input_reduces_to_lyapunov() {
        let a = DenseMatrix::from_rows(&[&[-1.0, 0.3], &[0.0, -2.0]]);
        let q = DenseMatrix::from_rows(&[&[2.0, 0.5], &[0.5, 1.0]]);
        let p = solve_are(&a, &DenseMatrix::zeros(2, 1), &q, &scalar(1.0), 0.0).unwrap();
        let x = solve_lyapunov(&a.transpose(), &q).unwrap();
        assert!((&p - &x).max_abs() < 1e-13);
    }

    #[test]
    fn unstable_plant_uses_stabilizing_start() {
        // a = 1: -p² + 2p + 1 = 0 → p = 1 + √2
        let p = solve_are(&scalar(1.0), &scalar(1.0), &scalar(1.0), &scalar(1.0), 0.0).unwrap();
        assert!((p[(0, 0)] - (1.0 + 2.0_f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn unstabilizable_fails() {
        let err =
            solve_are(&scalar(1.0), &scalar(0.0), &scalar(1.0), &scalar(1.0), 0.0).unwrap_err();
        assert_eq!(err, LinalgError::NoStabilizingGuess);
    }

    #[test]
    fn zero_weight_gives_zero_solution() {
        let a = DenseMatrix::from_diagonal(&[-1.0, -3.0]);
        let b = DenseMatrix::from_rows(&[&[1.0], &[1.0]]);
        let s = solve_are_detailed(&a, &b, &DenseMatrix::zeros(2, 2), &scalar(0.1), 0.0).unwrap();
        assert_eq!(s.p.max_abs(), 0.0);
        assert_eq!(s.gain.max_abs(), 0.0);
    }
}

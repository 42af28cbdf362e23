//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use super::error::{LinalgError, Result};
use super::matrix::DenseMatrix;

const MAX_SWEEPS: usize = 100;
const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenpairs of a symmetric matrix, eigenvalues nonincreasing.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub eigenvalues: Vec<f64>,
    /// Columns are orthonormal eigenvectors matching `eigenvalues`.
    pub eigenvectors: DenseMatrix,
}

impl SymEig {
    /// `Σ_{i<k} λᵢ vᵢ vᵢᵀ`.
    pub fn truncated(&self, k: usize) -> DenseMatrix {
        let n = self.eigenvectors.rows();
        let v = &self.eigenvectors;
        DenseMatrix::from_fn(n, n, |i, j| {
            (0..k)
                .map(|l| self.eigenvalues[l] * v[(i, l)] * v[(j, l)])
                .sum()
        })
    }
}

pub fn sym_eig(s: &DenseMatrix) -> Result<SymEig> {
    if !s.is_square() {
        return Err(LinalgError::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if !s.is_finite() {
        return Err(LinalgError::NonFinite("eigendecomposition input"));
    }
    let asymmetry = s.asymmetry();
    if asymmetry > SYMMETRY_TOL {
        return Err(LinalgError::NotSymmetric { asymmetry });
    }

    let n = s.rows();
    let mut a = s.symmetrize();
    let mut v = DenseMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = scale * 1e-15;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target || n < 2 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                routine: "cyclic Jacobi eigensolver",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                apply_rotation(&mut a, &mut v, p, q, c, s);
            }
        }
    }

    let diag = a.diagonal();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = DenseMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies `Jᵀ A J` for the Givens rotation J in the (p, q) plane and accumulates `V J`.
fn apply_rotation(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::norm2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_matrix_sorted() {
        let e = sym_eig(&DenseMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 2.0, 1.0]);
        assert_eq!(e.eigenvectors.column(0), vec![1.0, 0.0, 0.0]);
        assert_eq!(e.eigenvectors.column(1), vec![0.0, 0.0, 1.0]);
        assert_eq!(e.eigenvectors.column(2), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn swap_matrix() {
        let e = sym_eig(&DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.eigenvectors.column(0);
        let v1 = e.eigenvectors.column(1);
        assert!((v0[0].abs() - r).abs() < 1e-15 && (v0[0] - v0[1]).abs() < 1e-15);
        assert!((v1[0].abs() - r).abs() < 1e-15 && (v1[0] + v1[1]).abs() < 1e-15);
    }

    #[test]
    fn seeded_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = DenseMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
        let s = (&b + &b.transpose()).scale(0.5);
        let e = sym_eig(&s).unwrap();
        for k in 0..5 {
            let v = e.eigenvectors.column(k);
            let sv = s.matvec(&v);
            let r: Vec<f64> = sv
                .iter()
                .zip(&v)
                .map(|(a, b)| a - e.eigenvalues[k] * b)
                .collect();
            assert!(norm2(&r) <= 1e-8);
        }
    }

    #[test]
    fn asymmetric_rejected() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(sym_eig(&m), Err(LinalgError::NotSymmetric { .. })));
    }
}

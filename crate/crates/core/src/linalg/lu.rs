//! LU factorization with partial pivoting.

use super::error::{LinalgError, Result};
use super::matrix::DenseMatrix;

/// Packed `PA = LU` factors.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(LinalgError::Shape(format!(
                "LU needs a square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(LinalgError::NonFinite("LU input"));
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = m.max_abs().max(f64::MIN_POSITIVE);

        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pivot <= scale * f64::EPSILON * n as f64 {
                return Err(LinalgError::Singular {
                    column: k,
                    pivot: lu[(p, k)],
                });
            }
            if p != k {
                perm.swap(p, k);
                sign = -sign;
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let d = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f == 0.0 {
                    continue;
                }
                for j in (k + 1)..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn determinant(&self) -> f64 {
        self.sign * self.lu.diagonal().iter().product::<f64>()
    }

    /// `ln |det|`, safe against overflow for large matrices.
    pub fn log_abs_determinant(&self) -> f64 {
        self.lu.diagonal().iter().map(|d| d.abs().ln()).sum()
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(a, b)| a * b)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    pub fn solve(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(rhs.rows(), self.dim(), "rhs row count mismatch");
        let mut out = DenseMatrix::zeros(rhs.rows(), rhs.cols());
        for j in 0..rhs.cols() {
            out.set_column(j, &self.solve_vec(&rhs.column(j)));
        }
        out
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve(&DenseMatrix::identity(self.dim()))
    }
}

/// Solves `M X = rhs`.
pub fn lu_solve(m: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    if rhs.rows() != m.rows() {
        return Err(LinalgError::Shape(format!(
            "rhs has {} rows, matrix has {}",
            rhs.rows(),
            m.rows()
        )));
    }
    Ok(Lu::factor(m)?.solve(rhs))
}

pub fn inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(Lu::factor(m)?.inverse())
}

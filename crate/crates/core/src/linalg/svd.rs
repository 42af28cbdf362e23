//! Thin singular value decomposition by one-sided (Hestenes) Jacobi rotations.

use super::error::{LinalgError, Result};
use super::matrix::{dot, DenseMatrix};

const MAX_SWEEPS: usize = 100;
/// Sweeps stop once every column pair has cosine below this.
const OFF_TOL: f64 = 1e-12;

/// `M = left · diag(singular_values) · rightᵀ` with `min(rows, cols)` singular values.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub left_vectors: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub right_vectors: DenseMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut ls = self.left_vectors.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            for i in 0..ls.rows() {
                ls[(i, j)] *= s;
            }
        }
        ls.matmul(&self.right_vectors.transpose())
    }

    /// Number of singular values above `rel_tol * σ₁`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .take_while(|&&s| s > rel_tol * top)
            .count()
    }
}

pub fn svd(m: &DenseMatrix) -> Result<SvdResult> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(LinalgError::Shape("SVD of an empty matrix".into()));
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite("SVD input"));
    }
    if m.rows() >= m.cols() {
        tall_svd(m)
    } else {
        let t = tall_svd(&m.transpose())?;
        Ok(SvdResult {
            left_vectors: t.right_vectors,
            singular_values: t.singular_values,
            right_vectors: t.left_vectors,
        })
    }
}

/// Requires `rows >= cols`.
fn tall_svd(m: &DenseMatrix) -> Result<SvdResult> {
    let (rows, cols) = m.shape();
    let mut g: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    // columns below this squared norm hold only round-off
    let negligible = (f64::EPSILON * m.frobenius_norm()).powi(2);
    let mut converged = cols == 1;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                routine: "one-sided Jacobi SVD",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        let mut max_cos: f64 = 0.0;
        for p in 0..cols - 1 {
            for q in p + 1..cols {
                let alpha = dot(&g[p], &g[p]);
                let beta = dot(&g[q], &g[q]);
                let gamma = dot(&g[p], &g[q]);
                if alpha <= negligible || beta <= negligible || gamma == 0.0 {
                    continue;
                }
                let cos = gamma.abs() / (alpha * beta).sqrt();
                max_cos = max_cos.max(cos);
                if cos <= f64::EPSILON {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut g, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
            }
        }
        converged = max_cos <= OFF_TOL;
    }

    let sigma: Vec<f64> = g.iter().map(|col| dot(col, col).sqrt()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));

    let top = sigma[order[0]];
    let zero_tol = top * f64::EPSILON * rows as f64;
    let mut left: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut right = Vec::with_capacity(cols);
    let mut values = Vec::with_capacity(cols);
    for &j in &order {
        let s = sigma[j];
        let u = if s > zero_tol && s > 0.0 {
            g[j].iter().map(|x| x / s).collect()
        } else {
            complete_orthonormal(&left, rows)
        };
        left.push(u);
        right.push(v[j].clone());
        values.push(s);
    }

    Ok(SvdResult {
        left_vectors: DenseMatrix::from_columns(&left),
        singular_values: values,
        right_vectors: DenseMatrix::from_columns(&right),
    })
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let x = *a;
        let y = *b;
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// A unit vector orthogonal to all of `basis`, chosen among projected coordinate vectors.
pub(crate) fn complete_orthonormal(basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for b in basis {
                let proj = dot(b, &e);
                for (x, y) in e.iter_mut().zip(b) {
                    *x -= proj * y;
                }
            }
        }
        let n = dot(&e, &e).sqrt();
        if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
            best = Some((n, e));
        }
    }
    let (n, e) = best.expect("dimension is positive");
    e.into_iter().map(|x| x / n).collect()
}

//! Square-root balanced truncation.

use log::warn;

use crate::linalg::{
    normalize_column_signs, solve_lyapunov, svd, sym_eig, DenseMatrix, LinalgError,
};

use super::basis::{rebiorthogonalize, Method, ReducedBasis};
use super::pod::RANK_TOL;
use super::ReductionError;

/// Gramian eigenvalues below `-CLIP_TOL · λ_max` are reported before clipping.
const CLIP_TOL: f64 = 1e-12;

/// Reachability and observability Gramians of a stable LTI system.
#[derive(Debug, Clone)]
pub struct Gramians {
    pub reachability: DenseMatrix,
    pub observability: DenseMatrix,
}

impl Gramians {
    /// Solves `A P + P Aᵀ + B Bᵀ = 0` and `Aᵀ Q + Q A + Cᵀ C = 0`.
    pub fn compute(
        a: &DenseMatrix,
        b: &DenseMatrix,
        c: &DenseMatrix,
    ) -> Result<Self, ReductionError> {
        let map = |e: LinalgError| match e {
            LinalgError::NotStable => ReductionError::Unstable,
            other => other.into(),
        };
        let reachability = solve_lyapunov(a, &b.matmul(&b.transpose())).map_err(map)?;
        let observability = solve_lyapunov(&a.transpose(), &c.tr_matmul(c)).map_err(map)?;
        Ok(Self {
            reachability,
            observability,
        })
    }
}

/// Symmetric square root factor `F` with `F Fᵀ = G` for a numerically PSD `G`.
pub fn psd_factor(g: &DenseMatrix) -> Result<DenseMatrix, ReductionError> {
    let eig = sym_eig(&g.symmetrize())?;
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let n = g.rows();
    let mut f = eig.eigenvectors.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam < -CLIP_TOL * top {
            warn!("clipping Gramian eigenvalue {lam:e} (largest {top:e})");
        }
        let s = lam.max(0.0).sqrt();
        for i in 0..n {
            f[(i, j)] *= s;
        }
    }
    Ok(f)
}

/// `W = Υ U₁ Σ₁^{-1/2}`, `V = Φ V₁ Σ₁^{-1/2}` from the SVD `Υᵀ Φ = U Σ Vᵀ`.
pub fn bt_basis(
    a: &DenseMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
    ell: usize,
) -> Result<ReducedBasis, ReductionError> {
    let n = a.rows();
    if ell == 0 || ell > n {
        return Err(ReductionError::Shape(format!(
            "basis dimension {ell} must lie in 1..={n}"
        )));
    }
    let gram = Gramians::compute(a, b, c)?;
    bt_basis_from_gramians(&gram, ell)
}

pub fn bt_basis_from_gramians(gram: &Gramians, ell: usize) -> Result<ReducedBasis, ReductionError> {
    let phi = psd_factor(&gram.reachability)?;
    let upsilon = psd_factor(&gram.observability)?;
    let hankel = svd(&upsilon.tr_matmul(&phi))?;
    let sigma = &hankel.singular_values;
    let top = sigma[0];
    if ell > sigma.len() || !(top > 0.0) || sigma[ell - 1] < RANK_TOL * top {
        return Err(ReductionError::RankDeficient {
            requested: ell,
            rank: hankel.numerical_rank(RANK_TOL),
        });
    }

    let n = phi.rows();
    let mut w = upsilon.matmul(&hankel.left_vectors.leading_columns(ell));
    let mut v = phi.matmul(&hankel.right_vectors.leading_columns(ell));
    for j in 0..ell {
        let s = 1.0 / sigma[j].sqrt();
        for i in 0..n {
            w[(i, j)] *= s;
            v[(i, j)] *= s;
        }
    }
    let signs = normalize_column_signs(&mut v);
    for (j, s) in signs.iter().enumerate() {
        if *s < 0.0 {
            for i in 0..n {
                w[(i, j)] = -w[(i, j)];
            }
        }
    }
    let w = rebiorthogonalize(&v, &w)?;
    ReducedBasis::new(v, w, hankel.singular_values, Method::Bt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lu_solve;
    use crate::models::{build_advection_diffusion, Interval};

    fn scalar(v: f64) -> DenseMatrix {
        DenseMatrix::from_row_major(1, 1, vec![v])
    }

    #[test]
    fn scalar_system() {
        let g = Gramians::compute(&scalar(-1.0), &scalar(1.0), &scalar(1.0)).unwrap();
        assert!((g.reachability[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((g.observability[(0, 0)] - 0.5).abs() < 1e-15);
        let b = bt_basis(&scalar(-1.0), &scalar(1.0), &scalar(1.0), 1).unwrap();
        assert!((b.singular_values[0] - 0.5).abs() < 1e-15);
        assert!((b.w[(0, 0)] * b.v[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unreachable_system_fails() {
        let a = DenseMatrix::from_diagonal(&[-1.0, -2.0]);
        let err = bt_basis(
            &a,
            &DenseMatrix::zeros(2, 1),
            &DenseMatrix::row_vector(&[1.0, 1.0]),
            1,
        )
        .unwrap_err();
        assert!(matches!(err, ReductionError::RankDeficient { .. }));
    }

    #[test]
    fn unstable_system_fails() {
        let a = DenseMatrix::from_diagonal(&[1.0, -2.0]);
        let b = DenseMatrix::column_vector(&[1.0, 1.0]);
        let c = DenseMatrix::row_vector(&[1.0, 1.0]);
        assert!(matches!(
            bt_basis(&a, &b, &c, 1),
            Err(ReductionError::Unstable)
        ));
    }

    #[test]
    fn balanced_gramians_are_diagonal() {
        let sys = build_advection_diffusion(
            31,
            0.2,
            2.0,
            Interval::new(-0.5, -0.1),
            Interval::new(0.1, 0.6),
        )
        .unwrap();
        let basis = bt_basis(&sys.a, &sys.b, &sys.c, 3).unwrap();
        let g = Gramians::compute(&sys.a, &sys.b, &sys.c).unwrap();
        // Wᵀ P̃ W = Vᵀ Q̃ V = Σ₁
        let p = basis.w.tr_matmul(&g.reachability.matmul(&basis.w));
        let q = basis.v.tr_matmul(&g.observability.matmul(&basis.v));
        for i in 0..3 {
            let s = basis.singular_values[i];
            assert!(
                (p[(i, i)] - s).abs() < 1e-8 * s,
                "{i}: {} vs {s}",
                p[(i, i)]
            );
            assert!((q[(i, i)] - s).abs() < 1e-8 * s);
        }
        assert!(basis.biorthogonality_error() < 1e-10);
    }

    #[test]
    fn dc_gain_within_error_bound() {
        let sys = build_advection_diffusion(
            61,
            0.2,
            2.0,
            Interval::new(-0.5, -0.1),
            Interval::new(0.1, 0.6),
        )
        .unwrap();
        let ell = 4;
        let basis = bt_basis(&sys.a, &sys.b, &sys.c, ell).unwrap();
        let full = sys.c.matmul(&lu_solve(&sys.a.scale(-1.0), &sys.b).unwrap())[(0, 0)];
        let ar = basis.w.tr_matmul(&sys.a.matmul(&basis.v));
        let br = basis.w.tr_matmul(&sys.b);
        let cr = sys.c.matmul(&basis.v);
        let red = cr.matmul(&lu_solve(&ar.scale(-1.0), &br).unwrap())[(0, 0)];
        let bound: f64 = 2.0 * basis.singular_values[ell..].iter().sum::<f64>();
        assert!((full - red).abs() <= bound, "{full} {red} {bound}");
    }
}

use crate::linalg::{normalize_column_signs, sym_eig, DenseMatrix};

use super::basis::{Method, ReducedBasis};
use super::ReductionError;

/// Dominant eigenvectors of the Riccati solution `P = Ψ Σ Ψᵀ`.
pub fn riccati_basis(p: &DenseMatrix, ell: usize) -> Result<ReducedBasis, ReductionError> {
    let n = p.rows();
    if ell == 0 || ell > n {
        return Err(ReductionError::Shape(format!(
            "basis dimension {ell} must lie in 1..={n}"
        )));
    }
    let eig = sym_eig(&p.symmetrize())?;
    let mut v = eig.eigenvectors.leading_columns(ell);
    normalize_column_signs(&mut v);
    ReducedBasis::new(v.clone(), v, eig.eigenvalues, Method::Ricc)
}

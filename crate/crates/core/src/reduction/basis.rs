use std::fmt;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use crate::io::{write_csv_row, write_file, IoError};
use crate::linalg::{lu_solve, DenseMatrix};

use super::ReductionError;

/// Which construction produced a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Pod,
    PodAdj,
    Bt,
    Ricc,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pod, Method::PodAdj, Method::Bt, Method::Ricc];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pod => "POD",
            Method::PodAdj => "PODadj",
            Method::Bt => "BT",
            Method::Ricc => "Ricc",
        }
    }

    /// Galerkin methods use `W = V`.
    pub fn is_galerkin(self) -> bool {
        !matches!(self, Method::Bt)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pod" => Ok(Method::Pod),
            "podadj" | "pod-adj" | "pod_adj" => Ok(Method::PodAdj),
            "bt" => Ok(Method::Bt),
            "ricc" | "riccati" => Ok(Method::Ricc),
            other => Err(format!("unknown reduction method `{other}`")),
        }
    }
}

/// Petrov-Galerkin pair with `Wᵀ V = I`.
#[derive(Debug, Clone)]
pub struct ReducedBasis {
    /// Trial basis, `n × ℓ`.
    pub v: DenseMatrix,
    /// Test basis, `n × ℓ`.
    pub w: DenseMatrix,
    /// Method-specific spectrum: snapshot σ's, Hankel σ's or eigenvalues of P.
    pub singular_values: Vec<f64>,
    pub method: Method,
}

impl ReducedBasis {
    pub const BIORTHOGONALITY_TOL: f64 = 1e-10;

    /// Checks shapes and `Wᵀ V = I`.
    pub fn new(
        v: DenseMatrix,
        w: DenseMatrix,
        singular_values: Vec<f64>,
        method: Method,
    ) -> Result<Self, ReductionError> {
        if v.shape() != w.shape() || v.cols() == 0 || v.cols() > v.rows() {
            return Err(ReductionError::Shape(format!(
                "V is {:?}, W is {:?}",
                v.shape(),
                w.shape()
            )));
        }
        let basis = Self {
            v,
            w,
            singular_values,
            method,
        };
        let err = basis.biorthogonality_error();
        if !(err <= Self::BIORTHOGONALITY_TOL) {
            return Err(ReductionError::NotBiorthogonal(err));
        }
        Ok(basis)
    }

    /// `V = W = I_n`.
    pub fn identity(n: usize, method: Method) -> Self {
        Self {
            v: DenseMatrix::identity(n),
            w: DenseMatrix::identity(n),
            singular_values: vec![1.0; n],
            method,
        }
    }

    pub fn full_dim(&self) -> usize {
        self.v.rows()
    }

    pub fn dim(&self) -> usize {
        self.v.cols()
    }

    /// `max |Wᵀ V - I|`.
    pub fn biorthogonality_error(&self) -> f64 {
        (&self.w.tr_matmul(&self.v) - &DenseMatrix::identity(self.dim())).max_abs()
    }

    /// `Wᵀ x`.
    pub fn reduce(&self, x: &[f64]) -> Vec<f64> {
        self.w.tr_matvec(x)
    }

    /// `V y`.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        self.v.matvec(y)
    }

    /// One column per trial basis vector, header `v_1..v_ℓ`.
    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        write_matrix_csv(w, &self.v, "v")
    }

    /// Same layout for the test basis, header `w_1..w_ℓ`.
    pub fn write_test_csv(&self, w: &mut impl Write) -> io::Result<()> {
        write_matrix_csv(w, &self.w, "w")
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), IoError> {
        write_file(path, |w| self.write_csv(w))
    }
}

fn write_matrix_csv(w: &mut impl Write, m: &DenseMatrix, prefix: &str) -> io::Result<()> {
    let header: Vec<String> = (1..=m.cols()).map(|j| format!("{prefix}_{j}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for i in 0..m.rows() {
        write_csv_row(w, m.row(i).iter().copied())?;
    }
    Ok(())
}

/// Replaces `W` by `W (Vᵀ W)⁻¹`, restoring `Wᵀ V = I` after round-off.
pub(crate) fn rebiorthogonalize(
    v: &DenseMatrix,
    w: &DenseMatrix,
) -> Result<DenseMatrix, ReductionError> {
    let vtw = v.tr_matmul(w);
    // W (VᵀW)⁻¹ = ((VᵀW)⁻ᵀ Wᵀ)ᵀ
    let corrected_t = lu_solve(&vtw.transpose(), &w.transpose())?;
    Ok(corrected_t.transpose())
}

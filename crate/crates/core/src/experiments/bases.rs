use std::cell::OnceCell;

use crate::linalg::DenseMatrix;
use crate::models::ControlSystem;
use crate::reduction::{
    adjoint_basis_from_snapshots, adjoint_snapshots, bt_basis_from_gramians, pod_basis,
    riccati_basis, state_snapshots, Gramians, Method, ReducedBasis, ReductionError,
    SnapshotSettings,
};

use super::lqr::{run_lqr_reference, LqrReference};

/// Builds bases of any dimension for one system, computing snapshots, Gramians
/// and the Riccati solution at most once.
///
/// Balanced truncation and the Riccati basis use the linear part of the system.
pub struct BasisFactory<'a> {
    sys: &'a ControlSystem,
    settings: SnapshotSettings,
    states: OnceCell<DenseMatrix>,
    adjoints: OnceCell<DenseMatrix>,
    gramians: OnceCell<Gramians>,
    lqr: OnceCell<LqrReference>,
}

impl<'a> BasisFactory<'a> {
    pub fn new(sys: &'a ControlSystem, settings: SnapshotSettings) -> Self {
        Self {
            sys,
            settings,
            states: OnceCell::new(),
            adjoints: OnceCell::new(),
            gramians: OnceCell::new(),
            lqr: OnceCell::new(),
        }
    }

    /// Seeds the factory with an existing Riccati solution.
    pub fn with_lqr(self, lqr: LqrReference) -> Self {
        let _ = self.lqr.set(lqr);
        self
    }

    fn snapshot_input(t: f64) -> Vec<f64> {
        vec![t.sin()]
    }

    pub fn lqr(&self) -> Result<&LqrReference, ReductionError> {
        if self.lqr.get().is_none() {
            let lqr = run_lqr_reference(&self.sys.linear_part())?;
            let _ = self.lqr.set(lqr);
        }
        Ok(self.lqr.get().expect("set above"))
    }

    fn cached<T>(
        cell: &OnceCell<T>,
        make: impl FnOnce() -> Result<T, ReductionError>,
    ) -> Result<&T, ReductionError> {
        if cell.get().is_none() {
            let value = make()?;
            let _ = cell.set(value);
        }
        Ok(cell.get().expect("set above"))
    }

    pub fn basis(&self, method: Method, ell: usize) -> Result<ReducedBasis, ReductionError> {
        let sys = self.sys;
        match method {
            Method::Pod => {
                let y = Self::cached(&self.states, || {
                    state_snapshots(sys, &Self::snapshot_input, &self.settings)
                })?;
                pod_basis(y, ell)
            }
            Method::PodAdj => {
                let p = Self::cached(&self.adjoints, || {
                    adjoint_snapshots(sys, &Self::snapshot_input, &self.settings)
                })?;
                adjoint_basis_from_snapshots(p, ell)
            }
            Method::Bt => {
                let g = Self::cached(&self.gramians, || Gramians::compute(&sys.a, &sys.b, &sys.c))?;
                bt_basis_from_gramians(g, ell)
            }
            Method::Ricc => riccati_basis(&self.lqr()?.p, ell),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_burgers, Interval};

    #[test]
    fn all_methods_biorthogonal_on_burgers() {
        let sys = build_burgers(21, 0.2, 5.0, Interval::new(-0.7, -0.5))
            .unwrap()
            .with_output_cost(100.0, 0.1, 1.0);
        let mut settings = SnapshotSettings::standard(21);
        settings.dt_sim = 1e-3;
        let f = BasisFactory::new(&sys, settings);
        for m in Method::ALL {
            for ell in 1..=3 {
                let b = f.basis(m, ell).unwrap();
                assert_eq!(b.method, m);
                assert!(b.biorthogonality_error() <= 1e-10);
            }
        }
    }
}

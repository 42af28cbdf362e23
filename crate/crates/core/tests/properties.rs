use proptest::prelude::*;

use hjb_mor::hjb::{ControlSet, ValueGrid};
use hjb_mor::linalg::{svd, DenseMatrix};
use hjb_mor::reduction::pod_basis;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-1.0f64..1.0, rows * cols)
        .prop_map(move |data| DenseMatrix::from_row_major(rows, cols, data))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn svd_reconstructs_with_sorted_nonnegative_values(m in matrix(7, 5)) {
        let s = svd(&m).unwrap();
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.singular_values.iter().all(|v| *v >= 0.0));
        let err = (&s.reconstruct() - &m).frobenius_norm();
        prop_assert!(err <= 1e-12 * (1.0 + m.frobenius_norm()));
    }

    #[test]
    fn pod_basis_orthonormal(m in matrix(9, 6), ell in 1usize..=4) {
        let b = pod_basis(&m, ell).unwrap();
        prop_assert!(b.biorthogonality_error() <= 1e-10);
        prop_assert_eq!(b.dim(), ell);
    }

    #[test]
    fn interpolation_bounded_by_node_values(
        values in prop::collection::vec(-5.0f64..5.0, 16),
        x in -2.0f64..2.0,
        y in -2.0f64..2.0,
    ) {
        let mut grid = ValueGrid::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![4, 4]).unwrap();
        grid.values = values.clone();
        let v = grid.interpolate(&[x, y]);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }

    #[test]
    fn uniform_controls_hit_endpoints(lo in -5.0f64..0.0, width in 0.1f64..10.0, count in 2usize..60) {
        let hi = lo + width;
        let u = ControlSet::uniform(lo, hi, count).unwrap();
        prop_assert_eq!(u.len(), count);
        prop_assert_eq!(u.get(0)[0], lo);
        prop_assert_eq!(u.get(count - 1)[0], hi);
    }
}

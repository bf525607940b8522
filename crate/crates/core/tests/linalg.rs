use bellforge_core::linalg::{frob_inner, herm_eig, kron, HermitianOperator, Matrix};
use bellforge_core::C64;
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| Matrix::new(n, n, v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = HermitianOperator> {
    matrix(n).prop_map(|m| HermitianOperator::symmetrized(&m + &m.adjoint()))
}

proptest! {
    #[test]
    fn eigendecomposition_reconstructs(h in (2usize..6).prop_flat_map(hermitian)) {
        let e = herm_eig(&h).unwrap();
        let back = e.map_spectrum(|l| l);
        prop_assert!((back.matrix() - h.matrix()).max_abs() < 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let vv = &e.vectors.adjoint() * &e.vectors;
        prop_assert!((&vv - &Matrix::identity(h.dim())).max_abs() < 1e-10);
    }

    #[test]
    fn kron_is_associative(a in matrix(2), b in matrix(2), c in matrix(2)) {
        let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert!((&left - &right).max_abs() < 1e-12);
    }

    #[test]
    fn kron_is_bilinear(a in matrix(2), a2 in matrix(2), b in matrix(3), k in -3.0f64..3.0) {
        let sum = kron(&(&a + &a2.scale_real(k)), &b).unwrap();
        let parts = &kron(&a, &b).unwrap() + &kron(&a2, &b).unwrap().scale_real(k);
        prop_assert!((&sum - &parts).max_abs() < 1e-12);
    }

    #[test]
    fn frobenius_inner_is_symmetric(a in hermitian(3), b in hermitian(3)) {
        let ab = frob_inner(&a, &b).unwrap();
        prop_assert!((ab - frob_inner(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(frob_inner(&a, &a).unwrap() >= 0.0);
    }
}

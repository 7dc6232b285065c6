use epmono::calg::{csqrt_principal, BranchState, ComplexTriple};
use epmono::ham2::{biorthonormality_error, classify, eigensystem, left_residual, residual, Branch, DegeneracyLabel, Hamiltonian2};
use num_complex::Complex;
use proptest::prelude::*;

type C = Complex<f64>;

fn cplx() -> impl Strategy<Value = C> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| C::new(a, b))
}

fn triple() -> impl Strategy<Value = ComplexTriple<f64>> {
    (cplx(), cplx(), cplx()).prop_map(|(x, y, z)| ComplexTriple::new(x, y, z))
}

fn regular(r: &ComplexTriple<f64>) -> bool {
    csqrt_principal(r.dot(r)).norm() > 1e-3 * r.norm().max(1e-300)
}

proptest! {
    #[test]
    fn trace_and_determinant(l0 in cplx(), r in triple()) {
        prop_assume!(regular(&r));
        let es = eigensystem(&Hamiltonian2::from_xyz(l0, r), BranchState::principal()).unwrap();
        let r2 = r.dot(&r);
        prop_assert!((es.lambda_plus + es.lambda_minus - l0 * 2.0).norm() < 1e-12 * (1.0 + l0.norm()));
        let det = l0 * l0 - r2;
        prop_assert!((es.lambda_plus * es.lambda_minus - det).norm() < 1e-12 * (1.0 + det.norm() + r2.norm()));
    }

    #[test]
    fn eigenvectors_are_biorthonormal(l0 in cplx(), r in triple()) {
        prop_assume!(regular(&r));
        let h = Hamiltonian2::from_xyz(l0, r);
        let es = eigensystem(&h, BranchState::principal()).unwrap();
        let scale = 1.0 + h.matrix.norm();
        for b in [Branch::Plus, Branch::Minus] {
            prop_assert!(residual(&h, &es.ket(b), es.eigenvalue(b)) < 1e-10 * scale);
            prop_assert!(left_residual(&h, &es.bra(b), es.eigenvalue(b)) < 1e-10 * scale);
        }
        prop_assert!(biorthonormality_error(&es) < 1e-10);
    }

    #[test]
    fn hermitian_left_vectors_are_adjoints(x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64, l0 in -2.0..2.0f64) {
        let r = ComplexTriple::real(x, y, z);
        prop_assume!(r.norm() > 1e-3);
        let es = eigensystem(&Hamiltonian2::from_xyz(C::from(l0), r), BranchState::principal()).unwrap();
        for b in [Branch::Plus, Branch::Minus] {
            let (u, ut) = (es.ket(b), es.bra(b));
            prop_assert!((ut[0] - u[0].conj()).norm() < 1e-12);
            prop_assert!((ut[1] - u[1].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn classification_is_scale_invariant(r in triple(), s in cplx(), u in cplx(), v in cplx()) {
        prop_assume!(s.norm() > 0.1 && r.norm() > 1e-3);
        let base = classify(&r, None).label;
        prop_assert_eq!(classify(&(r * s), None).label, base);
        // exceptional direction (u, v, i√(u² + v²))
        let w = C::i() * csqrt_principal(u * u + v * v);
        let ep = ComplexTriple::new(u, v, w);
        prop_assume!(ep.norm() > 1e-3);
        prop_assert_eq!(classify(&ep, None).label, DegeneracyLabel::ExceptionalPoint);
        prop_assert_eq!(classify(&(ep * s), None).label, DegeneracyLabel::ExceptionalPoint);
    }
}

use std::f64::consts::PI;

use epmono::calg::{cdot, clog_unwrapped, csqrt_path, csqrt_principal, BranchState, ComplexTriple};
use num_complex::Complex;
use proptest::prelude::*;

type C = Complex<f64>;

fn cplx() -> impl Strategy<Value = C> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| C::new(a, b))
}

fn triple() -> impl Strategy<Value = ComplexTriple<f64>> {
    (cplx(), cplx(), cplx()).prop_map(|(x, y, z)| ComplexTriple::new(x, y, z))
}

proptest! {
    #[test]
    fn cdot_is_bilinear(a in triple(), b in triple(), c in triple(), s in cplx()) {
        let lhs = cdot(&(a * s + b), &c);
        let rhs = s * cdot(&a, &c) + cdot(&b, &c);
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn lagrange_identity(a in triple(), b in triple()) {
        let ab = a.cross(&b);
        let lhs = cdot(&ab, &ab);
        let rhs = cdot(&a, &a) * cdot(&b, &b) - cdot(&a, &b) * cdot(&a, &b);
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn principal_root_squares_back(z in cplx()) {
        let s = csqrt_principal(z);
        prop_assert!((s * s - z).norm() <= 1e-12 * z.norm().max(1.0));
        prop_assert!(s.re > 0.0 || (s.re == 0.0 && s.im >= 0.0));
    }

    #[test]
    fn continued_root_on_loops(cx in -2.0..2.0f64, cy in -2.0..2.0f64, r in 0.1..1.0f64) {
        let centre = C::new(cx, cy);
        prop_assume!((centre.norm() - r).abs() > 0.05);
        let f = |s: f64| centre + C::from_polar(r, s);
        let start = csqrt_principal(f(0.0));
        let (vals, _) = csqrt_path(f, 0.0, 2.0 * PI, 256, BranchState::at(start)).unwrap();
        let end = *vals.last().unwrap();
        let expect = if centre.norm() < r { -start } else { start };
        prop_assert!((end - expect).norm() < 1e-10, "end {end} expected {expect}");
    }

    #[test]
    fn unwrapped_log_exponentiates_back(steps in prop::collection::vec((-3.0..3.0f64, 0.5..2.0f64), 2..40)) {
        let mut arg = 0.0;
        let series: Vec<C> = steps
            .iter()
            .map(|&(d, m)| {
                arg += d;
                C::from_polar(m, arg)
            })
            .collect();
        let logs = clog_unwrapped(&series).unwrap();
        for (l, z) in logs.iter().zip(&series) {
            prop_assert!((l.exp() - z).norm() <= 1e-12 * z.norm());
        }
        let winding = logs.last().unwrap().im - logs[0].im;
        prop_assert!((winding - (arg - steps[0].0)).abs() < 1e-9);
    }
}

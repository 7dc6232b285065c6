use epmono::calg::{BranchState, ComplexTriple};
use epmono::monopole::{connection, field_and_potential, flux_solid_angle, Chart, MonopoleModel, SphereCap};
use num_complex::Complex;
use proptest::prelude::*;

type C = Complex<f64>;

fn point(p: [f64; 3]) -> ComplexTriple<f64> {
    ComplexTriple::real(p[0], p[1], p[2])
}

fn models() -> impl Strategy<Value = MonopoleModel<f64>> {
    prop_oneof![
        Just(MonopoleModel::dirac()),
        (0.3..2.0f64).prop_map(|e| MonopoleModel::complex_dirac(e).unwrap()),
    ]
}

fn coords() -> impl Strategy<Value = [f64; 3]> {
    [-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64]
}

fn phi_at(m: &MonopoleModel<f64>, p: [f64; 3]) -> C {
    field_and_potential(&point(p), m, BranchState::principal()).unwrap().phi
}

fn gradient(f: impl Fn([f64; 3]) -> C, p: [f64; 3]) -> [C; 3] {
    let h = 1e-5;
    let mut g = [C::new(0.0, 0.0); 3];
    for (k, gk) in g.iter_mut().enumerate() {
        let (mut a, mut b) = (p, p);
        a[k] += h;
        b[k] -= h;
        *gk = (f(a) - f(b)) / (2.0 * h);
    }
    g
}

/// Keeps points away from the singular set and the branch disk.
fn regular(m: &MonopoleModel<f64>, p: [f64; 3]) -> bool {
    let eps = m.epsilon();
    let s = (p[0] * p[0] + p[1] * p[1]).sqrt();
    let far = match field_and_potential(&point(p), m, BranchState::principal()) {
        Ok(f) => f.big_r.norm() > 0.3,
        Err(_) => false,
    };
    far && (eps == 0.0 || p[2].abs() > 0.05 || s > eps + 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_is_minus_gradient_of_potential(m in models(), p in coords()) {
        prop_assume!(regular(&m, p));
        let b = field_and_potential(&point(p), &m, BranchState::principal()).unwrap().b.to_array();
        let g = gradient(|x| phi_at(&m, x), p);
        for k in 0..3 {
            prop_assert!((b[k] + g[k]).norm() < 1e-6 * (1.0 + b[k].norm()), "component {k}");
        }
    }

    #[test]
    fn hyperbolic_field_is_eta_gradient(p in coords()) {
        let m = MonopoleModel::hyperbolic();
        let r2 = p[0] * p[0] + p[1] * p[1] - p[2] * p[2];
        prop_assume!(r2.abs() > 0.3);
        let b = field_and_potential(&point(p), &m, BranchState::principal()).unwrap().b.to_array();
        let g = gradient(|x| phi_at(&m, x), p);
        let eta = [1.0, 1.0, -1.0];
        for k in 0..3 {
            prop_assert!((b[k] - g[k] * eta[k]).norm() < 1e-6 * (1.0 + b[k].norm()), "component {k}");
        }
    }

    #[test]
    fn curl_of_connection_is_field(m in models(), p in coords()) {
        prop_assume!(regular(&m, p) && p[0] * p[0] + p[1] * p[1] > 0.1);
        let comp = |x: [f64; 3], k: usize| connection(&point(x), &m, Chart::North).unwrap().components.to_array()[k];
        let d = |k: usize, j: usize| gradient(|x| comp(x, k), p)[j];
        let curl = [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)];
        let b = field_and_potential(&point(p), &m, BranchState::principal()).unwrap().b.to_array();
        for k in 0..3 {
            prop_assert!((curl[k] - b[k]).norm() < 1e-6 * (1.0 + b[k].norm()), "component {k}");
        }
    }

    #[test]
    fn charts_differ_by_two_q(m in models(), p in coords()) {
        prop_assume!(regular(&m, p) && p[0] * p[0] + p[1] * p[1] > 0.1);
        let north = connection(&point(p), &m, Chart::North).unwrap().a_phi;
        let south = connection(&point(p), &m, Chart::South).unwrap().a_phi;
        prop_assert!((north - south - m.q * 2.0).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stokes_on_sphere_caps(
        radius in 0.5..3.0f64,
        axis in [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64],
        half_angle in 0.2..2.9f64,
    ) {
        prop_assume!(axis.iter().map(|a| a * a).sum::<f64>() > 0.05);
        let m = MonopoleModel::dirac();
        let cap = SphereCap { radius, axis, half_angle };
        let f = flux_solid_angle(&cap, &m, Chart::Auto).unwrap();
        let expect = m.q * cap.solid_angle();
        prop_assert!((f.surface - expect).norm() < 1e-6, "{} vs {expect}", f.surface);
        // a cap holding both poles has no regular chart: ∮A is fixed mod 4πq
        let n = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        let theta = (axis[2] / n).acos();
        let both_poles = theta < half_angle && std::f64::consts::PI - theta < half_angle;
        let mut gap = (f.boundary - expect) / (m.q * 4.0 * std::f64::consts::PI);
        if both_poles {
            gap = gap - gap.re.round();
        }
        prop_assert!(gap.norm() < 1e-6, "{} vs {expect}", f.boundary);
    }
}

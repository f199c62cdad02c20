use num_complex::Complex;
use proptest::prelude::*;
use pseudoconvex::field::Jet3;
use pseudoconvex::levi::{
    delta_tau_jet, graph_levi_jet, levi_condition_2d, tau_of_jet, Classification, Graph3,
    GraphDefining, Poly3,
};
use pseudoconvex::mollify::make_kernel;
use pseudoconvex::potential::{build_square_cantor, frostman_measure, GreenPotential};
use pseudoconvex::staircase::{build_cantor, default_alphas, fat_f, FatF};

fn symmetric() -> impl Strategy<Value = [[f64; 3]; 3]> {
    prop::array::uniform6(-3.0..3.0f64)
        .prop_map(|v| [[v[0], v[1], v[2]], [v[1], v[3], v[4]], [v[2], v[4], v[5]]])
}

fn jet() -> impl Strategy<Value = Jet3<f64>> {
    (prop::array::uniform3(-2.0..2.0f64), symmetric()).prop_map(|(grad, hess)| Jet3 { grad, hess })
}

proptest! {
    #[test]
    fn graph_form_equals_minus_delta_tau(j in jet()) {
        let g = graph_levi_jet(&j).unwrap();
        let d = delta_tau_jet(&j.hess, &tau_of_jet(&j)).unwrap();
        prop_assert!((g + d).abs() <= 1e-9 * (1.0 + g.abs()));
    }

    #[test]
    fn levi_form_scales_linearly_with_hessian(j in jet(), s in 0.1..4.0f64) {
        let scaled = Jet3 { grad: j.grad, hess: j.hess.map(|r| r.map(|v| s * v)) };
        let (a, b) = (graph_levi_jet(&j).unwrap(), graph_levi_jet(&scaled).unwrap());
        prop_assert!((b - s * a).abs() <= 1e-9 * (1.0 + b.abs()));
    }

    #[test]
    fn graph_route_matches_ambient_defining_function(
        c in prop::array::uniform4(-2.0..2.0f64),
        xi in prop::array::uniform3(-0.5..0.5f64),
    ) {
        let phi = Poly3::new(vec![
            (c[0], [0, 2, 0]), (c[1], [0, 0, 2]), (c[2], [1, 1, 0]), (c[3], [0, 1, 1]),
        ]);
        let graph = graph_levi_jet(&phi.jet(xi)).unwrap();
        let z = [Complex::new(phi.value(xi), xi[0]), Complex::new(xi[1], xi[2])];
        let ambient = levi_condition_2d(&GraphDefining::new(phi), z, 1e-12).unwrap();
        prop_assert!((graph - ambient).abs() <= 1e-9 * (1.0 + graph.abs()));
    }

    #[test]
    fn classification_agrees_with_sign(v in -1.0..1.0f64, tol in 0.0..0.5f64) {
        let c = Classification::of(v, tol);
        match c {
            Classification::NearZero { .. } => prop_assert!(v.abs() <= tol),
            Classification::PseudoconvexOk => prop_assert!(v > tol),
            Classification::Violating => prop_assert!(v < -tol),
        }
    }

    #[test]
    fn discrete_kernel_is_symmetric_with_unit_mass(ratio in 2.0..5.0f64) {
        let h = 1.0 / 64.0;
        let k = make_kernel(ratio * h, h).unwrap();
        prop_assert!((k.mass() - 1.0).abs() <= 1e-12);
        let w = k.weights();
        for &(o, v) in w {
            let mirrored = w.iter().find(|(p, _)| *p == [-o[0], -o[1], -o[2]]).map(|p| p.1);
            prop_assert_eq!(mirrored, Some(v));
        }
    }

    #[test]
    fn fat_f_second_derivative_is_two_valued(alpha1 in 0.2..0.95f64, x in 0.0..1.0f64) {
        let system = build_cantor(&default_alphas(alpha1, 8), 8).unwrap();
        let f: FatF<f64> = fat_f(&system, 8).unwrap();
        let s = f.second(x);
        prop_assert!(s == -1.0 || s > 0.0);
        prop_assert!((f.first(x) - (f.staircase(x) - x)).abs() <= 1e-12);
        prop_assert!(f.first(0.0).abs() <= 1e-12 && f.first(1.0).abs() <= 1e-12);
        prop_assert!(f.profile().value(0.0).abs() <= 1e-12);
        prop_assert!(f.profile().value(1.0).abs() <= 1e-12);
    }

    #[test]
    fn frostman_refinement_conserves_mass(alpha in 0.3..1.5f64, n in 1usize..6) {
        let set = build_square_cantor(alpha, n).unwrap();
        let mu = frostman_measure(&set);
        prop_assert!((mu.total_mass() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(mu.atoms().len(), 1usize << (2 * n));
    }

    #[test]
    fn green_potential_vanishes_on_circle_and_is_positive_inside(
        t in 0.0..std::f64::consts::TAU,
        r in 0.05..0.99f64,
    ) {
        let set = build_square_cantor(1.0, 3).unwrap();
        let u = GreenPotential::new(frostman_measure(&set)).unwrap();
        prop_assert!(u.value(Complex::from_polar(1.0, t)).abs() <= 1e-12);
        let z = Complex::from_polar(r, t);
        if set.distance(z) > 1e-6 {
            prop_assert!(u.value(z) > 0.0);
        }
    }
}

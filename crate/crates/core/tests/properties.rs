use polarlab_core::lifting::LiftedBody;
use polarlab_core::polar_integrals::{kappa, phi_sphere, Exponent, SphereQuadrature};
use polarlab_core::santalo::Hyperplane;
use polarlab_core::transforms::{log_polar, s_polar};
use polarlab_core::{Concavity, FunctionSpec};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

fn point(d: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, d)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn hhat_is_self_polar(d in 1usize..=3, s in 0.3f64..6.0, y in point(3, 0.8)) {
        let y = &y[..d];
        let f = FunctionSpec::hhat(d, s).unwrap();
        let want = (1.0 - norm(y).powi(2)).max(0.0).powf(s / 2.0);
        prop_assert!((s_polar(&f, s, y).unwrap() - want).abs() <= 1e-6);
    }

    #[test]
    fn ball_polar_closed_form(d in 1usize..=3, s in 0.3f64..6.0, r in 0.2f64..2.0, y in point(3, 1.5)) {
        let y = &y[..d];
        let f = FunctionSpec::ball(vec![0.0; d], r, Concavity::SConcave(s)).unwrap();
        let want = (1.0 - r * norm(y)).max(0.0).powf(s);
        prop_assert!((s_polar(&f, s, y).unwrap() - want).abs() <= 1e-6);
    }

    #[test]
    fn shifted_gaussian_log_polar(c in point(2, 1.0), y in point(2, 2.0)) {
        let g = FunctionSpec::gaussian(c.clone(), 1.0).unwrap();
        let cy: f64 = c.iter().zip(&y).map(|(a, b)| a * b).sum();
        let want = (-cy - 0.5 * norm(&y).powi(2)).exp();
        prop_assert!((log_polar(&g, &y).unwrap() / want - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn polar_reverses_order(s in 0.5f64..4.0, y in point(2, 1.4)) {
        let class = Concavity::SConcave(s);
        let small = FunctionSpec::ball(vec![0.1, -0.1], 0.5, class).unwrap();
        let big = FunctionSpec::box_indicator(&[-1.0, -1.0], &[1.0, 1.0], class).unwrap();
        prop_assert!(s_polar(&small, s, &y).unwrap() >= s_polar(&big, s, &y).unwrap() - 1e-12);
    }

    #[test]
    fn kappa_product_identity(d in 1usize..=6, s in 0.1f64..20.0) {
        let k = kappa(d, s);
        prop_assert!((kappa(1, s) * kappa(d - 1, s + 1.0) / k - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn lifted_support_shift_covariance(z in point(2, 0.4), u in point(3, 1.0)) {
        prop_assume!(norm(&u) > 0.1);
        let u: Vec<f64> = u.iter().map(|x| x / norm(&u)).collect();
        let f = FunctionSpec::ball(vec![0.0, 0.0], 1.0, Concavity::SConcave(1.5)).unwrap();
        let a = LiftedBody::new(f.clone(), 1.5, vec![0.0, 0.0]).unwrap();
        let b = LiftedBody::new(f.centered_at(&z).unwrap(), 1.5, vec![0.0, 0.0]).unwrap();
        let want = a.support(&u).unwrap() - z[0] * u[0] - z[1] * u[1];
        prop_assert!((b.support(&u).unwrap() - want).abs() <= 1e-9);
    }

    #[test]
    fn interval_phi_is_midpoint_convex(s in 0.5f64..5.0, a in -0.9f64..0.9, b in -0.9f64..0.9) {
        let f = FunctionSpec::box_indicator(&[-1.0], &[1.0], Concavity::SConcave(s)).unwrap();
        let q = SphereQuadrature::new(1, s).unwrap();
        let phi = |z: f64| phi_sphere(&f, s, &[z], &q).unwrap().value;
        let (pa, pb, pm) = (phi(a), phi(b), phi(0.5 * (a + b)));
        prop_assert!(pm <= 0.5 * (pa + pb) * (1.0 + 1e-10));
        let p = -1.0 / (1.0 + s);
        prop_assert!(pm.powf(p) >= 0.5 * (pa.powf(p) + pb.powf(p)) * (1.0 - 1e-10));
    }

    #[test]
    fn spec_json_round_trip(c in point(3, 2.0), r in 0.1f64..3.0, d in 1usize..=3) {
        let f = FunctionSpec::ball(c[..d].to_vec(), r, Concavity::SConcave(2.0)).unwrap();
        let g = FunctionSpec::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(f.to_json(), g.to_json());
    }

    #[test]
    fn exponent_parse(s in 0.01f64..1e6) {
        prop_assert_eq!(Exponent::parse(&s.to_string()).unwrap(), Exponent::Finite(s));
    }

    #[test]
    fn hyperplane_normalizes(n in point(3, 2.0), c in -1.0f64..1.0) {
        prop_assume!(norm(&n) > 1e-3);
        let h = Hyperplane::new(n.clone(), c).unwrap();
        prop_assert!((norm(h.normal()) - 1.0).abs() <= 1e-12);
        // the same plane after scaling
        let x: Vec<f64> = n.iter().map(|v| v * c / norm(&n).powi(2)).collect();
        prop_assert!(h.signed_distance(&x).abs() <= 1e-12);
    }
}

#[test]
fn infinity_parses() {
    assert_eq!(Exponent::parse("inf").unwrap(), Exponent::Infinite);
}

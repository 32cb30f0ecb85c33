use proptest::prelude::*;
use sphere_feynman::geometry::*;
use std::f64::consts::PI;

// latitude range where the spherical chart is well conditioned
const THETA_MIN: f64 = 0.100_167_421_161_559_8; // asin(0.1)

fn point() -> impl Strategy<Value = (f64, f64)> {
    (THETA_MIN..PI - THETA_MIN, 0.0..2.0 * PI)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn van_vleck_matches_finite_differences(p in point(), q in point(), t in 0.3f64..3.0, sign in prop::bool::ANY) {
        let t = if sign { t } else { -t };
        let d = geodesic_distance(&Point3::from_spherical(p.0, p.1), &Point3::from_spherical(q.0, q.1));
        // the step 1e-4 needs room on both sides; the antipode is a
        // conjugate point where the Hessian loses accuracy
        prop_assume!((2e-3..=3.0).contains(&d));
        let exact = van_vleck(t, d).unwrap();
        let num = van_vleck_numeric(t, p.0, p.1, q.0, q.1, 1e-4).unwrap();
        prop_assert!(exact > 0.0);
        prop_assert!(((num - exact) / exact).abs() < 1e-4, "d = {d}: {num} vs {exact}");
    }

    #[test]
    fn distance_is_a_metric(a in point(), b in point(), c in point()) {
        let (a, b, c) = (
            Point3::from_spherical(a.0, a.1),
            Point3::from_spherical(b.0, b.1),
            Point3::from_spherical(c.0, c.1),
        );
        let ab = geodesic_distance(&a, &b);
        prop_assert_eq!(ab, geodesic_distance(&b, &a));
        prop_assert!((0.0..=PI).contains(&ab));
        prop_assert!(ab <= geodesic_distance(&a, &c) + geodesic_distance(&c, &b) + 1e-12);
        prop_assert!((ab - geodesic_distance_precise(&a, &b)).abs() < 1e-7);
    }

    #[test]
    fn kernel_amplitude_even_in_time(t in 0.05f64..5.0, d in 0.0f64..3.1) {
        let a = kernel(t, d).unwrap();
        let b = kernel(-t, d).unwrap();
        prop_assert!((a.value.norm() - b.value.norm()).abs() <= 1e-15 * a.value.norm());
        prop_assert_eq!(a.amplitude, b.amplitude);
    }

    #[test]
    fn residual_identity_on_random_samples(t_idx in 0usize..3, d in 0.2f64..2.5) {
        let t = [0.5, 1.0, 2.0][t_idx];
        let exact = pde_residual_analytic(t, d).unwrap();
        let num = pde_residual_numeric(t, d, 1e-3, false).unwrap();
        prop_assert!((num - exact).norm() < 1e-4 * exact.norm());
    }
}

#[test]
fn finite_differences_degrade_towards_the_antipode() {
    // documents why the pair check stops short of d = π
    let (th1, ph1) = (0.7, 2.0);
    let err = |gap: f64| {
        let (th2, ph2) = (
            PI - th1 + gap * 0.6,
            ph1 + PI + gap * 0.8 / (PI - th1).sin(),
        );
        let d = geodesic_distance_precise(
            &Point3::from_spherical(th1, ph1),
            &Point3::from_spherical(th2, ph2),
        );
        let exact = van_vleck(1.0, d).unwrap();
        ((van_vleck_numeric(1.0, th1, ph1, th2, ph2, 1e-4).unwrap() - exact) / exact).abs()
    };
    assert!(err(0.2) < 1e-4);
    assert!(err(2e-3) > 1e-2);
}

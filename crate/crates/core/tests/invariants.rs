//! Property tests for the metric and fitting invariants.

use proptest::prelude::*;

use hypro_core::hyperbolicity::tfunction::fit_t_function;
use hypro_core::hyperbolicity::{gromov_product, tripod_decomposition};
use hypro_core::space::{halfplane, Point, Space, SpaceDescription, SpaceKind};

fn segment() -> Space {
    Space::from_description(SpaceDescription {
        label: "seg".into(),
        kind: SpaceKind::Segment {
            lo: -50.0,
            hi: 50.0,
        },
        busemann: None,
    })
    .unwrap()
}

fn half_plane_point() -> impl Strategy<Value = (f64, f64)> {
    (-8.0..8.0f64, -2.5..2.5f64).prop_map(|(x, v)| (x, v.exp()))
}

proptest! {
    #[test]
    fn half_plane_metric_axioms(a in half_plane_point(), b in half_plane_point(), c in half_plane_point()) {
        let dab = halfplane::distance(a, b);
        let dba = halfplane::distance(b, a);
        prop_assert!(dab >= 0.0);
        prop_assert!((dab - dba).abs() < 1e-9);
        prop_assert!(halfplane::distance(a, c) <= dab + halfplane::distance(b, c) + 1e-9);
        // Zero iff coincident.
        prop_assert!(halfplane::distance(a, a) < 1e-12);
    }

    #[test]
    fn half_plane_geodesic_is_metrically_straight(a in half_plane_point(), b in half_plane_point(), frac in 0.0..1.0f64) {
        let d = halfplane::distance(a, b);
        prop_assume!(d > 1e-6);
        let m = halfplane::geodesic_point(a, b, frac * d);
        let left = halfplane::distance(a, m);
        let right = halfplane::distance(m, b);
        prop_assert!((left + right - d).abs() < 1e-8, "split {left} + {right} vs {d}");
    }

    #[test]
    fn gromov_product_symmetric_and_bounded(x in -40.0..40.0f64, y in -40.0..40.0f64, z in -40.0..40.0f64) {
        let s = segment();
        let (px, py, pz) = (Point::Real(x), Point::Real(y), Point::Real(z));
        let yz_x = gromov_product(&s, &py, &pz, &px).unwrap();
        let zy_x = gromov_product(&s, &pz, &py, &px).unwrap();
        prop_assert!((yz_x - zy_x).abs() < 1e-9);
        prop_assert!(yz_x >= -1e-9);
        let dxy = s.distance(&px, &py).unwrap();
        let dxz = s.distance(&px, &pz).unwrap();
        prop_assert!(yz_x <= dxy.min(dxz) + 1e-9);
    }

    #[test]
    fn tripod_reproduces_sides(x in -40.0..40.0f64, y in -40.0..40.0f64, z in -40.0..40.0f64) {
        let s = segment();
        let t = tripod_decomposition(&s, &Point::Real(x), &Point::Real(y), &Point::Real(z)).unwrap();
        prop_assert!(t.a >= 0.0 && t.b >= 0.0 && t.c >= 0.0);
        prop_assert!((t.a + t.b - (x - y).abs()).abs() < 1e-9);
        prop_assert!((t.a + t.c - (x - z).abs()).abs() < 1e-9);
        prop_assert!((t.b + t.c - (y - z).abs()).abs() < 1e-9);
    }

    #[test]
    fn t_function_fit_invariants(alpha in -10.0..10.0f64, span in 0.1..30.0f64, t1 in -10.0..10.0f64, gap in -1.0..1.0f64) {
        // Feasible endpoint data by construction: |t1 − t2| ≤ span.
        let t2 = t1 + gap * span;
        let f = fit_t_function(alpha, alpha + span, t1, t2).unwrap();
        prop_assert!((f.eval(alpha) - t1).abs() < 1e-9);
        prop_assert!((f.eval(alpha + span) - t2).abs() < 1e-9);
        // 1-Lipschitz and convex: unit slopes on both sides of the kink.
        prop_assert!(f.a >= 0.0 && f.a <= span);
        let probe = |t: f64| f.eval(t);
        let k = f.kink();
        if k - alpha > 1e-6 {
            let t = alpha + (k - alpha) / 2.0;
            prop_assert!(((probe(t + 1e-6) - probe(t)) / 1e-6 + 1.0).abs() < 1e-3);
        }
        if alpha + span - k > 1e-6 {
            let t = k + (alpha + span - k) / 2.0;
            prop_assert!(((probe(t + 1e-6) - probe(t)) / 1e-6 - 1.0).abs() < 1e-3);
        }
        // Minimum value at the kink.
        prop_assert!(f.eval(k) <= t1 + 1e-9 && f.eval(k) <= t2 + 1e-9);
    }

    #[test]
    fn product_metrics_bilipschitz(d1 in 0.0..20.0f64, d2 in 0.0..20.0f64) {
        // d_m ≤ d_e ≤ √2 · d_m, pointwise in the factor distances.
        let dm = d1.max(d2);
        let de = d1.hypot(d2);
        prop_assert!(dm <= de + 1e-12);
        prop_assert!(de <= 2.0f64.sqrt() * dm + 1e-12);
    }
}

use std::f64::consts::TAU;

use proptest::prelude::*;

use lmcf_core::diagnostics::{gaussian_density, DensityQuery};
use lmcf_core::flow::velocity_field;
use lmcf_core::geometry::{hausdorff_within, rotation_index, shoelace_area, PlanarCurve, Point};
use lmcf_core::io::{read_curve_csv, write_curve_csv};
use lmcf_core::profiles::ray;
use lmcf_core::scenario::Scenario;

/// Star-shaped closed curve `c + r (1 + a sin(k phi + p)) e^{i phi}`.
fn wobbly(c: (f64, f64), r: f64, a: f64, k: u32, p: f64, n: usize) -> PlanarCurve {
    let nodes = (0..n)
        .map(|j| {
            let phi = TAU * j as f64 / n as f64;
            Point::new(c.0, c.1) + Point::from_polar(r * (1.0 + a * (k as f64 * phi + p).sin()), phi)
        })
        .collect();
    PlanarCurve::closed(nodes).unwrap()
}

fn wobbly_strategy() -> impl Strategy<Value = PlanarCurve> {
    (
        (-3.0..3.0f64, -3.0..3.0f64),
        0.5..2.0f64,
        0.0..0.3f64,
        1u32..5,
        0.0..TAU,
        40usize..160,
    )
        .prop_filter("away from the origin", |(c, r, a, ..)| (c.0 * c.0 + c.1 * c.1).sqrt() > r * (1.0 + a) + 0.2)
        .prop_map(|(c, r, a, k, p, n)| wobbly(c, r, a, k, p, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn velocity_commutes_with_rotation(curve in wobbly_strategy(), angle in 0.0..TAU) {
        let rot = Point::from_polar(1.0, angle);
        let turned = curve.map(|z| z * rot).unwrap();
        let v = velocity_field(&curve).unwrap();
        let w = velocity_field(&turned).unwrap();
        for (a, b) in v.iter().zip(&w) {
            prop_assert!((a * rot - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn velocity_scales_inversely(curve in wobbly_strategy(), lambda in 0.2..5.0f64) {
        let v = velocity_field(&curve).unwrap();
        let w = velocity_field(&curve.scaled(lambda)).unwrap();
        for (a, b) in v.iter().zip(&w) {
            prop_assert!((a / lambda - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn embedded_closed_curves_turn_once(curve in wobbly_strategy()) {
        let k = rotation_index(&curve);
        prop_assert!((k.abs() - 1.0).abs() < 1e-9, "{}", k);
        prop_assert!((rotation_index(&curve.reversed()) + k).abs() < 1e-9);
    }

    #[test]
    fn area_is_oriented_and_quadratic(curve in wobbly_strategy(), lambda in 0.2..5.0f64) {
        let a = shoelace_area(curve.nodes());
        prop_assert!(a > 0.0);
        prop_assert!((shoelace_area(curve.reversed().nodes()) + a).abs() < 1e-9 * a);
        prop_assert!((shoelace_area(curve.scaled(lambda).nodes()) - lambda * lambda * a).abs() < 1e-9 * lambda * lambda * a);
    }

    #[test]
    fn hausdorff_is_symmetric(a in wobbly_strategy(), b in wobbly_strategy(), radius in 1.0..8.0f64) {
        prop_assert_eq!(hausdorff_within(&a, &a, radius), 0.0);
        prop_assert_eq!(hausdorff_within(&a, &b, radius), hausdorff_within(&b, &a, radius));
    }

    #[test]
    fn csv_round_trip_is_exact(xs in prop::collection::vec((-1e6..1e6f64, -1e-6..1e-6f64), 3..50)) {
        prop_assume!(xs.windows(2).all(|w| w[0] != w[1]));
        let curve = PlanarCurve::open(xs.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&curve, &mut buf).unwrap();
        prop_assert_eq!(read_curve_csv(buf.as_slice(), false).unwrap(), curve);
    }

    #[test]
    fn scenario_canonical_form_round_trips(
        angle in -3.0..3.0f64,
        length in 1.0..50.0f64,
        h in 0.05..0.2f64,
        stride in 0.01..1.0f64,
        cx in -5.0..5.0f64,
    ) {
        let text = format!(
            "schema_version = 1\nid = \"p\"\nstride = {stride:?}\n[flow]\ntarget_spacing = {h:?}\nmax_time = 1.0\n\
             [[profiles]]\nkind = \"ray\"\nangle = {angle:?}\nlength = {length:?}\n\
             [[profiles]]\nkind = \"circle\"\ncenter = [{cx:?}, 0.0]\nradius = 0.5\n\
             [[diagnostics]]\ncheck = \"intersection_count\"\nother_component = 1\n"
        );
        let s = Scenario::from_toml(&text).unwrap();
        prop_assert_eq!(Scenario::from_toml(&s.to_toml()).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn planes_have_unit_density(angle in 0.0..TAU, l in 0.05..3.0f64, s in 0.0..5.0f64, alpha in 0.0..TAU) {
        let plane = ray(angle, 40.0, 0.05).unwrap().curve;
        let q = DensityQuery::at_surface_point(Point::from_polar(s, angle), alpha, l);
        let d = gaussian_density(&[&plane], &q).unwrap();
        prop_assert!((d.value - 1.0).abs() < 1e-4, "{}", d.value);
    }
}

use std::path::Path;

use lmcf_core::flow::Component;
use lmcf_core::geometry::{PlanarCurve, Point};
use lmcf_core::profiles::ray;
use lmcf_core::render::{emit_svg, SvgStyle};

/// A ray and a figure eight, whose one crossing cuts off one loop.
fn scene() -> Vec<Component> {
    let r = ray(2.5, 3.0, 0.5).unwrap();
    let lobe = PlanarCurve::closed(
        (0..24)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 24.0;
                Point::new(1.5 + (2.0 * t).sin(), t.sin())
            })
            .collect(),
    )
    .unwrap();
    vec![Component::profile("ray", &r), Component::closed("eight", lobe)]
}

#[test]
fn svg_matches_golden_file() {
    let svg = emit_svg(&scene(), &SvgStyle::default()).unwrap();
    assert_eq!(svg, emit_svg(&scene(), &SvgStyle::default()).unwrap());
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/scene.svg");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &svg).unwrap();
    }
    assert_eq!(svg, std::fs::read_to_string(&golden).unwrap());
    assert_eq!(svg.matches("<path").count(), 2);
    assert_eq!(svg.matches("class=\"loop\"").count(), 1);
}

use super::{dot, PlanarCurve, Point};

/// Distance from `p` to the polyline.
pub fn distance_to_curve(p: Point, curve: &PlanarCurve) -> f64 {
    (0..curve.segment_count())
        .map(|i| {
            let (a, b) = curve.segment(i);
            let d = b - a;
            let s = (dot(p - a, d) / d.norm_sqr()).clamp(0.0, 1.0);
            (p - (a + d * s)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between the parts of `a` and `b` inside the
/// disc of radius `radius`; points inside are measured against the whole
/// other curve. Zero if neither curve enters the disc.
pub fn hausdorff_within(a: &PlanarCurve, b: &PlanarCurve, radius: f64) -> f64 {
    let one_way = |x: &PlanarCurve, y: &PlanarCurve| {
        x.nodes()
            .iter()
            .filter(|p| p.norm() <= radius)
            .map(|&p| distance_to_curve(p, y))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::testing::{circle, ray};

    #[test]
    fn concentric_circles() {
        let a = circle(Point::new(0.0, 0.0), 1.0, 400);
        let b = circle(Point::new(0.0, 0.0), 1.5, 400);
        let d = hausdorff_within(&a, &b, 10.0);
        assert!((d - 0.5).abs() < 1e-4, "{d}");
        // only the inner circle lies in the disc of radius 1.2
        assert!((hausdorff_within(&a, &b, 1.2) - 0.5).abs() < 1e-4);
        assert_eq!(hausdorff_within(&a, &b, 0.5), 0.0);
    }

    #[test]
    fn point_on_segment_interior() {
        let r = ray(0.0, 2.0, 0.5);
        assert!((distance_to_curve(Point::new(0.7, 0.3), &r) - 0.3).abs() < 1e-15);
        assert!((distance_to_curve(Point::new(-0.3, -0.4), &r) - 0.5).abs() < 1e-15);
    }
}

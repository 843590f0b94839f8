use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GeometryError;

/// A point of the complex plane.
pub type Point = Complex64;

/// Relative separation below which two consecutive nodes count as coincident.
const COINCIDENT_REL: f64 = 1e-12;

/// Ordered polyline in the complex plane, open or closed.
///
/// A closed curve stores each node once; the segment from the last node back
/// to the first is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve")]
pub struct PlanarCurve {
    nodes: Vec<Point>,
    closed: bool,
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    closed: bool,
    nodes: Vec<[f64; 2]>,
}

impl TryFrom<RawCurve> for PlanarCurve {
    type Error = GeometryError;

    fn try_from(raw: RawCurve) -> Result<Self, Self::Error> {
        let nodes = raw.nodes.iter().map(|p| Point::new(p[0], p[1])).collect();
        PlanarCurve::new(nodes, raw.closed)
    }
}

impl From<PlanarCurve> for RawCurve {
    fn from(c: PlanarCurve) -> Self {
        RawCurve {
            closed: c.closed,
            nodes: c.nodes.iter().map(|p| [p.re, p.im]).collect(),
        }
    }
}

impl PlanarCurve {
    pub fn new(nodes: Vec<Point>, closed: bool) -> Result<Self, GeometryError> {
        if nodes.len() < 3 {
            return Err(GeometryError::TooFewNodes(nodes.len()));
        }
        if let Some(i) = nodes.iter().position(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(GeometryError::NonFinite(i));
        }
        let diam = bbox_diameter(&nodes);
        if diam == 0.0 {
            return Err(GeometryError::CoincidentNodes(0));
        }
        let tol = COINCIDENT_REL * diam;
        for i in 0..nodes.len() - 1 {
            if (nodes[i + 1] - nodes[i]).norm() <= tol {
                return Err(GeometryError::CoincidentNodes(i));
            }
        }
        if closed && (nodes[0] - nodes[nodes.len() - 1]).norm() <= tol {
            return Err(GeometryError::RepeatedClosingNode);
        }
        Ok(Self { nodes, closed })
    }

    pub fn open(nodes: Vec<Point>) -> Result<Self, GeometryError> {
        Self::new(nodes, false)
    }

    pub fn closed(nodes: Vec<Point>) -> Result<Self, GeometryError> {
        Self::new(nodes, true)
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<Point> {
        self.nodes
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.nodes.len()
        } else {
            self.nodes.len() - 1
        }
    }

    /// Endpoints of segment `i` (the closing segment for `i == len - 1` on a
    /// closed curve).
    pub fn segment(&self, i: usize) -> (Point, Point) {
        let n = self.nodes.len();
        (self.nodes[i], self.nodes[(i + 1) % n])
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        (0..self.segment_count())
            .map(|i| {
                let (a, b) = self.segment(i);
                (b - a).norm()
            })
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    pub fn min_spacing(&self) -> f64 {
        self.segment_lengths().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        self.segment_lengths().into_iter().fold(0.0, f64::max)
    }

    pub fn bbox_diameter(&self) -> f64 {
        bbox_diameter(&self.nodes)
    }

    /// Largest distance between any two nodes.
    pub fn diameter(&self) -> f64 {
        point_set_diameter(&self.nodes)
    }

    /// True when the first node sits exactly at the origin of an open curve,
    /// which marks the curve as an equivariant half-profile.
    pub fn starts_at_origin(&self) -> bool {
        !self.closed && self.nodes[0] == Point::new(0.0, 0.0)
    }

    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Self {
            nodes,
            closed: self.closed,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            nodes: self.nodes.iter().map(|p| p * factor).collect(),
            closed: self.closed,
        }
    }

    /// Applies `f` to every node and re-validates.
    pub fn map(&self, f: impl Fn(Point) -> Point) -> Result<Self, GeometryError> {
        Self::new(self.nodes.iter().map(|&p| f(p)).collect(), self.closed)
    }
}

pub(crate) fn bbox_diameter(nodes: &[Point]) -> f64 {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in nodes {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt()
}

/// Exact diameter of a finite point set (quadratic; used on loops and small sets,
/// falls back to the bounding box for large inputs).
pub fn point_set_diameter(points: &[Point]) -> f64 {
    if points.len() > 2048 {
        return bbox_diameter(points);
    }
    let mut best = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.max((points[i] - points[j]).norm());
        }
    }
    best
}

/// A half-curve pinned at the origin representing the Lagrangian surface
/// `{(z(s) cos a, z(s) sin a)}` of C^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivariantProfile {
    pub curve: PlanarCurve,
    /// Direction of the far-field ray, radians.
    pub asymptote_angle: f64,
    /// Parameter `a` of the cone `pi/2 + 2a < arg z < pi + a`, when the profile
    /// is meant to lie in it.
    pub cone_param: Option<f64>,
}

impl EquivariantProfile {
    pub fn new(curve: PlanarCurve, asymptote_angle: f64) -> Result<Self, GeometryError> {
        if curve.is_closed() {
            return Err(GeometryError::NotAProfile("closed curve".into()));
        }
        if !curve.starts_at_origin() {
            return Err(GeometryError::NotAProfile(
                "node 0 must be exactly the origin".into(),
            ));
        }
        let diam = curve.bbox_diameter();
        if let Some(i) = curve.nodes()[1..]
            .iter()
            .position(|p| p.norm() <= COINCIDENT_REL * diam)
        {
            return Err(GeometryError::NotAProfile(format!(
                "interior node {} sits at the origin",
                i + 1
            )));
        }
        Ok(Self {
            curve,
            asymptote_angle,
            cone_param: None,
        })
    }

    pub fn with_cone(mut self, a: f64) -> Self {
        self.cone_param = Some(a);
        self
    }

    /// Mismatch between the tangent at the origin computed with odd ghost nodes
    /// and the one-sided tangent from the first two segments. Zero for a curve
    /// whose odd extension is smooth, `O(h^2)` for a smooth discretisation.
    pub fn origin_smoothness_defect(&self) -> f64 {
        let z = self.curve.nodes();
        let ghost = z[1] / z[1].norm();
        // second-order one-sided derivative through 0, z1, z2 in chord parameter
        let h1 = z[1].norm();
        let h2 = (z[2] - z[1]).norm();
        let d = (z[1] * (h1 + h2).powi(2) - z[2] * h1 * h1) / (h1 * h2 * (h1 + h2));
        let one_sided = d / d.norm();
        (ghost - one_sided).norm()
    }

    /// `mu = x1 y2 - x2 y1` evaluated on a sample of the represented surface.
    /// The equivariant ansatz makes it vanish identically; exposed so tests can
    /// check the claim numerically.
    pub fn mu_samples(&self, alphas: usize) -> f64 {
        let mut worst = 0.0f64;
        for z in self.curve.nodes() {
            for k in 0..alphas {
                let a = std::f64::consts::TAU * k as f64 / alphas as f64;
                let (x1, y1, x2, y2) = (z.re * a.cos(), z.im * a.cos(), z.re * a.sin(), z.im * a.sin());
                worst = worst.max((x1 * y2 - x2 * y1).abs());
            }
        }
        worst
    }

    /// True when every node but the origin has polar angle in the open cone
    /// `(pi/2 + 2a, pi + a)`.
    pub fn in_cone(&self, a: f64) -> bool {
        cone_violations(&self.curve, a) == 0
    }
}

/// Count of nodes (excluding an origin node) whose polar angle, taken in
/// `[0, 2pi)`, falls outside `(pi/2 + 2a, pi + a)`.
pub fn cone_violations(curve: &PlanarCurve, a: f64) -> usize {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};
    curve
        .nodes()
        .iter()
        .filter(|p| p.norm() > 0.0)
        .filter(|p| {
            let phi = p.arg().rem_euclid(TAU);
            !(phi > FRAC_PI_2 + 2.0 * a && phi < PI + a)
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn rejects_short_and_coincident() {
        assert!(matches!(
            PlanarCurve::open(vec![p(0.0, 0.0), p(1.0, 0.0)]),
            Err(GeometryError::TooFewNodes(2))
        ));
        assert!(matches!(
            PlanarCurve::open(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0)]),
            Err(GeometryError::CoincidentNodes(1))
        ));
        assert!(matches!(
            PlanarCurve::closed(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 0.0)]),
            Err(GeometryError::RepeatedClosingNode)
        ));
    }

    #[test]
    fn profile_requires_origin() {
        let c = PlanarCurve::open(vec![p(1.0, 0.0), p(2.0, 0.0), p(3.0, 0.0)]).unwrap();
        assert!(EquivariantProfile::new(c, 0.0).is_err());
        let c = PlanarCurve::open(vec![p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)]).unwrap();
        let prof = EquivariantProfile::new(c, std::f64::consts::FRAC_PI_4).unwrap();
        assert_eq!(prof.mu_samples(16), 0.0);
        assert!(prof.origin_smoothness_defect() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let c = PlanarCurve::closed(vec![p(0.1, 0.2), p(1.0, 0.0), p(0.3, 1.7)]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"closed\":true"));
        let back: PlanarCurve = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<PlanarCurve>(r#"{"closed":false,"nodes":[[0,0],[1,0]]}"#).is_err());
    }
}

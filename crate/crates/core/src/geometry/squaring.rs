use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{GeometryError, PlanarCurve, Point};

/// Image of every node under `z -> z^2 / 2`. Since `|d(z^2/2)| = |z| |dz|`,
/// h-lengths upstairs are Euclidean lengths downstairs.
pub fn squaring_transform(curve: &PlanarCurve) -> Result<PlanarCurve, GeometryError> {
    curve.map(|z| z * z * 0.5)
}

/// The line `w(t) = offset * i e^{i direction} + t e^{i direction}`, i.e. the
/// line with direction angle `direction` at signed distance `offset` from the
/// origin (positive to the left of the direction of travel).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineParams {
    pub offset: f64,
    pub direction: f64,
}

/// Which of the two square roots to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// The root with argument near `direction / 2` at the far `t > 0` end.
    Positive,
    Negative,
}

impl LineParams {
    fn unit(&self) -> Point {
        Point::from_polar(1.0, self.direction)
    }

    /// Preimage point for line parameter `t` on the chosen branch. The
    /// principal root of `2 (t + i offset)` never crosses its cut because
    /// `t + i offset` stays in one open half plane.
    pub fn preimage(&self, t: f64, branch: Branch) -> Point {
        let root = Point::from_polar(1.0, self.direction / 2.0)
            * (Point::new(t, self.offset) * 2.0).sqrt();
        match branch {
            Branch::Positive => root,
            Branch::Negative => -root,
        }
    }

    pub fn point(&self, t: f64) -> Point {
        self.unit() * Point::new(t, self.offset)
    }

    /// Asymptotic directions of the preimage for `t -> -inf` and `t -> +inf`.
    pub fn asymptote_angles(&self, branch: Branch) -> (f64, f64) {
        let shift = match branch {
            Branch::Positive => 0.0,
            Branch::Negative => std::f64::consts::PI,
        };
        let far = self.direction / 2.0 + shift;
        (far + FRAC_PI_2 * self.offset.signum(), far)
    }
}

/// Preimage of a line avoiding the origin, sampled at roughly uniform
/// arclength `spacing` out to radius `extent`. Nodes are exact preimages;
/// only their parameters come from a quadrature table.
pub fn inverse_branch(
    line: LineParams,
    branch: Branch,
    extent: f64,
    spacing: f64,
) -> Result<PlanarCurve, GeometryError> {
    let c = line.offset;
    if c == 0.0 {
        return Err(GeometryError::LineThroughOrigin);
    }
    let t_max_sq = extent.powi(4) / 4.0 - c * c;
    if t_max_sq <= 0.0 {
        return Err(GeometryError::Degenerate(format!(
            "extent {extent} does not reach the neck radius {}",
            (2.0 * c.abs()).sqrt()
        )));
    }
    let t_max = t_max_sq.sqrt();
    // t = |c| sinh(tau) makes ds/dtau = sqrt(|c| cosh tau / 2), smooth in tau
    let ac = c.abs();
    let tau_max = (t_max / ac).asinh();
    let speed = |tau: f64| (ac * tau.cosh() / 2.0).sqrt();
    let dense = 4096usize.max((64.0 * extent / spacing) as usize);
    let dtau = 2.0 * tau_max / dense as f64;
    let mut s_table = Vec::with_capacity(dense + 1);
    let mut acc = 0.0;
    s_table.push(0.0);
    for k in 0..dense {
        let a = -tau_max + dtau * k as f64;
        // Simpson on each cell
        acc += dtau / 6.0 * (speed(a) + 4.0 * speed(a + dtau / 2.0) + speed(a + dtau));
        s_table.push(acc);
    }
    let total = acc;
    let segs = ((total / spacing).round() as usize).max(3);
    let mut nodes = Vec::with_capacity(segs + 1);
    let mut cell = 0usize;
    for j in 0..=segs {
        let s = total * j as f64 / segs as f64;
        while cell + 1 < dense && s_table[cell + 1] < s {
            cell += 1;
        }
        let frac = ((s - s_table[cell]) / (s_table[cell + 1] - s_table[cell])).clamp(0.0, 1.0);
        let tau = -tau_max + dtau * (cell as f64 + frac);
        let tau = if j == 0 {
            -tau_max
        } else if j == segs {
            tau_max
        } else {
            tau
        };
        nodes.push(line.preimage(ac * tau.sinh(), branch));
    }
    PlanarCurve::open(nodes)
}

/// The two rays making up the preimage of a line through the origin with
/// direction angle `direction`: arguments `direction/2` and
/// `direction/2 + pi/2`, each starting at the origin.
pub fn ray_pair_preimage(direction: f64, extent: f64, spacing: f64) -> Result<[PlanarCurve; 2], GeometryError> {
    let n = ((extent / spacing).round() as usize).max(3);
    let mk = |angle: f64| {
        PlanarCurve::open(
            (0..=n)
                .map(|k| Point::from_polar(extent * k as f64 / n as f64, angle))
                .collect(),
        )
    };
    Ok([mk(direction / 2.0)?, mk(direction / 2.0 + FRAC_PI_2)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::testing::{circle, ray};
    use crate::geometry::{frames, lagrangian_angle};

    #[test]
    fn ray_doubles_angle() {
        let r = ray(0.3, 4.0, 0.1);
        let sq = squaring_transform(&r).unwrap();
        for p in &sq.nodes()[1..] {
            assert!((p.arg() - 0.6).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_maps_to_half_circle_twice() {
        let c = circle(Point::new(0.0, 0.0), 1.0, 64);
        let sq = squaring_transform(&c).unwrap();
        assert!(sq.nodes().iter().all(|p| (p.norm() - 0.5).abs() < 1e-12));
        assert!((crate::geometry::rotation_index(&sq) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn horizontal_line_gives_hyperbola() {
        let c = 0.7;
        let line = LineParams { offset: c, direction: 0.0 };
        let curve = inverse_branch(line, Branch::Positive, 6.0, 0.05).unwrap();
        for p in curve.nodes() {
            assert!((p.re * p.im - c).abs() < 1e-9);
        }
        let back = squaring_transform(&curve).unwrap();
        for w in back.nodes() {
            assert!((w.im - c).abs() < 1e-9);
        }
    }

    #[test]
    fn spacing_roughly_uniform_and_extent_respected() {
        let line = LineParams { offset: 0.02, direction: 1.1 };
        let curve = inverse_branch(line, Branch::Negative, 5.0, 0.04).unwrap();
        let sp = curve.segment_lengths();
        assert!(sp.iter().all(|l| (l / 0.04 - 1.0).abs() < 0.1), "{:?}", sp.iter().fold(0.0f64, |a, b| a.max(*b)));
        let n = curve.len();
        assert!((curve.nodes()[0].norm() - 5.0).abs() < 1e-9);
        assert!((curve.nodes()[n - 1].norm() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn preimage_is_special_lagrangian() {
        let psi = 0.4;
        let line = LineParams { offset: 0.5, direction: 2.0 * psi };
        let curve = inverse_branch(line, Branch::Positive, 8.0, 0.01).unwrap();
        let theta = lagrangian_angle(&curve).unwrap();
        for t in &theta {
            assert!((t - 2.0 * psi).abs() < 1e-4, "{t}");
        }
        // stationarity: curvature equals <x, nu>/|x|^2
        let fr = frames(&curve);
        let tol = 1e-3 / curve.diameter();
        for (p, f) in curve.nodes().iter().zip(&fr).skip(1).take(curve.len() - 2) {
            let res = f.signed_curvature() - crate::geometry::dot(*p, f.normal) / p.norm_sqr();
            assert!(res.abs() < tol, "{res}");
        }
        let (a, b) = line.asymptote_angles(Branch::Positive);
        assert!((a - (psi + FRAC_PI_2)).abs() < 1e-12 && (b - psi).abs() < 1e-12);
        let first = curve.nodes()[0];
        let last = curve.nodes()[curve.len() - 1];
        assert!((first.arg() - a).abs() < 0.02);
        assert!((last.arg() - b).abs() < 0.02);
    }

    #[test]
    fn through_origin_is_an_error() {
        let line = LineParams { offset: 0.0, direction: 0.3 };
        assert_eq!(
            inverse_branch(line, Branch::Positive, 3.0, 0.1),
            Err(GeometryError::LineThroughOrigin)
        );
        let [a, b] = ray_pair_preimage(0.3, 3.0, 0.1).unwrap();
        assert!((a.nodes()[5].arg() - 0.15).abs() < 1e-12);
        assert!((b.nodes()[5].arg() - (0.15 + FRAC_PI_2)).abs() < 1e-12);
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::flow::Trajectory;
use crate::geometry::{PlanarCurve, Point};

use super::{Report, TimeSeries, Verdict};

/// Center `y = (x1, y1, x2, y2)` in R^4 and scale `l` of the backward heat
/// kernel, with quadrature controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityQuery {
    pub center: [f64; 4],
    pub scale: f64,
    #[serde(default = "default_alpha")]
    pub alpha_nodes: usize,
    /// Cutoff beyond the nearest distance, in units of `sqrt(l)`.
    #[serde(default = "default_truncation")]
    pub truncation: f64,
}

fn default_alpha() -> usize {
    64
}
fn default_truncation() -> f64 {
    8.0
}

impl DensityQuery {
    pub fn new(center: [f64; 4], scale: f64) -> Self {
        DensityQuery {
            center,
            scale,
            alpha_nodes: default_alpha(),
            truncation: default_truncation(),
        }
    }

    /// Center lying on the surface point `(z cos a, z sin a)`.
    pub fn at_surface_point(z: Point, alpha: f64, scale: f64) -> Self {
        let (c, s) = (alpha.cos(), alpha.sin());
        Self::new([z.re * c, z.im * c, z.re * s, z.im * s], scale)
    }

    fn validate(&self) -> Result<(), String> {
        if !(self.scale > 0.0) {
            return Err(format!("scale must be positive, got {}", self.scale));
        }
        if self.alpha_nodes < 64 {
            return Err(format!("need at least 64 alpha nodes, got {}", self.alpha_nodes));
        }
        if self.truncation < 8.0 {
            return Err(format!("truncation below 8 sqrt(l): {}", self.truncation));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub value: f64,
    /// Difference against a run with half the alpha nodes and double the
    /// arclength step.
    pub error_estimate: f64,
    /// The cutoff window reaches a free end of a curve, so mass beyond the
    /// curve's extent may be missing.
    pub tail_warning: bool,
}

// Gauss-Legendre on [-1, 1]
const GL3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

struct Kernel {
    y: [f64; 4],
    y2: f64,
    l: f64,
}

impl Kernel {
    /// `(4 pi l)^{-1} |z| int_0^{2pi} exp(-|p(z, a) - y|^2 / 4l) da`.
    fn ring(&self, z: Point, alpha_nodes: usize) -> f64 {
        let a = z.re * self.y[0] + z.im * self.y[1];
        let b = z.re * self.y[2] + z.im * self.y[3];
        let base = z.norm_sqr() + self.y2;
        let da = 2.0 * PI / alpha_nodes as f64;
        let sum: f64 = (0..alpha_nodes)
            .map(|k| {
                let t = da * k as f64;
                (-(base - 2.0 * (a * t.cos() + b * t.sin())) / (4.0 * self.l)).exp()
            })
            .sum();
        z.norm() * sum * da / (4.0 * PI * self.l)
    }

    /// Distance from `y` to the circle `{p(z, a)}`.
    fn ring_distance(&self, z: Point) -> f64 {
        let a = z.re * self.y[0] + z.im * self.y[1];
        let b = z.re * self.y[2] + z.im * self.y[3];
        (z.norm_sqr() + self.y2 - 2.0 * a.hypot(b)).max(0.0).sqrt()
    }
}

fn integrate(curves: &[&PlanarCurve], k: &Kernel, window: f64, alpha_nodes: usize, piece: f64) -> f64 {
    let ry = k.y2.sqrt();
    let mut total = 0.0;
    for c in curves {
        let z = c.nodes();
        for i in 0..c.segment_count() {
            let (p, q) = (z[i], z[(i + 1) % z.len()]);
            // |p(z, a) - y| >= ||z| - |y||
            let lo = radius_gap(p, q, ry);
            if lo > window {
                continue;
            }
            let len = (q - p).norm();
            let parts = (len / piece).ceil().max(1.0) as usize;
            let h = len / parts as f64;
            for m in 0..parts {
                for (x, w) in GL3 {
                    let s = (m as f64 + 0.5 * (x + 1.0)) / parts as f64;
                    total += w * 0.5 * h * k.ring(p + (q - p) * s, alpha_nodes);
                }
            }
        }
    }
    total
}

/// Smallest `||z| - r|` over the segment `[p, q]`.
fn radius_gap(p: Point, q: Point, r: f64) -> f64 {
    let d = q - p;
    let s = (-(p.re * d.re + p.im * d.im) / d.norm_sqr()).clamp(0.0, 1.0);
    let inner = (p + d * s).norm();
    let outer = p.norm().max(q.norm());
    if r < inner {
        inner - r
    } else if r > outer {
        r - outer
    } else {
        0.0
    }
}

/// Gaussian density `int Phi(y, l)` of the surface swept by the curves,
/// reduced to the curves by integrating over the rotation angle.
///
/// Each curve contributes `(4 pi l)^{-1} int |z| int exp(-|p - y|^2/4l) da ds`
/// with `p = (z cos a, z sin a)`. A half-curve from the origin covers its
/// surface once; a curve symmetric under `z -> -z` covers it twice.
pub fn gaussian_density(curves: &[&PlanarCurve], query: &DensityQuery) -> Result<Density, String> {
    query.validate()?;
    let y = query.center;
    let k = Kernel {
        y,
        y2: y.iter().map(|v| v * v).sum(),
        l: query.scale,
    };
    let sl = query.scale.sqrt();
    let nearest = curves
        .iter()
        .flat_map(|c| c.nodes().iter())
        .map(|&z| k.ring_distance(z))
        .fold(f64::INFINITY, f64::min);
    let window = nearest + query.truncation * sl;
    // the alpha integrand is exp(amp cos(.)), resolved once nodes exceed amp
    let ry = k.y2.sqrt();
    let r_max = curves
        .iter()
        .flat_map(|c| c.nodes().iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .min(ry + window);
    let amp = r_max * ry / (2.0 * query.scale);
    let n_alpha = query.alpha_nodes.max((2.0 * amp).ceil() as usize + 32);
    let piece = sl / 8.0;
    let value = integrate(curves, &k, window, n_alpha, piece);
    let coarse = integrate(curves, &k, window, n_alpha / 2, 2.0 * piece);
    let tail_warning = curves.iter().any(|c| {
        let z = c.nodes();
        !c.is_closed()
            && [z[0], z[z.len() - 1]]
                .iter()
                .any(|&p| p.norm() > 0.0 && (p.norm() - ry).abs() < window)
    });
    Ok(Density {
        value,
        error_estimate: (value - coarse).abs(),
        tail_warning,
    })
}

/// Huisken monotonicity: `t -> density(curves_t, y, T - t)` must not
/// increase by more than `slack` between consecutive samples with `t < T`.
pub fn density_monotonicity_check(trajectory: &Trajectory, y: [f64; 4], big_t: f64, slack: f64) -> Report {
    let params = json!({"y": y, "T": big_t, "slack": slack});
    let samples: Vec<_> = trajectory.by_time().into_iter().filter(|s| s.t < big_t).collect();
    if samples.len() < 10 {
        return Report::new(
            "density_monotonicity",
            params,
            Verdict::NotApplicable,
            json!({"reason": "fewer than 10 samples before T", "samples": samples.len()}),
        );
    }
    let mut series = TimeSeries::new("gaussian_density").with_meta("T", big_t.to_string());
    let mut worst = f64::NEG_INFINITY;
    let mut tail = false;
    for s in &samples {
        let curves: Vec<&PlanarCurve> = s.components.iter().map(|c| &c.curve).collect();
        let d = match gaussian_density(&curves, &DensityQuery::new(y, big_t - s.t)) {
            Ok(d) => d,
            Err(e) => return Report::new("density_monotonicity", params, Verdict::Fail, json!({"error": e})),
        };
        tail |= d.tail_warning;
        if let Some(&(_, prev)) = series.samples.last() {
            worst = worst.max(d.value - prev);
        }
        series.push(s.t, d.value);
    }
    Report::new(
        "density_monotonicity",
        params,
        Verdict::from_bool(worst <= slack),
        json!({"largest_increase": worst, "tail_warning": tail}),
    )
    .with_series(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::testing::ray;

    #[test]
    fn plane_through_center_has_unit_density() {
        let r = ray(0.7, 40.0, 0.1);
        for l in [0.1, 1.0, 5.0] {
            let d = gaussian_density(&[&r], &DensityQuery::new([0.0; 4], l)).unwrap();
            assert!((d.value - 1.0).abs() < 1e-4, "{l}: {}", d.value);
            assert!(!d.tail_warning);
        }
    }

    #[test]
    fn short_ray_warns() {
        let r = ray(0.0, 2.0, 0.1);
        let d = gaussian_density(&[&r], &DensityQuery::new([0.0; 4], 1.0)).unwrap();
        assert!(d.tail_warning);
        // int_0^2 (s/2) e^{-s^2/4} ds = 1 - e^{-1}
        assert!((d.value - (1.0 - (-1.0f64).exp())).abs() < 1e-6);
    }

    #[test]
    fn ring_matches_bessel_series() {
        // int_0^{2pi} exp(k cos a) da = 2 pi I0(k)
        fn i0(x: f64) -> f64 {
            let mut term = 1.0;
            let mut sum = 1.0;
            for m in 1..200 {
                term *= (x / 2.0) * (x / 2.0) / (m as f64 * m as f64);
                sum += term;
            }
            sum
        }
        let k = Kernel {
            y: [1.0, 0.5, -0.3, 0.2],
            y2: 1.0 + 0.25 + 0.09 + 0.04,
            l: 0.3,
        };
        let z = Point::new(0.8, -0.4);
        let a = z.re * k.y[0] + z.im * k.y[1];
        let b = z.re * k.y[2] + z.im * k.y[3];
        let r = a.hypot(b);
        let exact = z.norm() * 2.0 * PI * i0(r / (2.0 * k.l)) * (-(z.norm_sqr() + k.y2) / (4.0 * k.l)).exp()
            / (4.0 * PI * k.l);
        assert!((k.ring(z, 64) / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parabolic_scaling() {
        let r = ray(2.0, 20.0, 0.05);
        let q = DensityQuery::new([0.3, -0.2, 0.5, 0.1], 0.7);
        let base = gaussian_density(&[&r], &q).unwrap().value;
        let c = 1.7;
        let scaled = r.scaled(c);
        let mut qs = q.clone();
        qs.center = q.center.map(|v| v * c);
        qs.scale = q.scale * c * c;
        let v = gaussian_density(&[&scaled], &qs).unwrap().value;
        assert!((v - base).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_query() {
        let r = ray(0.0, 5.0, 0.1);
        let mut q = DensityQuery::new([0.0; 4], 1.0);
        q.alpha_nodes = 16;
        assert!(gaussian_density(&[&r], &q).is_err());
        assert!(gaussian_density(&[&r], &DensityQuery::new([0.0; 4], 0.0)).is_err());
    }
}

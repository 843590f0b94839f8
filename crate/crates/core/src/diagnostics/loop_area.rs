use std::f64::consts::TAU;

use serde_json::json;

use crate::flow::{SampleKind, Trajectory};
use crate::geometry::{loops_of, LoopDescriptor, Point};

use super::{Report, TimeSeries, Verdict};

struct Sighting {
    t: f64,
    area: f64,
    angle: f64,
    winds: i32,
    diameter: f64,
}

/// Follows one loop of `component` from the first sample: the largest loop
/// first, then the loop whose crossing is nearest the previous one. Stops at
/// the first event or when no loop is left.
fn track(trajectory: &Trajectory, component: usize) -> Vec<Sighting> {
    let mut out: Vec<Sighting> = Vec::new();
    let mut at: Option<Point> = None;
    for s in &trajectory.snapshots {
        if s.kind == SampleKind::PreEvent || s.kind == SampleKind::PostEvent {
            break;
        }
        if out.last().is_some_and(|l| l.t >= s.t) {
            continue;
        }
        let Some(c) = s.components.get(component) else { break };
        let loops = loops_of(&c.curve);
        let pick: Option<&LoopDescriptor> = match at {
            None => loops.iter().max_by(|a, b| a.area.abs().total_cmp(&b.area.abs())),
            Some(q) => loops
                .iter()
                .min_by(|a, b| (a.crossing - q).norm().total_cmp(&(b.crossing - q).norm())),
        };
        let Some(d) = pick else { break };
        at = Some(d.crossing);
        out.push(Sighting {
            t: s.t,
            area: d.area.abs(),
            angle: d.exterior_angle,
            winds: d.winds_origin,
            diameter: d.diameter,
        });
    }
    out
}

/// Compares centered-difference `d|A|/dt` of a tracked loop against
/// `alpha - 2 pi - 2 pi |w|`, with `alpha` the exterior angle at the crossing
/// and `w` the loop's winding about the origin. Samples where the loop is
/// under `min_diameter` across are left out.
pub fn loop_area_law_check(trajectory: &Trajectory, component: usize, min_diameter: f64, tolerance: f64) -> Report {
    let params = json!({"component": component, "min_diameter": min_diameter, "tolerance": tolerance});
    let seen = track(trajectory, component);
    if seen.len() < 10 {
        return Report::new(
            "loop_area_law",
            params,
            Verdict::NotApplicable,
            json!({"reason": "loop tracked over fewer than 10 samples", "samples": seen.len()}),
        );
    }
    let mut series = TimeSeries::new("loop_area_relative_residual");
    let mut rates = Vec::new();
    let mut predicted = Vec::new();
    let mut worst = 0.0f64;
    for w in seen.windows(3) {
        if w.iter().any(|s| s.diameter < min_diameter) {
            continue;
        }
        let rate = (w[2].area - w[0].area) / (w[2].t - w[0].t);
        let mid = &w[1];
        let expect = mid.angle - TAU - TAU * mid.winds.abs() as f64;
        let rel = ((rate - expect) / expect).abs();
        worst = worst.max(rel);
        series.push(mid.t, rel);
        rates.push(rate);
        predicted.push(expect);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let verdict = if series.is_empty() {
        Verdict::NotApplicable
    } else {
        Verdict::from_bool(worst < tolerance)
    };
    Report::new(
        "loop_area_law",
        params,
        verdict,
        json!({
            "samples": seen.len(),
            "resolved": series.len(),
            "max_relative_residual": worst,
            "mean_rate": mean(&rates),
            "mean_predicted": mean(&predicted),
            "winds_origin": seen[0].winds,
            "last_sighting": seen.last().map(|s| s.t),
        }),
    )
    .with_series(series)
}

/// Measured collapse time against `t_start + |A(t_start)| / pi`.
pub fn singular_time_bound_check(trajectory: &Trajectory, component: usize, stride: f64) -> Report {
    let params = json!({"component": component, "stride": stride});
    let Some(first) = trajectory.snapshots.first() else {
        return Report::new("singular_time_bound", params, Verdict::NotApplicable, json!({"reason": "empty trajectory"}));
    };
    let loops = first.components.get(component).map(|c| loops_of(&c.curve)).unwrap_or_default();
    let Some(d) = loops.iter().max_by(|a, b| a.area.abs().total_cmp(&b.area.abs())) else {
        return Report::new("singular_time_bound", params, Verdict::NotApplicable, json!({"reason": "no loop at start"}));
    };
    let bound = first.t + d.area.abs() / std::f64::consts::PI;
    let collapse = trajectory
        .snapshots
        .iter()
        .find(|s| s.kind == SampleKind::PreEvent)
        .map(|s| s.t);
    let last = trajectory.snapshots.last().map(|s| s.t).unwrap_or(first.t);
    let (verdict, margin) = match collapse {
        Some(tc) => (Verdict::from_bool(tc <= bound + stride), bound - tc),
        None if last >= bound + stride => (Verdict::Fail, bound - last),
        None => (Verdict::NotApplicable, bound - last),
    };
    Report::new(
        "singular_time_bound",
        params,
        verdict,
        json!({
            "t_start": first.t,
            "area_start": d.area.abs(),
            "t_collapse": collapse,
            "bound": bound,
            "margin": margin,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{Component, Snapshot};
    use crate::geometry::testing::{circle, ray};

    fn circle_traj(center: Point, radii: impl Iterator<Item = (f64, f64)>) -> Trajectory {
        Trajectory {
            snapshots: radii
                .map(|(t, r)| Snapshot {
                    t,
                    step: 0,
                    kind: SampleKind::Stride,
                    components: vec![Component::closed("c", circle(center, r, 400))],
                })
                .collect(),
        }
    }

    #[test]
    fn exact_shrinking_circles() {
        // |A| = pi r^2 falls at 2 pi off the origin, 4 pi around it
        let off = circle_traj(Point::new(3.0, 0.0), (0..20).map(|k| {
            let t = 0.01 * k as f64;
            (t, (1.0 - 2.0 * t).sqrt())
        }));
        let r = loop_area_law_check(&off, 0, 0.1, 0.02);
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.details);
        let on = circle_traj(Point::new(0.0, 0.0), (0..20).map(|k| {
            let t = 0.01 * k as f64;
            (t, (1.0 - 4.0 * t).sqrt())
        }));
        let r = loop_area_law_check(&on, 0, 0.1, 0.02);
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.details);
        assert_eq!(r.details["winds_origin"], 1);
    }

    #[test]
    fn wrong_rate_fails() {
        let off = circle_traj(Point::new(3.0, 0.0), (0..20).map(|k| {
            let t = 0.01 * k as f64;
            (t, (1.0 - 4.0 * t).sqrt())
        }));
        assert_eq!(loop_area_law_check(&off, 0, 0.1, 0.05).verdict, Verdict::Fail);
    }

    #[test]
    fn no_loop_not_applicable() {
        let traj = Trajectory {
            snapshots: vec![Snapshot {
                t: 0.0,
                step: 0,
                kind: SampleKind::Stride,
                components: vec![Component::clamped("r", ray(0.3, 4.0, 0.1))],
            }],
        };
        assert_eq!(singular_time_bound_check(&traj, 0, 0.1).verdict, Verdict::NotApplicable);
        assert_eq!(loop_area_law_check(&traj, 0, 0.1, 0.05).verdict, Verdict::NotApplicable);
    }

    #[test]
    fn collapse_within_bound() {
        let mut traj = circle_traj(Point::new(3.0, 0.0), (0..5).map(|k| (0.1 * k as f64, 1.0)));
        traj.snapshots[4].kind = SampleKind::PreEvent;
        let r = singular_time_bound_check(&traj, 0, 0.1);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((r.details["bound"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    }
}

use serde_json::json;

use crate::flow::Trajectory;
use crate::geometry::{cross_intersections, PlanarCurve};

use super::{Report, TimeSeries, Verdict};

/// What a tracked component is intersected with.
#[derive(Debug, Clone, Copy)]
pub enum CountReference<'a> {
    /// A fixed curve, e.g. a stationary neck.
    Static(&'a PlanarCurve),
    /// Another component of the same trajectory.
    Component(usize),
}

/// Transverse crossings between `component` and the reference at every
/// distinct sample time, ignoring crossings closer than `exclude_radius` to the
/// origin. Passes when the count never increases; tangential crossings make
/// the verdict unreliable.
pub fn intersection_count_series(
    trajectory: &Trajectory,
    component: usize,
    reference: CountReference<'_>,
    exclude_radius: f64,
) -> Report {
    let params = json!({
        "component": component,
        "reference": match reference {
            CountReference::Static(_) => "static".to_string(),
            CountReference::Component(i) => format!("component {i}"),
        },
        "exclude_radius": exclude_radius,
    });
    let mut series = TimeSeries::new("intersection_count");
    let mut unreliable = Vec::new();
    let mut missing = Vec::new();
    for s in trajectory.by_time() {
        let other = match reference {
            CountReference::Static(c) => Some(c),
            CountReference::Component(i) => s.components.get(i).map(|c| &c.curve),
        };
        let (Some(a), Some(b)) = (s.components.get(component), other) else {
            missing.push(s.t);
            continue;
        };
        let xs: Vec<_> = cross_intersections(&a.curve, b)
            .into_iter()
            .filter(|x| x.point.norm() >= exclude_radius)
            .collect();
        if xs.iter().any(|x| x.unreliable) {
            unreliable.push(s.t);
        }
        series.push(s.t, xs.len() as f64);
    }
    let v: Vec<f64> = series.values().collect();
    let increases = v.windows(2).filter(|w| w[1] > w[0]).count();
    let verdict = if !unreliable.is_empty() {
        Verdict::Unreliable
    } else if series.is_empty() {
        Verdict::NotApplicable
    } else {
        Verdict::from_bool(increases == 0)
    };
    Report::new(
        "intersection_count",
        params,
        verdict,
        json!({
            "first": v.first(),
            "last": v.last(),
            "increases": increases,
            "unreliable_at": unreliable,
            "missing_at": missing,
        }),
    )
    .with_series(series)
}

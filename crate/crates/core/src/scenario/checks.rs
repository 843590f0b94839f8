use serde_json::json;

use crate::diagnostics::{
    angle_jump_tracker, beta_theta_invariant, density_monotonicity_check, expander_closeness,
    intersection_count_series, loop_area_law_check, singular_time_bound_check, CountReference, Report, TimeSeries,
    Verdict,
};
use crate::flow::{Event, EventKind, Trajectory};
use crate::geometry::{hausdorff_within, PlanarCurve};

use super::CheckSpec;

/// Run parameters the checks depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunContext {
    pub stride: f64,
    pub max_time: f64,
    pub target_spacing: f64,
}

pub(super) struct Inputs<'a> {
    pub context: RunContext,
    pub trajectory: &'a Trajectory,
    pub events: &'a [Event],
    pub final_time: f64,
    /// Fixed reference curve of an intersection check.
    pub reference: Option<&'a PlanarCurve>,
}

fn initial(inp: &Inputs, component: usize) -> Option<PlanarCurve> {
    inp.trajectory.snapshots.first()?.components.get(component).map(|c| c.curve.clone())
}

fn not_applicable(check: &str, reason: &str) -> Report {
    Report::new(check, json!({}), Verdict::NotApplicable, json!({"reason": reason}))
}

pub(super) fn execute(spec: &CheckSpec, inp: &Inputs) -> Report {
    let name = spec.name();
    let params = serde_json::to_value(spec).expect("check serializes");
    let report = match spec {
        CheckSpec::Stationarity { component, tolerance } => stationarity(inp, *component, *tolerance),
        CheckSpec::CollapseTime { expected, rel_tolerance } => collapse_time(inp, *expected, *rel_tolerance),
        CheckSpec::SelfSimilarity {
            component,
            radius,
            tolerance,
        } => self_similarity(inp, *component, *radius, *tolerance),
        CheckSpec::ExpanderCloseness {
            component,
            bound,
            growth,
        } => closeness(inp, *component, *bound, *growth),
        CheckSpec::BetaTheta {
            component,
            radius,
            tolerance,
        } => beta_theta(inp, *component, *radius, *tolerance),
        CheckSpec::DensityMonotonicity { center, horizon, slack } => {
            density_monotonicity_check(inp.trajectory, *center, *horizon, *slack)
        }
        CheckSpec::LoopAreaLaw {
            component,
            min_diameter,
            tolerance,
        } => loop_area_law_check(
            inp.trajectory,
            *component,
            min_diameter.unwrap_or(10.0 * inp.context.target_spacing),
            *tolerance,
        ),
        CheckSpec::SingularTimeBound { component } => {
            singular_time_bound_check(inp.trajectory, *component, inp.context.stride)
        }
        CheckSpec::AngleJump {
            component,
            r_a,
            r_b,
            expected_jump,
            tolerance,
        } => {
            let tracked = angle_jump_tracker(inp.trajectory, *component, *r_a, *r_b);
            let mut r = tracked.report(*r_a, *r_b);
            if let Some(j) = expected_jump {
                let hit = tracked.jumps.len() == 1 && (tracked.jumps[0].magnitude - j).abs() <= *tolerance;
                if !hit && r.verdict == Verdict::Pass {
                    r.verdict = Verdict::Fail;
                }
                r.details["expected_jump_found"] = json!(hit);
            }
            r
        }
        CheckSpec::IntersectionCount {
            component,
            other_component,
            exclude_radius,
            expected_first,
            ..
        } => {
            let reference = match (other_component, inp.reference) {
                (Some(o), _) => CountReference::Component(*o),
                (None, Some(c)) => CountReference::Static(c),
                (None, None) => return not_applicable(name, "reference curve unavailable"),
            };
            let mut r = intersection_count_series(inp.trajectory, *component, reference, *exclude_radius);
            if let Some(e) = expected_first {
                let first = r.series.as_ref().and_then(|s| s.samples.first()).map(|&(_, v)| v);
                let hit = first == Some(*e as f64);
                if !hit && r.verdict == Verdict::Pass {
                    r.verdict = Verdict::Fail;
                }
                r.details["expected_first_found"] = json!(hit);
            }
            r
        }
        CheckSpec::SurgeryTopology {
            component,
            expected_surgeries,
        } => surgery_topology(inp, *component, *expected_surgeries),
    };
    // module checks report their own parameters; scenario parameters win
    Report { params, ..report }
}

fn stationarity(inp: &Inputs, component: usize, tolerance: f64) -> Report {
    let Some(c0) = initial(inp, component) else {
        return not_applicable("stationarity", "component missing at the first sample");
    };
    let diameter = c0.diameter();
    let mut series = TimeSeries::new("relative_drift");
    for s in inp.trajectory.by_time() {
        if let Some(c) = s.components.get(component) {
            series.push(s.t, hausdorff_within(&c.curve, &c0, f64::INFINITY) / diameter);
        }
    }
    let worst = series.values().fold(0.0, f64::max);
    Report::new(
        "stationarity",
        json!({}),
        Verdict::from_bool(worst < tolerance && series.len() > 1),
        json!({"max_relative_drift": worst, "diameter": diameter, "samples": series.len()}),
    )
    .with_series(series)
}

fn collapse_time(inp: &Inputs, expected: f64, rel_tolerance: f64) -> Report {
    let Some(e) = inp.events.iter().find(|e| e.kind == EventKind::LoopCollapse) else {
        return Report::new(
            "collapse_time",
            json!({}),
            Verdict::Fail,
            json!({"reason": "no collapse", "final_time": inp.final_time}),
        );
    };
    let rel = (e.t / expected - 1.0).abs();
    Report::new(
        "collapse_time",
        json!({}),
        Verdict::from_bool(rel < rel_tolerance),
        json!({"t_collapse": e.t, "expected": expected, "relative_error": rel}),
    )
}

fn self_similarity(inp: &Inputs, component: usize, radius: f64, tolerance: f64) -> Report {
    let Some(c0) = initial(inp, component) else {
        return not_applicable("self_similarity", "component missing at the first sample");
    };
    let t0 = inp.trajectory.snapshots[0].t;
    let diameter = c0.diameter();
    let mut series = TimeSeries::new("hausdorff_to_dilation");
    for s in inp.trajectory.by_time() {
        if let Some(c) = s.components.get(component) {
            let target = c0.scaled((s.t / t0).sqrt());
            series.push(s.t, hausdorff_within(&c.curve, &target, radius));
        }
    }
    let worst = series.values().fold(0.0, f64::max);
    Report::new(
        "self_similarity",
        json!({}),
        Verdict::from_bool(worst < tolerance * diameter && series.len() > 1),
        json!({"max_distance": worst, "bound": tolerance * diameter, "diameter": diameter}),
    )
    .with_series(series)
}

fn closeness(inp: &Inputs, component: usize, bound: f64, growth: f64) -> Report {
    let mut series = TimeSeries::new("expander_closeness");
    for s in inp.trajectory.by_time() {
        if let Some(c) = s.components.get(component) {
            if s.t > 0.0 && s.t < 4.0 {
                series.push(s.t, expander_closeness(&c.curve, s.t));
            }
        }
    }
    let Some(&(_, first)) = series.samples.first() else {
        return not_applicable("expander_closeness", "no sample with 0 < t < 4");
    };
    let worst = series.values().fold(0.0, f64::max);
    Report::new(
        "expander_closeness",
        json!({}),
        Verdict::from_bool(first < bound && worst <= growth * first),
        json!({"initial": first, "max": worst, "max_over_initial": worst / first}),
    )
    .with_series(series)
}

fn beta_theta(inp: &Inputs, component: usize, radius: Option<f64>, tolerance: f64) -> Report {
    let Some(c0) = initial(inp, component) else {
        return not_applicable("beta_theta", "component missing at the first sample");
    };
    let t = inp.trajectory.snapshots[0].t;
    let radius = radius.unwrap_or_else(|| 0.8 * c0.nodes().iter().map(|p| p.norm()).fold(0.0, f64::max));
    let diameter = c0.diameter();
    match beta_theta_invariant(&c0, t, radius) {
        Ok(b) => Report::new(
            "beta_theta",
            json!({}),
            Verdict::from_bool(b.oscillation < tolerance * diameter * diameter),
            json!({
                "t": t,
                "radius": radius,
                "oscillation": b.oscillation,
                "bound": tolerance * diameter * diameter,
                "nodes_used": b.nodes_used,
            }),
        ),
        Err(e) => Report::new("beta_theta", json!({}), Verdict::Fail, json!({"error": e.to_string()})),
    }
}

fn surgery_topology(inp: &Inputs, component: usize, expected: usize) -> Report {
    let events = inp.events;
    let surgeries: Vec<&Event> = events
        .iter()
        .filter(|e| e.kind == EventKind::Surgery && e.payload["component"] == component)
        .collect();
    let mut problems = Vec::new();
    for e in &surgeries {
        let p = &e.payload;
        let crossings = p["crossings_post"].as_u64();
        if crossings != Some(0) {
            problems.push(format!("t = {}: {crossings:?} crossings after surgery", e.t));
        }
        let change = p["rotation_index_pre"].as_f64().unwrap_or(f64::NAN) - p["rotation_index_cut"].as_f64().unwrap_or(f64::NAN);
        if !((change.abs() - 1.0).abs() < 1e-6) {
            problems.push(format!("t = {}: rotation index changed by {change}", e.t));
        }
    }
    if let Some(last) = surgeries.last() {
        let later: Vec<_> = events
            .iter()
            .filter(|e| e.t > last.t && e.kind != EventKind::Anomaly)
            .map(|e| json!({"t": e.t, "kind": e.kind}))
            .collect();
        if !later.is_empty() {
            problems.push(format!("{} events after the last surgery", later.len()));
        }
    }
    if surgeries.len() != expected {
        problems.push(format!("{} surgeries, expected {expected}", surgeries.len()));
    }
    if inp.final_time < inp.context.max_time {
        problems.push(format!("flow stopped at t = {}", inp.final_time));
    }
    let changes: Vec<_> = surgeries
        .iter()
        .map(|e| {
            json!({
                "t": e.t,
                "rotation_index_pre": e.payload["rotation_index_pre"],
                "rotation_index_cut": e.payload["rotation_index_cut"],
                "rotation_index_post": e.payload["rotation_index_post"],
                "crossings_post": e.payload["crossings_post"],
            })
        })
        .collect();
    Report::new(
        "surgery_topology",
        json!({}),
        Verdict::from_bool(problems.is_empty()),
        json!({"surgeries": changes, "final_time": inp.final_time, "problems": problems}),
    )
}

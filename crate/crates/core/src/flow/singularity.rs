use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::geometry::{
    extract_loops, h_length, remesh, rotation_index, self_intersections, LoopDescriptor,
    PlanarCurve, Point,
};

use super::{step::max_curvature, Ends, EventKind, FlowConfig, FlowError, FlowState};

/// What [`detect_singularity`] found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Singularity {
    /// A loop cut out at a self-crossing shrank below resolution.
    LoopCollapse {
        component: usize,
        descriptor: LoopDescriptor,
        /// True when the crossing lies within ten spacings of the origin.
        near_origin: bool,
    },
    /// An embedded closed component shrank below resolution.
    ClosedCollapse {
        component: usize,
        descriptor: LoopDescriptor,
    },
    CurvatureBlowup {
        component: usize,
        max_curvature: f64,
        min_spacing: f64,
    },
}

/// Smallest unresolved loop over all components, else a curvature blowup,
/// else nothing. Ties between loops go to the smaller area, then the lower
/// component index.
pub fn detect_singularity(state: &FlowState, config: &FlowConfig) -> Option<Singularity> {
    let mut found: Vec<(f64, usize, LoopDescriptor)> = Vec::new();
    for (idx, c) in state.components.iter().enumerate() {
        let crossings = self_intersections(&c.curve);
        for d in extract_loops(&c.curve, &crossings) {
            if d.area.abs() < config.area_threshold() && d.diameter < config.collapse_diameter() {
                found.push((d.area.abs(), idx, d));
            }
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if let Some((_, component, descriptor)) = found.into_iter().next() {
        if descriptor.is_whole_curve() {
            return Some(Singularity::ClosedCollapse {
                component,
                descriptor,
            });
        }
        let near_origin = descriptor.crossing.norm() < config.collapse_diameter();
        return Some(Singularity::LoopCollapse {
            component,
            descriptor,
            near_origin,
        });
    }
    for (idx, c) in state.components.iter().enumerate() {
        let k = max_curvature(&c.curve);
        let h = c.curve.min_spacing();
        if k * h > config.curvature_blowup_threshold {
            return Some(Singularity::CurvatureBlowup {
                component: idx,
                max_curvature: k,
                min_spacing: h,
            });
        }
    }
    None
}

fn loop_summary(d: &LoopDescriptor) -> serde_json::Value {
    json!({
        "crossing": [d.crossing.re, d.crossing.im],
        "segments": d.segment_indices,
        "area": d.area,
        "diameter": d.diameter,
        "exterior_angle": d.exterior_angle,
        "winds_origin": d.winds_origin,
        "nodes": d.loop_nodes.len(),
        "ambiguous": d.ambiguous,
    })
}

/// Logs the detection in the event log.
pub fn log_singularity(state: &mut FlowState, s: &Singularity) {
    match s {
        Singularity::LoopCollapse {
            component,
            descriptor,
            near_origin,
        } => {
            state.log(
                EventKind::LoopCollapse,
                json!({"component": component, "loop": loop_summary(descriptor)}),
            );
            if *near_origin {
                state.log(
                    EventKind::Anomaly,
                    json!({
                        "component": component,
                        "reason": "loop collapse close to the origin",
                        "distance": descriptor.crossing.norm(),
                    }),
                );
            }
        }
        Singularity::ClosedCollapse {
            component,
            descriptor,
        } => state.log(
            EventKind::LoopCollapse,
            json!({
                "component": component,
                "closed_component": true,
                "loop": loop_summary(descriptor),
            }),
        ),
        Singularity::CurvatureBlowup {
            component,
            max_curvature,
            min_spacing,
        } => state.log(
            EventKind::Blowup,
            json!({
                "component": component,
                "max_curvature": max_curvature,
                "min_spacing": min_spacing,
            }),
        ),
    }
}

/// Averages `(a + 2b + c)/4` over the listed nodes, twice.
fn mollify(nodes: &mut [Point], closed: bool, window: &[usize]) {
    let n = nodes.len();
    for _ in 0..2 {
        let prev = nodes.to_vec();
        for &k in window {
            let (a, c) = if closed {
                (prev[(k + n - 1) % n], prev[(k + 1) % n])
            } else if k == 0 || k + 1 >= n {
                continue;
            } else {
                (prev[k - 1], prev[k + 1])
            };
            nodes[k] = (a + prev[k] * 2.0 + c) * 0.25;
        }
    }
}

/// Cuts `descriptor`'s loop out of component `component`, re-joins the two
/// strands at the crossing point, smooths the five nodes around the junction
/// and remeshes. Logs a surgery event with rotation indices before and after.
pub fn surgery(
    state: &FlowState,
    config: &FlowConfig,
    component: usize,
    descriptor: &LoopDescriptor,
) -> Result<FlowState, FlowError> {
    let c = &state.components[component];
    let Some((i, j)) = descriptor.segment_indices else {
        return Err(FlowError::UnsupportedSurgery(
            "whole closed components are removed, not cut".into(),
        ));
    };
    if descriptor.winds_origin != 0 {
        return Err(FlowError::UnsupportedSurgery(format!(
            "loop winds {} times around the origin",
            descriptor.winds_origin
        )));
    }
    let z = c.curve.nodes();
    let n = z.len();
    let closed = c.curve.is_closed();
    if !closed && (i + 1 < c.frozen_head() || j + 1 + c.frozen_tail() > n) {
        return Err(FlowError::UnsupportedSurgery("loop reaches a held end".into()));
    }
    let q = descriptor.crossing;
    let tiny = 1e-6 * config.target_spacing;
    let mut nodes: Vec<Point>;
    let junction;
    if descriptor.wraps {
        nodes = vec![q];
        nodes.extend(z[i + 1..=j].iter().copied().filter(|p| (p - q).norm() > tiny));
        junction = 0;
    } else {
        let head_end = if (z[i] - q).norm() > tiny || i < c.frozen_head() { i + 1 } else { i };
        nodes = z[..head_end].to_vec();
        junction = nodes.len();
        if nodes.last().is_none_or(|p| (p - q).norm() > tiny) {
            nodes.push(q);
        }
        let tail = &z[j + 1..];
        let skip = usize::from(!tail.is_empty() && (tail[0] - q).norm() <= tiny && tail.len() > c.frozen_tail());
        nodes.extend_from_slice(&tail[skip..]);
    }
    let cut = PlanarCurve::new(nodes.clone(), closed)
        .map_err(|e| FlowError::Geometry(format!("surgery: {e}")))?;
    let rot_pre = rotation_index(&c.curve);
    let rot_cut = rotation_index(&cut);

    let m = nodes.len();
    let window: Vec<usize> = (-2i64..=2)
        .filter_map(|d| {
            let k = junction as i64 + d;
            if closed {
                Some(k.rem_euclid(m as i64) as usize)
            } else if k >= c.frozen_head() as i64 && k + (c.frozen_tail() as i64) < m as i64 {
                Some(k as usize)
            } else {
                None
            }
        })
        .collect();
    mollify(&mut nodes, closed, &window);
    let smoothed = PlanarCurve::new(nodes, closed)
        .map_err(|e| FlowError::Geometry(format!("surgery: {e}")))?;
    let (curve, _) = remesh(
        &smoothed,
        config.target_spacing,
        c.frozen_head(),
        c.frozen_tail(),
        config.min_closed_nodes,
    )
    .map_err(|e| FlowError::Geometry(format!("surgery: {e}")))?;

    let mut next = state.clone();
    let payload = json!({
        "component": component,
        "loop": loop_summary(descriptor),
        "rotation_index_pre": rot_pre,
        "rotation_index_cut": rot_cut,
        "rotation_index_post": rotation_index(&curve),
        "crossings_pre": self_intersections(&c.curve).len(),
        "crossings_post": self_intersections(&curve).len(),
        "h_length_pre": h_length(&c.curve),
        "h_length_post": h_length(&curve),
    });
    next.components[component].curve = curve;
    next.log(EventKind::Surgery, payload);
    Ok(next)
}

/// Drops a collapsed closed component.
pub fn remove_component(state: &FlowState, component: usize) -> FlowState {
    let mut next = state.clone();
    let removed = next.components.remove(component);
    debug_assert!(matches!(removed.ends, Ends::Closed));
    next
}

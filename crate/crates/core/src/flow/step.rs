use crate::geometry::{frames, h_length, remesh, PlanarCurve, Point};

use super::{velocity_field, Component, FlowConfig, FlowError, FlowState, StepStats};

/// Steps shorter than this mean the mesh has degenerated.
pub const MIN_DT: f64 = 1e-14;

/// Time step from the parabolic CFL condition over all components, cut so
/// the run lands exactly on `max_time`.
pub fn stable_dt(state: &FlowState, config: &FlowConfig) -> f64 {
    let h = state
        .components
        .iter()
        .map(|c| c.curve.min_spacing())
        .fold(f64::INFINITY, f64::min);
    (config.cfl_factor * h * h).min(config.max_time - state.time)
}

fn velocities(c: &Component, nodes: &[Point]) -> Result<Vec<Point>, FlowError> {
    let curve = PlanarCurve::new(nodes.to_vec(), c.curve.is_closed())
        .map_err(|e| FlowError::Geometry(e.to_string()))?;
    let mut v = velocity_field(&curve)?;
    let n = v.len();
    for k in 0..c.frozen_head() {
        v[k] = Point::new(0.0, 0.0);
    }
    for k in 0..c.frozen_tail() {
        v[n - 1 - k] = Point::new(0.0, 0.0);
    }
    Ok(v)
}

fn advance(c: &Component, dt: f64) -> Result<(Vec<Point>, f64), FlowError> {
    let z0 = c.curve.nodes();
    let v1 = velocities(c, z0)?;
    let mid: Vec<Point> = z0.iter().zip(&v1).map(|(z, v)| z + v * (0.5 * dt)).collect();
    let v2 = velocities(c, &mid)?;
    let mut out: Vec<Point> = z0.iter().zip(&v2).map(|(z, v)| z + v * dt).collect();
    if c.pinned_at_origin() {
        out[0] = Point::new(0.0, 0.0);
    }
    let speed = v2.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok((out, speed))
}

/// One explicit midpoint step of `dx/dt = k - x_perp/|x|^2` for every
/// component, followed by remeshing every `resample_period` steps.
///
/// On error the input state is untouched.
pub fn step(state: &FlowState, config: &FlowConfig) -> Result<FlowState, FlowError> {
    let dt = stable_dt(state, config);
    if dt < MIN_DT {
        return Err(FlowError::Stall { dt });
    }
    let mut next = state.clone();
    let mut stats = StepStats {
        dt,
        ..StepStats::default()
    };
    let remesh_now = (state.steps + 1) % config.resample_period as u64 == 0;
    for (idx, c) in state.components.iter().enumerate() {
        let (nodes, speed) = advance(c, dt).map_err(|e| e.in_component(idx))?;
        if nodes.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(FlowError::NumericalBlowup { component: idx });
        }
        let moved = PlanarCurve::new(nodes, c.curve.is_closed())
            .map_err(|e| FlowError::Geometry(format!("component {idx}: {e}")))?;
        stats.h_length_before += h_length(&c.curve);
        stats.h_length_after += h_length(&moved);
        stats.max_speed = stats.max_speed.max(speed);
        let curve = if remesh_now {
            let (r, rs) = remesh(
                &moved,
                config.target_spacing,
                c.frozen_head(),
                c.frozen_tail(),
                config.min_closed_nodes,
            )
            .map_err(|e| FlowError::Geometry(format!("component {idx}: {e}")))?;
            stats.splits += rs.splits;
            stats.merges += rs.merges;
            r
        } else {
            moved
        };
        stats.max_curvature = stats.max_curvature.max(max_curvature(&curve));
        next.components[idx].curve = curve;
    }
    next.time = state.time + dt;
    next.steps = state.steps + 1;
    next.step_stats = stats;
    Ok(next)
}

pub fn max_curvature(curve: &PlanarCurve) -> f64 {
    frames(curve)
        .iter()
        .map(|f| f.curvature.norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{EquivariantProfile, Point};
    use std::f64::consts::TAU;

    fn ray_state(angle: f64) -> FlowState {
        let nodes = (0..=100).map(|k| Point::from_polar(0.1 * k as f64, angle)).collect();
        let prof = EquivariantProfile::new(PlanarCurve::open(nodes).unwrap(), angle).unwrap();
        FlowState::new(0.0, vec![Component::profile("ray", &prof)])
    }

    #[test]
    fn ray_does_not_move() {
        let config = FlowConfig::new(0.1, 1.0);
        let mut s = ray_state(2.5);
        let start = s.components[0].curve.clone();
        for _ in 0..200 {
            s = step(&s, &config).unwrap();
        }
        for (a, b) in start.nodes().iter().zip(s.components[0].curve.nodes()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(s.components[0].curve.nodes()[0], Point::new(0.0, 0.0));
    }

    #[test]
    fn centred_circle_follows_area_ode() {
        let r0: f64 = 1.0;
        let n = 256;
        let nodes = (0..n).map(|k| Point::from_polar(r0, TAU * k as f64 / n as f64)).collect();
        let mut s = FlowState::new(0.0, vec![Component::closed("c", PlanarCurve::closed(nodes).unwrap())]);
        let config = FlowConfig::new(TAU / n as f64, 1.0);
        while s.time < 0.2 {
            s = step(&s, &config).unwrap();
        }
        let r = s.components[0].curve.nodes()[0].norm();
        let exact = (r0 * r0 - 4.0 * s.time).sqrt();
        assert!((r / exact - 1.0).abs() < 5e-3, "{r} vs {exact}");
    }

    #[test]
    fn stalls_when_spacing_degenerates() {
        let mut config = FlowConfig::new(0.1, 1.0);
        config.cfl_factor = 1e-30;
        assert!(matches!(step(&ray_state(0.3), &config), Err(FlowError::Stall { .. })));
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::flow::Trajectory;
use crate::geometry::{lagrangian_angle, PlanarCurve};

use super::{Report, TimeSeries, Verdict};

/// A change of `f` by more than `pi` between consecutive samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub t_before: f64,
    pub t_after: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleJump {
    /// `f(t)` at distinct sample times, post-event values where a surgery
    /// shares its time with the pre-event sample.
    pub series: TimeSeries,
    pub jumps: Vec<Jump>,
    /// Largest `|df| / dt` on each stretch between jumps.
    pub lipschitz: Vec<f64>,
    /// Samples where an anchor circle was not crossed, with the reason.
    pub gaps: Vec<(f64, String)>,
}

impl AngleJump {
    pub fn report(&self, r_a: f64, r_b: f64) -> Report {
        let ok = self.gaps.is_empty() && self.lipschitz.iter().all(|c| c.is_finite());
        Report::new(
            "angle_jump",
            json!({"r_a": r_a, "r_b": r_b}),
            Verdict::from_bool(ok),
            json!({"jumps": self.jumps, "lipschitz": self.lipschitz, "gaps": self.gaps}),
        )
        .with_series(self.series.clone())
    }
}

/// Lifted angle where the curve crosses `|z| = r`, interpolated inside the
/// crossing segment; the first such crossing or the last.
fn anchor(curve: &PlanarCurve, theta: &[f64], r: f64, last: bool) -> Option<(usize, f64)> {
    let z = curve.nodes();
    let hit = |i: &usize| {
        let (a, b) = (z[*i].norm() - r, z[*i + 1].norm() - r);
        a * b <= 0.0 && a != b
    };
    let i = if last {
        (0..z.len() - 1).rev().find(hit)?
    } else {
        (0..z.len() - 1).find(hit)?
    };
    let (a, b) = (z[i].norm(), z[i + 1].norm());
    let s = (r - a) / (b - a);
    Some((i, theta[i] + s * (theta[i + 1] - theta[i])))
}

/// `f = theta(b) - theta(a)` along one component: `a` its first crossing of
/// `|z| = r_a`, `b` its last crossing of `|z| = r_b`.
pub fn angle_difference(curve: &PlanarCurve, r_a: f64, r_b: f64) -> Result<f64, String> {
    let theta = lagrangian_angle(curve).map_err(|e| e.to_string())?;
    let (ia, fa) = anchor(curve, &theta, r_a, false).ok_or(format!("circle r = {r_a} not crossed"))?;
    let (ib, fb) = anchor(curve, &theta, r_b, true).ok_or(format!("circle r = {r_b} not crossed"))?;
    if ib < ia {
        return Err("outer anchor precedes inner anchor".into());
    }
    Ok(fb - fa)
}

/// Tracks `f(t)` on component `component` over every sample, flags jumps
/// above `pi` and estimates a Lipschitz constant on each side.
pub fn angle_jump_tracker(trajectory: &Trajectory, component: usize, r_a: f64, r_b: f64) -> AngleJump {
    let mut series = TimeSeries::new("angle_jump_f");
    let mut jumps = Vec::new();
    let mut lipschitz = vec![0.0f64];
    let mut gaps = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for s in &trajectory.snapshots {
        let Some(c) = s.components.get(component) else {
            gaps.push((s.t, format!("no component {component}")));
            continue;
        };
        let f = match angle_difference(&c.curve, r_a, r_b) {
            Ok(f) => f,
            Err(e) => {
                gaps.push((s.t, e));
                continue;
            }
        };
        if let Some((tp, fp)) = prev {
            let df = f - fp;
            if df.abs() > PI {
                jumps.push(Jump {
                    t_before: tp,
                    t_after: s.t,
                    magnitude: df,
                });
                lipschitz.push(0.0);
            } else if s.t > tp {
                let last = lipschitz.last_mut().unwrap();
                *last = last.max(df.abs() / (s.t - tp));
            }
        }
        series.push_replacing(s.t, f);
        prev = Some((s.t, f));
    }
    AngleJump {
        series,
        jumps,
        lipschitz,
        gaps,
    }
}

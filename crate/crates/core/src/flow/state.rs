use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::geometry::{EquivariantProfile, PlanarCurve};

/// Boundary treatment at one end of an open component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndCondition {
    /// Node pinned at the origin with odd reflection across it.
    Origin,
    /// Last two nodes held fixed; `asymptote` is the far-field direction.
    Clamped { asymptote: Option<f64> },
}

impl EndCondition {
    /// Nodes at this end that never move.
    pub fn frozen_nodes(&self) -> usize {
        match self {
            EndCondition::Origin => 1,
            EndCondition::Clamped { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ends {
    Closed,
    Open { start: EndCondition, end: EndCondition },
}

/// One evolving curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub label: String,
    pub curve: PlanarCurve,
    pub ends: Ends,
}

impl Component {
    pub fn closed(label: impl Into<String>, curve: PlanarCurve) -> Self {
        Component {
            label: label.into(),
            curve,
            ends: Ends::Closed,
        }
    }

    /// An origin-pinned half-profile clamped along its asymptote.
    pub fn profile(label: impl Into<String>, profile: &EquivariantProfile) -> Self {
        Component {
            label: label.into(),
            curve: profile.curve.clone(),
            ends: Ends::Open {
                start: EndCondition::Origin,
                end: EndCondition::Clamped {
                    asymptote: Some(profile.asymptote_angle),
                },
            },
        }
    }

    /// An open curve clamped at both ends.
    pub fn clamped(label: impl Into<String>, curve: PlanarCurve) -> Self {
        let start = curve.nodes()[0].arg();
        let end = curve.nodes()[curve.len() - 1].arg();
        Component {
            label: label.into(),
            curve,
            ends: Ends::Open {
                start: EndCondition::Clamped { asymptote: Some(start) },
                end: EndCondition::Clamped { asymptote: Some(end) },
            },
        }
    }

    pub fn frozen_head(&self) -> usize {
        match self.ends {
            Ends::Closed => 0,
            Ends::Open { start, .. } => start.frozen_nodes(),
        }
    }

    pub fn frozen_tail(&self) -> usize {
        match self.ends {
            Ends::Closed => 0,
            Ends::Open { end, .. } => end.frozen_nodes(),
        }
    }

    pub fn pinned_at_origin(&self) -> bool {
        matches!(
            self.ends,
            Ends::Open {
                start: EndCondition::Origin,
                ..
            }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    LoopCollapse,
    Surgery,
    Blowup,
    Anomaly,
}

/// Entry of the append-only event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub payload: Value,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub dt: f64,
    pub max_speed: f64,
    pub max_curvature: f64,
    /// Sum of h-lengths before and after the flow update (remeshing and
    /// surgery excluded).
    pub h_length_before: f64,
    pub h_length_after: f64,
    pub splits: usize,
    pub merges: usize,
}

/// Time, curves and history of one flow run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub time: f64,
    pub steps: u64,
    pub components: Vec<Component>,
    pub step_stats: StepStats,
    pub events: Vec<Event>,
}

impl FlowState {
    pub fn new(time: f64, components: Vec<Component>) -> Self {
        FlowState {
            time,
            steps: 0,
            components,
            step_stats: StepStats::default(),
            events: Vec::new(),
        }
    }

    pub fn log(&mut self, kind: EventKind, payload: Value) {
        self.events.push(Event {
            t: self.time,
            kind,
            payload,
        });
    }

    /// Total h-length over all components.
    pub fn h_length(&self) -> f64 {
        self.components
            .iter()
            .map(|c| crate::geometry::h_length(&c.curve))
            .sum()
    }

    /// Event log as JSON lines.
    pub fn events_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn event_line_shape() {
        let mut s = FlowState::new(1.5, Vec::new());
        s.log(EventKind::LoopCollapse, json!({"area": 0.01}));
        let line = s.events_jsonl();
        assert_eq!(line, "{\"t\":1.5,\"kind\":\"loop_collapse\",\"payload\":{\"area\":0.01}}\n");
    }
}

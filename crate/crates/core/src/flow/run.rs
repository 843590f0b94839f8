use serde::{Deserialize, Serialize};

use crate::diagnostics::TimeSeries;
use crate::geometry::self_intersections;

use super::{
    detect_singularity, log_singularity, remove_component, step, step::max_curvature, surgery,
    Component, FlowConfig, FlowError, FlowState, Singularity,
};

/// Why a sample was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Stride,
    /// State just before a surgery or removal, at the event time.
    PreEvent,
    /// State just after it, at the same time.
    PostEvent,
    Final,
}

/// Called with the state at every sample.
pub trait Hook {
    fn sample(&mut self, state: &FlowState, kind: SampleKind);
}

impl<F: FnMut(&FlowState, SampleKind)> Hook for F {
    fn sample(&mut self, state: &FlowState, kind: SampleKind) {
        self(state, kind)
    }
}

/// Curves at one sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub step: u64,
    pub kind: SampleKind,
    pub components: Vec<Component>,
}

/// Sampled history of a run, in sample order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    /// Snapshots at distinct times, keeping the post-event state where a
    /// pre/post pair shares a time.
    pub fn by_time(&self) -> Vec<&Snapshot> {
        let mut out: Vec<&Snapshot> = Vec::new();
        for s in &self.snapshots {
            match out.last() {
                Some(last) if last.t >= s.t => {
                    *out.last_mut().unwrap() = s;
                }
                _ => out.push(s),
            }
        }
        out
    }
}

impl Hook for Trajectory {
    fn sample(&mut self, state: &FlowState, kind: SampleKind) {
        self.snapshots.push(Snapshot {
            t: state.time,
            step: state.steps,
            kind,
            components: state.components.clone(),
        });
    }
}

/// Built-in series recorded by [`run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSeries {
    pub h_length: TimeSeries,
    pub crossings: TimeSeries,
    pub max_curvature: TimeSeries,
}

impl RunSeries {
    fn new() -> Self {
        RunSeries {
            h_length: TimeSeries::new("h_length"),
            crossings: TimeSeries::new("self_crossings"),
            max_curvature: TimeSeries::new("max_curvature"),
        }
    }

    fn record(&mut self, state: &FlowState) {
        let crossings: usize = state
            .components
            .iter()
            .map(|c| self_intersections(&c.curve).len())
            .sum();
        let k = state
            .components
            .iter()
            .map(|c| max_curvature(&c.curve))
            .fold(0.0, f64::max);
        self.h_length.push_replacing(state.time, state.h_length());
        self.crossings.push_replacing(state.time, crossings as f64);
        self.max_curvature.push_replacing(state.time, k);
    }

    pub fn all(&self) -> [&TimeSeries; 3] {
        [&self.h_length, &self.crossings, &self.max_curvature]
    }
}

/// A step or surgery failure together with the last good state.
#[derive(Debug)]
pub struct RunError {
    pub error: FlowError,
    pub state: Box<FlowState>,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (at t = {})", self.error, self.state.time)
    }
}

impl std::error::Error for RunError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

fn sample_all(hooks: &mut [&mut dyn Hook], series: &mut RunSeries, state: &FlowState, kind: SampleKind) {
    series.record(state);
    for h in hooks.iter_mut() {
        h.sample(state, kind);
    }
}

/// Advances until `max_time`, a blowup, or every component has collapsed.
///
/// Hooks see the initial state, the first state at or past each multiple of
/// `stride`, the states on both sides of every surgery, and the final state.
/// Sampling never changes the step sequence.
pub fn run(
    state: FlowState,
    config: &FlowConfig,
    stride: f64,
    hooks: &mut [&mut dyn Hook],
) -> Result<(FlowState, RunSeries), RunError> {
    config.validate().map_err(|error| RunError {
        error,
        state: Box::new(state.clone()),
    })?;
    let mut series = RunSeries::new();
    let mut state = state;
    let t0 = state.time;
    sample_all(hooks, &mut series, &state, SampleKind::Stride);
    let mut marks = 1u64;
    let fail = |error: FlowError, s: &FlowState| RunError {
        error,
        state: Box::new(s.clone()),
    };
    while state.time < config.max_time && !state.components.is_empty() {
        state = match step(&state, config) {
            Ok(s) => s,
            Err(e) => return Err(fail(e, &state)),
        };
        let mut terminal = false;
        while let Some(found) = detect_singularity(&state, config) {
            match &found {
                Singularity::LoopCollapse {
                    component,
                    descriptor,
                    ..
                } => {
                    sample_all(hooks, &mut series, &state, SampleKind::PreEvent);
                    log_singularity(&mut state, &found);
                    state = surgery(&state, config, *component, descriptor).map_err(|e| fail(e, &state))?;
                    sample_all(hooks, &mut series, &state, SampleKind::PostEvent);
                }
                Singularity::ClosedCollapse { component, .. } => {
                    sample_all(hooks, &mut series, &state, SampleKind::PreEvent);
                    log_singularity(&mut state, &found);
                    state = remove_component(&state, *component);
                    sample_all(hooks, &mut series, &state, SampleKind::PostEvent);
                }
                Singularity::CurvatureBlowup { .. } => {
                    log_singularity(&mut state, &found);
                    terminal = true;
                    break;
                }
            }
        }
        if terminal {
            break;
        }
        if state.time >= t0 + stride * marks as f64 {
            sample_all(hooks, &mut series, &state, SampleKind::Stride);
            while t0 + stride * marks as f64 <= state.time {
                marks += 1;
            }
        }
    }
    if series.h_length.last_t() != Some(state.time) {
        sample_all(hooks, &mut series, &state, SampleKind::Final);
    }
    Ok((state, series))
}

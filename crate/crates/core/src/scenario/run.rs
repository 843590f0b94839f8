use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::diagnostics::{Report, Verdict};
use crate::flow::{run, Component, Event, FlowState, SampleKind, Trajectory};
use crate::geometry::{resample, EquivariantProfile, PlanarCurve, Point};
use crate::io::write_trajectory;
use crate::profiles::{
    expander_profile, lawlor_profile, ray, sigma_curve, whitney_curve, ExpanderSpec, ProfileError, SigmaSpec,
    ValidationReport,
};
use crate::render::emit_svg;

use super::checks::{execute, Inputs, RunContext};
use super::{CheckSpec, ProfileSpec, Scenario, ScenarioError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub verdict: Verdict,
}

/// What a scenario run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitReport {
    pub id: String,
    /// All verdicts pass or are not applicable and no error occurred.
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub final_time: Option<f64>,
    pub events: usize,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip)]
    pub dir: PathBuf,
}

const LAWLOR_SOLVER_SPACING: f64 = 0.01;

/// Flow components of one profile and its construction report, if it has one.
pub fn build_profile(spec: &ProfileSpec, index: usize) -> Result<(Vec<Component>, Option<ValidationReport>), ProfileError> {
    let label = spec
        .label()
        .map(str::to_string)
        .unwrap_or_else(|| format!("{}{index}", spec.kind()));
    let h = spec.spacing();
    Ok(match spec {
        ProfileSpec::Ray { angle, length, .. } => (vec![Component::profile(label, &ray(*angle, *length, h)?)], None),
        ProfileSpec::Lawlor {
            offset,
            direction,
            extent,
            ..
        } => {
            // the neck needs a fine mesh to be stationary to the report's tolerance
            let fine = if *offset == 0.0 { h } else { h.min(LAWLOR_SOLVER_SPACING) };
            let l = lawlor_profile(*offset, *direction, *extent, fine)?;
            let comps = if l.singular {
                l.components
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let angle = c.nodes()[c.len() - 1].arg();
                        Ok(Component::profile(format!("{label}.{k}"), &EquivariantProfile::new(c.clone(), angle)?))
                    })
                    .collect::<Result<Vec<_>, ProfileError>>()?
            } else {
                let c = &l.components[0];
                let c = if fine < h { resample(c, h)? } else { c.clone() };
                vec![Component::clamped(label, c)]
            };
            (comps, Some(l.report))
        }
        ProfileSpec::Expander { opening_angle, s_max, .. } => {
            let mut e = ExpanderSpec::new(*opening_angle);
            e.s_max = *s_max;
            let x = expander_profile(&e)?;
            (vec![Component::clamped(label, resample(&x.curve, h)?)], Some(x.report))
        }
        ProfileSpec::Sigma {
            loop_area,
            cone_param,
            extent,
            ..
        } => {
            let s = sigma_curve(&SigmaSpec {
                loop_area: *loop_area,
                cone_param: *cone_param,
                extent: *extent,
                spacing: h,
            })?;
            (vec![Component::profile(label, &s.profile)], Some(s.report))
        }
        ProfileSpec::Whitney { .. } => {
            let w = whitney_curve(&spec.whitney_spec())?;
            (vec![Component::profile(label, &w.profile)], Some(w.report))
        }
        ProfileSpec::Circle { center, radius, .. } => {
            let n = ((std::f64::consts::TAU * radius / h).ceil() as usize).max(12);
            let c = Point::new(center[0], center[1]);
            let nodes = (0..n)
                .map(|k| c + Point::from_polar(*radius, std::f64::consts::TAU * k as f64 / n as f64))
                .collect();
            (vec![Component::closed(label, PlanarCurve::closed(nodes)?)], None)
        }
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> String + '_ {
    move |e| format!("{}: {e}", path.display())
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), String> {
    fs::write(path, contents).map_err(io_err(path))
}

fn json_text<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

struct Pipeline<'a> {
    scenario: &'a Scenario,
    dir: PathBuf,
    checks: Vec<CheckOutcome>,
    final_time: Option<f64>,
    events: usize,
}

impl Pipeline<'_> {
    fn sub(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn record(&mut self, file: &str, report: &Report) -> Result<(), String> {
        write(&self.sub("reports").join(format!("{file}.json")), json_text(report))?;
        if let Some(series) = &report.series {
            write(&self.sub("series").join(format!("{file}.csv")), series.to_csv_string())?;
        }
        self.checks.push(CheckOutcome {
            check: report.check.clone(),
            verdict: report.verdict,
        });
        Ok(())
    }

    fn prepare(&self) -> Result<(), String> {
        for d in ["snapshots", "series", "reports", "render"] {
            let p = self.sub(d);
            if p.exists() {
                fs::remove_dir_all(&p).map_err(io_err(&p))?;
            }
            fs::create_dir_all(&p).map_err(io_err(&p))?;
        }
        for f in ["events.jsonl", "error.json"] {
            let p = self.sub(f);
            if p.exists() {
                fs::remove_file(&p).map_err(io_err(&p))?;
            }
        }
        Ok(())
    }

    fn save_trajectory(&self, traj: &Trajectory, state: &FlowState) -> Result<(), String> {
        write_trajectory(traj, &self.sub("snapshots")).map_err(|e| e.to_string())?;
        write(&self.sub("events.jsonl"), state.events_jsonl())?;
        for (k, s) in traj.snapshots.iter().enumerate() {
            let wanted = k == 0 || s.kind != SampleKind::Stride;
            if wanted && !s.components.is_empty() {
                let svg = emit_svg(&s.components, &self.scenario.svg).map_err(|e| e.to_string())?;
                write(&self.sub("render").join(format!("snapshot_{k:06}.svg")), svg)?;
            }
        }
        Ok(())
    }

    fn execute(&mut self) -> Result<(), String> {
        let s = self.scenario;
        self.prepare()?;
        let mut components = Vec::new();
        for (k, p) in s.profiles.iter().enumerate() {
            let (comps, report) = build_profile(p, k).map_err(|e| format!("profiles[{k}]: {e}"))?;
            if let Some(r) = report {
                let verdict = Verdict::from_bool(r.passed());
                let rep = Report::new(
                    "profile_validation",
                    json!({"profile": k, "kind": p.kind()}),
                    verdict,
                    serde_json::to_value(&r).expect("report serializes"),
                );
                self.record(&format!("profile_{k:02}_{}", p.kind()), &rep)?;
            }
            components.extend(comps);
        }
        let mut traj = Trajectory::default();
        let state = FlowState::new(s.start_time, components);
        let (end, series) = match run(state, &s.flow, s.stride, &mut [&mut traj]) {
            Ok(r) => r,
            Err(e) => {
                self.final_time = Some(e.state.time);
                self.events = e.state.events.len();
                self.save_trajectory(&traj, &e.state)?;
                return Err(format!("flow: {e}"));
            }
        };
        self.final_time = Some(end.time);
        self.events = end.events.len();
        self.save_trajectory(&traj, &end)?;
        for ts in series.all() {
            write(&self.sub("series").join(format!("{}.csv", ts.name)), ts.to_csv_string())?;
        }

        let context = RunContext {
            stride: s.stride,
            max_time: s.flow.max_time,
            target_spacing: s.flow.target_spacing,
        };
        for (k, c) in s.diagnostics.iter().enumerate() {
            let report = run_check(c, &traj, &end.events, end.time, context).map_err(|e| format!("diagnostics[{k}]: {e}"))?;
            self.record(&format!("check_{k:02}_{}", c.name()), &report)?;
        }
        Ok(())
    }
}

/// Builds the profiles, runs the flow and every check, and writes
/// `<out_root>/<id>/{snapshots/, series/, reports/, events.jsonl, render/}`.
///
/// Failures leave whatever was written in place plus `error.json`.
pub fn run_scenario(scenario: &Scenario, out_root: &Path) -> ExitReport {
    let dir = out_root.join(&scenario.id);
    let mut p = Pipeline {
        scenario,
        dir: dir.clone(),
        checks: Vec::new(),
        final_time: None,
        events: 0,
    };
    let error = scenario
        .validate()
        .map_err(|e| e.to_string())
        .and_then(|_| fs::create_dir_all(&dir).map_err(io_err(&dir)))
        .and_then(|_| p.execute())
        .err();
    let report = ExitReport {
        id: scenario.id.clone(),
        ok: error.is_none() && p.checks.iter().all(|c| c.verdict.is_ok()),
        error,
        final_time: p.final_time,
        events: p.events,
        checks: p.checks,
        dir,
    };
    if let Some(e) = &report.error {
        let _ = write(&report.dir.join("error.json"), json_text(&json!({"id": report.id, "error": e})));
    }
    let _ = write(&report.dir.join("reports").join("exit_report.json"), json_text(&report));
    report
}

/// Runs scenarios on a pool of `workers` threads; duplicate ids are
/// refused before anything runs.
pub fn run_scenarios(scenarios: &[Scenario], out_root: &Path, workers: usize) -> Result<Vec<ExitReport>, ScenarioError> {
    let mut seen = std::collections::BTreeSet::new();
    for s in scenarios {
        if !seen.insert(s.id.as_str()) {
            return Err(ScenarioError::Invalid {
                key: "id".into(),
                message: format!("{:?} appears twice in one run", s.id),
            });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ScenarioError::Invalid {
            key: "workers".into(),
            message: e.to_string(),
        })?;
    use rayon::prelude::*;
    Ok(pool.install(|| scenarios.par_iter().map(|s| run_scenario(s, out_root)).collect()))
}

/// One check on a recorded run; `final_time` is where the flow stopped.
pub fn run_check(
    spec: &CheckSpec,
    trajectory: &Trajectory,
    events: &[Event],
    final_time: f64,
    context: RunContext,
) -> Result<Report, ScenarioError> {
    let reference = match spec {
        CheckSpec::IntersectionCount {
            reference: Some(r), ..
        } => {
            let (comps, _) = build_profile(r, 0).map_err(|e| ScenarioError::Invalid {
                key: "reference".into(),
                message: e.to_string(),
            })?;
            Some(comps[0].curve.clone())
        }
        _ => None,
    };
    if trajectory.snapshots.is_empty() {
        return Err(ScenarioError::Invalid {
            key: "trajectory".into(),
            message: "no snapshots".into(),
        });
    }
    let inputs = Inputs {
        context,
        trajectory,
        events,
        final_time,
        reference: reference.as_ref(),
    };
    Ok(execute(spec, &inputs))
}

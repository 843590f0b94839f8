//! Scenario files: which profiles to build, how to flow them and which
//! checks to run on the result.

mod checks;
mod run;

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::FlowConfig;
use crate::profiles::{ExpanderSpec, SigmaSpec, WhitneySpec};
use crate::render::SvgStyle;

pub use checks::RunContext;
pub use run::{build_profile, run_check, run_scenario, run_scenarios, CheckOutcome, ExitReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{0}")]
    Parse(String),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub id: String,
    #[serde(default)]
    pub start_time: f64,
    /// Time between stride samples.
    pub stride: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub flow: FlowConfig,
    #[serde(default)]
    pub svg: SvgStyle,
    pub profiles: Vec<ProfileSpec>,
    #[serde(default)]
    pub diagnostics: Vec<CheckSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Ray {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        angle: f64,
        length: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing: Option<f64>,
    },
    /// Stationary neck; zero offset gives the two rays it degenerates to.
    Lawlor {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        offset: f64,
        direction: f64,
        extent: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing: Option<f64>,
    },
    /// Solved at the module's own resolution, then resampled to `spacing`.
    Expander {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        opening_angle: f64,
        #[serde(default = "default_s_max")]
        s_max: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing: Option<f64>,
    },
    Sigma {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        loop_area: f64,
        #[serde(default = "default_cone")]
        cone_param: f64,
        #[serde(default = "default_sigma_extent")]
        extent: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing: Option<f64>,
    },
    Whitney {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        eps: f64,
        theta2: f64,
        theta3: f64,
        #[serde(default = "one")]
        outer_scale: f64,
        #[serde(default = "default_whitney_extent")]
        extent: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing: Option<f64>,
    },
    Circle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing: Option<f64>,
    },
}

fn default_s_max() -> f64 {
    ExpanderSpec::new(0.75 * PI).s_max
}
fn default_cone() -> f64 {
    SigmaSpec::new(1.0, 1.0).cone_param
}
fn default_sigma_extent() -> f64 {
    SigmaSpec::new(1.0, 1.0).extent
}
fn default_whitney_extent() -> f64 {
    WhitneySpec::new(0.1, 0.6 * PI, 0.8 * PI, 0.01).extent
}
fn one() -> f64 {
    1.0
}

impl ProfileSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProfileSpec::Ray { .. } => "ray",
            ProfileSpec::Lawlor { .. } => "lawlor",
            ProfileSpec::Expander { .. } => "expander",
            ProfileSpec::Sigma { .. } => "sigma",
            ProfileSpec::Whitney { .. } => "whitney",
            ProfileSpec::Circle { .. } => "circle",
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            ProfileSpec::Ray { label, .. }
            | ProfileSpec::Lawlor { label, .. }
            | ProfileSpec::Expander { label, .. }
            | ProfileSpec::Sigma { label, .. }
            | ProfileSpec::Whitney { label, .. }
            | ProfileSpec::Circle { label, .. } => label.as_deref(),
        }
    }

    fn spacing_mut(&mut self) -> &mut Option<f64> {
        match self {
            ProfileSpec::Ray { spacing, .. }
            | ProfileSpec::Lawlor { spacing, .. }
            | ProfileSpec::Expander { spacing, .. }
            | ProfileSpec::Sigma { spacing, .. }
            | ProfileSpec::Whitney { spacing, .. }
            | ProfileSpec::Circle { spacing, .. } => spacing,
        }
    }

    /// Spacing after defaults are filled in.
    pub fn spacing(&self) -> f64 {
        match self {
            ProfileSpec::Ray { spacing, .. }
            | ProfileSpec::Lawlor { spacing, .. }
            | ProfileSpec::Expander { spacing, .. }
            | ProfileSpec::Sigma { spacing, .. }
            | ProfileSpec::Whitney { spacing, .. }
            | ProfileSpec::Circle { spacing, .. } => spacing.unwrap_or(f64::NAN),
        }
    }

    /// Flow components this profile turns into.
    pub fn component_count(&self) -> usize {
        match self {
            ProfileSpec::Lawlor { offset, .. } if *offset == 0.0 => 2,
            _ => 1,
        }
    }

    fn validate(&self, key: &str) -> Result<(), ScenarioError> {
        let h = self.spacing();
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(format!("{key}.spacing"), format!("must be positive, got {h}")));
        }
        let module = |e: crate::profiles::ProfileError| invalid(key, e.to_string());
        match self {
            ProfileSpec::Ray { angle, length, .. } => {
                if !angle.is_finite() {
                    return Err(invalid(format!("{key}.angle"), "must be finite"));
                }
                if !(*length > 3.0 * h) {
                    return Err(invalid(format!("{key}.length"), format!("must exceed three spacings, got {length}")));
                }
            }
            ProfileSpec::Lawlor {
                offset,
                direction,
                extent,
                ..
            } => {
                if !(offset.is_finite() && direction.is_finite()) {
                    return Err(invalid(key, "offset and direction must be finite"));
                }
                if !(*extent > 3.0 * h) {
                    return Err(invalid(format!("{key}.extent"), format!("must exceed three spacings, got {extent}")));
                }
            }
            ProfileSpec::Expander { opening_angle, s_max, .. } => {
                let mut spec = ExpanderSpec::new(*opening_angle);
                spec.s_max = *s_max;
                spec.validate().map_err(module)?;
            }
            ProfileSpec::Sigma {
                loop_area,
                cone_param,
                extent,
                ..
            } => SigmaSpec {
                loop_area: *loop_area,
                cone_param: *cone_param,
                extent: *extent,
                spacing: h,
            }
            .validate()
            .map_err(module)?,
            ProfileSpec::Whitney { .. } => self.whitney_spec().validate().map_err(module)?,
            ProfileSpec::Circle { center, radius, .. } => {
                if !(center[0].is_finite() && center[1].is_finite()) {
                    return Err(invalid(format!("{key}.center"), "must be finite"));
                }
                if !(*radius > h) {
                    return Err(invalid(format!("{key}.radius"), format!("must exceed the spacing, got {radius}")));
                }
            }
        }
        Ok(())
    }

    fn whitney_spec(&self) -> WhitneySpec {
        let ProfileSpec::Whitney {
            eps,
            theta2,
            theta3,
            outer_scale,
            extent,
            spacing,
            ..
        } = self
        else {
            unreachable!("not a Whitney profile")
        };
        let mut w = WhitneySpec::new(*eps, *theta2, *theta3, spacing.unwrap_or(f64::NAN));
        w.outer_scale = *outer_scale;
        w.extent = *extent;
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    /// Largest Hausdorff distance from the initial curve, over its diameter.
    Stationarity {
        #[serde(default)]
        component: usize,
        #[serde(default = "default_stationarity")]
        tolerance: f64,
    },
    /// First collapse event against a known time.
    CollapseTime {
        expected: f64,
        #[serde(default = "default_collapse_tol")]
        rel_tolerance: f64,
    },
    /// Hausdorff distance on a disc between the curve at `t` and the initial
    /// curve dilated by `sqrt(t / t0)`, over the initial diameter.
    SelfSimilarity {
        #[serde(default)]
        component: usize,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_self_similarity")]
        tolerance: f64,
    },
    /// Initial value below `bound`, later values below `growth` times it.
    ExpanderCloseness {
        #[serde(default)]
        component: usize,
        bound: f64,
        #[serde(default = "default_growth")]
        growth: f64,
    },
    /// Oscillation of `beta + 2t theta` on the initial curve, over the
    /// squared diameter.
    BetaTheta {
        #[serde(default)]
        component: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
        #[serde(default = "default_beta_theta")]
        tolerance: f64,
    },
    DensityMonotonicity {
        #[serde(default)]
        center: [f64; 4],
        /// The time `T` of the backward heat kernel.
        horizon: f64,
        #[serde(default = "default_slack")]
        slack: f64,
    },
    LoopAreaLaw {
        #[serde(default)]
        component: usize,
        /// Samples whose loop is narrower are not compared; ten flow
        /// spacings when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_diameter: Option<f64>,
        #[serde(default = "default_area_tol")]
        tolerance: f64,
    },
    SingularTimeBound {
        #[serde(default)]
        component: usize,
    },
    AngleJump {
        #[serde(default)]
        component: usize,
        r_a: f64,
        r_b: f64,
        /// When present, exactly one jump of this size is required.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expected_jump: Option<f64>,
        #[serde(default = "default_jump_tol")]
        tolerance: f64,
    },
    /// Against another component, or against a fixed `reference` profile.
    IntersectionCount {
        #[serde(default)]
        component: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        other_component: Option<usize>,
        #[serde(default)]
        exclude_radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expected_first: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference: Option<ProfileSpec>,
    },
    /// Every surgery leaves an embedded curve, changes the rotation index by
    /// one, and nothing else happens up to `max_time`.
    SurgeryTopology {
        #[serde(default)]
        component: usize,
        #[serde(default = "one_usize")]
        expected_surgeries: usize,
    },
}

fn default_stationarity() -> f64 {
    1e-4
}
fn default_collapse_tol() -> f64 {
    5e-3
}
fn default_radius() -> f64 {
    10.0
}
fn default_self_similarity() -> f64 {
    1e-3
}
fn default_growth() -> f64 {
    10.0
}
fn default_beta_theta() -> f64 {
    1e-3
}
fn default_slack() -> f64 {
    1e-3
}
fn default_area_tol() -> f64 {
    0.05
}
fn default_jump_tol() -> f64 {
    0.1
}
fn one_usize() -> usize {
    1
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::Stationarity { .. } => "stationarity",
            CheckSpec::CollapseTime { .. } => "collapse_time",
            CheckSpec::SelfSimilarity { .. } => "self_similarity",
            CheckSpec::ExpanderCloseness { .. } => "expander_closeness",
            CheckSpec::BetaTheta { .. } => "beta_theta",
            CheckSpec::DensityMonotonicity { .. } => "density_monotonicity",
            CheckSpec::LoopAreaLaw { .. } => "loop_area_law",
            CheckSpec::SingularTimeBound { .. } => "singular_time_bound",
            CheckSpec::AngleJump { .. } => "angle_jump",
            CheckSpec::IntersectionCount { .. } => "intersection_count",
            CheckSpec::SurgeryTopology { .. } => "surgery_topology",
        }
    }

    fn component(&self) -> Option<usize> {
        match self {
            CheckSpec::CollapseTime { .. } | CheckSpec::DensityMonotonicity { .. } => None,
            CheckSpec::Stationarity { component, .. }
            | CheckSpec::SelfSimilarity { component, .. }
            | CheckSpec::ExpanderCloseness { component, .. }
            | CheckSpec::BetaTheta { component, .. }
            | CheckSpec::LoopAreaLaw { component, .. }
            | CheckSpec::SingularTimeBound { component }
            | CheckSpec::AngleJump { component, .. }
            | CheckSpec::IntersectionCount { component, .. }
            | CheckSpec::SurgeryTopology { component, .. } => Some(*component),
        }
    }

    fn validate(&self, key: &str, scenario: &Scenario, components: usize) -> Result<(), ScenarioError> {
        if let Some(c) = self.component() {
            if c >= components {
                return Err(invalid(
                    format!("{key}.component"),
                    format!("{c} out of range, the profiles give {components} components"),
                ));
            }
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{key}.{name}"), format!("must be positive, got {v}")))
            }
        };
        let t0 = scenario.start_time;
        match self {
            CheckSpec::Stationarity { tolerance, .. } => positive("tolerance", *tolerance)?,
            CheckSpec::CollapseTime { expected, rel_tolerance } => {
                positive("expected", *expected)?;
                positive("rel_tolerance", *rel_tolerance)?;
            }
            CheckSpec::SelfSimilarity { radius, tolerance, .. } => {
                positive("radius", *radius)?;
                positive("tolerance", *tolerance)?;
                if !(t0 > 0.0) {
                    return Err(invalid("start_time", "self-similarity needs start_time > 0"));
                }
            }
            CheckSpec::ExpanderCloseness { bound, growth, .. } => {
                positive("bound", *bound)?;
                positive("growth", *growth)?;
                if !(t0 > 0.0 && scenario.flow.max_time < 4.0) {
                    return Err(invalid(key, "expander closeness needs 0 < t < 4 over the whole run"));
                }
            }
            CheckSpec::BetaTheta { radius, tolerance, .. } => {
                positive("tolerance", *tolerance)?;
                if let Some(r) = radius {
                    positive("radius", *r)?;
                }
            }
            CheckSpec::DensityMonotonicity { center, horizon, slack } => {
                if !center.iter().all(|v| v.is_finite()) {
                    return Err(invalid(format!("{key}.center"), "must be finite"));
                }
                if !(horizon.is_finite() && *horizon > t0) {
                    return Err(invalid(format!("{key}.horizon"), format!("must be after start_time, got {horizon}")));
                }
                if !(*slack >= 0.0) {
                    return Err(invalid(format!("{key}.slack"), "must be non-negative"));
                }
            }
            CheckSpec::LoopAreaLaw {
                min_diameter,
                tolerance,
                ..
            } => {
                positive("tolerance", *tolerance)?;
                if let Some(d) = min_diameter {
                    positive("min_diameter", *d)?;
                }
            }
            CheckSpec::SingularTimeBound { .. } => {}
            CheckSpec::AngleJump {
                r_a,
                r_b,
                expected_jump,
                tolerance,
                ..
            } => {
                positive("r_a", *r_a)?;
                if !(r_b > r_a && r_b.is_finite()) {
                    return Err(invalid(format!("{key}.r_b"), format!("must exceed r_a = {r_a}, got {r_b}")));
                }
                positive("tolerance", *tolerance)?;
                if expected_jump.is_some_and(|j| !j.is_finite()) {
                    return Err(invalid(format!("{key}.expected_jump"), "must be finite"));
                }
            }
            CheckSpec::IntersectionCount {
                component,
                other_component,
                exclude_radius,
                reference,
                ..
            } => {
                match (other_component, reference) {
                    (Some(o), None) => {
                        if *o >= components || o == component {
                            return Err(invalid(
                                format!("{key}.other_component"),
                                format!("must be another component below {components}, got {o}"),
                            ));
                        }
                    }
                    (None, Some(r)) => r.validate(&format!("{key}.reference"))?,
                    _ => {
                        return Err(invalid(key, "give exactly one of other_component and reference"));
                    }
                }
                if !(*exclude_radius >= 0.0) {
                    return Err(invalid(format!("{key}.exclude_radius"), "must be non-negative"));
                }
            }
            CheckSpec::SurgeryTopology { .. } => {}
        }
        Ok(())
    }
}

impl Scenario {
    /// Parses and validates; missing spacings default to the flow spacing.
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let mut s: Scenario = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        s.fill_defaults();
        s.validate()?;
        Ok(s)
    }

    /// Canonical TOML: every default written out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    fn fill_defaults(&mut self) {
        let h = self.flow.target_spacing;
        for p in &mut self.profiles {
            p.spacing_mut().get_or_insert(h);
        }
        for c in &mut self.diagnostics {
            match c {
                CheckSpec::IntersectionCount {
                    reference: Some(r), ..
                } => {
                    r.spacing_mut().get_or_insert(h);
                }
                CheckSpec::LoopAreaLaw { min_diameter, .. } => {
                    min_diameter.get_or_insert(10.0 * h);
                }
                _ => {}
            }
        }
    }

    pub fn component_count(&self) -> usize {
        self.profiles.iter().map(ProfileSpec::component_count).sum()
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported {}, this build reads {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.id.is_empty() || !self.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(invalid("id", format!("{:?} must be non-empty [A-Za-z0-9_-]", self.id)));
        }
        if !self.start_time.is_finite() {
            return Err(invalid("start_time", "must be finite"));
        }
        if !(self.stride > 0.0 && self.stride.is_finite()) {
            return Err(invalid("stride", format!("must be positive, got {}", self.stride)));
        }
        self.flow.validate().map_err(|e| invalid("flow", e.to_string()))?;
        if self.flow.max_time < self.start_time {
            return Err(invalid("flow.max_time", "must not precede start_time"));
        }
        if self.profiles.is_empty() {
            return Err(invalid("profiles", "at least one profile is required"));
        }
        for (k, p) in self.profiles.iter().enumerate() {
            p.validate(&format!("profiles[{k}]"))?;
        }
        let n = self.component_count();
        for (k, c) in self.diagnostics.iter().enumerate() {
            c.validate(&format!("diagnostics[{k}]"), self, n)?;
        }
        Ok(())
    }
}

/// `key = value` lines for a tagged table; values that are not TOML
/// literals are taken as strings.
fn tagged_table(tag: &str, name: &str, pairs: &[(String, String)]) -> String {
    let mut text = format!("{tag} = {}\n", toml::Value::from(name));
    for (k, v) in pairs {
        let literal = format!("v = {v}");
        let value = if toml::from_str::<toml::Table>(&literal).is_ok() {
            v.clone()
        } else {
            toml::Value::from(v.as_str()).to_string()
        };
        text.push_str(&format!("{k} = {value}\n"));
    }
    text
}

/// A profile spec from its kind and `key = value` pairs, validated, with
/// `spacing` defaulting to `default_spacing`.
pub fn profile_from_pairs(kind: &str, pairs: &[(String, String)], default_spacing: f64) -> Result<ProfileSpec, ScenarioError> {
    let mut p: ProfileSpec =
        toml::from_str(&tagged_table("kind", kind, pairs)).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    p.spacing_mut().get_or_insert(default_spacing);
    p.validate("profile")?;
    Ok(p)
}

/// A check spec from its name and `key = value` pairs. Component indices
/// are not checked against any scenario.
pub fn check_from_pairs(name: &str, pairs: &[(String, String)], default_spacing: f64) -> Result<CheckSpec, ScenarioError> {
    let mut c: CheckSpec =
        toml::from_str(&tagged_table("check", name, pairs)).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    if let CheckSpec::IntersectionCount {
        reference: Some(r), ..
    } = &mut c
    {
        r.spacing_mut().get_or_insert(default_spacing);
        r.validate("reference")?;
    }
    Ok(c)
}

/// Reads and validates a scenario file.
pub fn parse_scenario(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Scenario::from_toml(&text).map_err(|e| match e {
        ScenarioError::Parse(m) => ScenarioError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Scenarios shipped with the crate, by id.
pub const BUNDLED: [(&str, &str); 9] = [
    ("figure1_whitney", include_str!("../../../../scenarios/figure1_whitney.toml")),
    ("expander", include_str!("../../../../scenarios/expander.toml")),
    ("figure3_sigma", include_str!("../../../../scenarios/figure3_sigma.toml")),
    ("figure4_sigma", include_str!("../../../../scenarios/figure4_sigma.toml")),
    ("circle_collapse", include_str!("../../../../scenarios/circle_collapse.toml")),
    ("off_origin_circle", include_str!("../../../../scenarios/off_origin_circle.toml")),
    ("stationary_ray", include_str!("../../../../scenarios/stationary_ray.toml")),
    ("stationary_lawlor", include_str!("../../../../scenarios/stationary_lawlor.toml")),
    ("two_profiles", include_str!("../../../../scenarios/two_profiles.toml")),
];

pub fn bundled(id: &str) -> Option<Scenario> {
    BUNDLED
        .iter()
        .find(|(name, _)| *name == id)
        .map(|(_, text)| Scenario::from_toml(text).expect("bundled scenarios are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
id = "m"
stride = 0.1

[flow]
target_spacing = 0.1
max_time = 1.0

[[profiles]]
kind = "ray"
angle = 0.5
length = 3.0
"#;

    #[test]
    fn minimal_gets_defaults() {
        let s = Scenario::from_toml(MINIMAL).unwrap();
        assert_eq!(s.start_time, 0.0);
        assert_eq!(s.flow.cfl_factor, 0.25);
        assert_eq!(s.profiles[0].spacing(), 0.1);
        assert!(s.diagnostics.is_empty());
        assert_eq!(s.svg, SvgStyle::default());
    }

    #[test]
    fn cfl_above_half_rejected() {
        let text = MINIMAL.replace("max_time = 1.0", "max_time = 1.0\ncfl_factor = 0.9");
        let err = Scenario::from_toml(&text).unwrap_err();
        assert!(matches!(&err, ScenarioError::Invalid { key, .. } if key == "flow"), "{err}");
        assert!(err.to_string().contains("0.9"));
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let text = MINIMAL.replace("length = 3.0", "length = 3.0\nlenght = 3.0");
        let err = Scenario::from_toml(&text).unwrap_err().to_string();
        // tagged tables report the line of their header
        assert!(err.contains("lenght") && err.contains("`length`"), "{err}");
        assert!(err.contains("line 10"), "{err}");
        let text = MINIMAL.replace("stride = 0.1", "stride = \"fast\"");
        let err = Scenario::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("line 4") && err.contains("f64"), "{err}");
    }

    #[test]
    fn bad_references_rejected() {
        let text = format!("{MINIMAL}\n[[diagnostics]]\ncheck = \"singular_time_bound\"\ncomponent = 1\n");
        assert!(matches!(
            Scenario::from_toml(&text),
            Err(ScenarioError::Invalid { key, .. }) if key == "diagnostics[0].component"
        ));
        let text = format!("{MINIMAL}\n[[diagnostics]]\ncheck = \"angle_jump\"\nr_a = 2.0\nr_b = 1.0\n");
        assert!(Scenario::from_toml(&text).is_err());
        let text = MINIMAL.replace("schema_version = 1", "schema_version = 2");
        assert!(Scenario::from_toml(&text).is_err());
    }

    #[test]
    fn pairs_build_specs() {
        let pairs = vec![("angle".to_string(), "0.5".to_string()), ("length".into(), "3".into()), ("label".into(), "r".into())];
        let p = profile_from_pairs("ray", &pairs, 0.1).unwrap();
        assert_eq!(p.label(), Some("r"));
        assert_eq!(p.spacing(), 0.1);
        assert!(profile_from_pairs("ray", &pairs[..1], 0.1).is_err());
        let c = check_from_pairs("angle_jump", &[("r_a".into(), "0.5".into()), ("r_b".into(), "2".into())], 0.1).unwrap();
        assert_eq!(c.name(), "angle_jump");
    }

    #[test]
    fn bundled_round_trip() {
        for (id, text) in BUNDLED {
            let s = Scenario::from_toml(text).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(s.id, id);
            let again = Scenario::from_toml(&s.to_toml()).unwrap();
            assert_eq!(again, s, "{id}");
            assert_eq!(again.to_toml(), s.to_toml());
        }
    }
}

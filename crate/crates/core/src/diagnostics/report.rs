use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    Unreliable,
}

impl Verdict {
    /// Pass and not-applicable are both acceptable outcomes.
    pub fn is_ok(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::NotApplicable)
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Outcome of one diagnostic check, `{check, params, series?, verdict, details}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<TimeSeries>,
    pub verdict: Verdict,
    pub details: Value,
}

impl Report {
    pub fn new(check: &str, params: Value, verdict: Verdict, details: Value) -> Self {
        Report {
            check: check.to_string(),
            params,
            series: None,
            verdict,
            details,
        }
    }

    pub fn with_series(mut self, series: TimeSeries) -> Self {
        self.series = Some(series);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn verdict_spelling() {
        assert_eq!(serde_json::to_string(&Verdict::NotApplicable).unwrap(), "\"NOT-APPLICABLE\"");
        let r = Report::new("c", json!({}), Verdict::Pass, json!({"x": 1}));
        let v: Value = serde_json::to_value(&r).unwrap();
        assert!(v.get("series").is_none());
        assert_eq!(v["verdict"], "PASS");
    }
}

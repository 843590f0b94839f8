use serde::{Deserialize, Serialize};

/// One named pass/fail check on a constructed curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

/// Checks a constructor ran on its own output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    /// Records `value < bound`.
    pub fn below(&mut self, name: &str, value: f64, bound: f64) -> &mut Self {
        self.checks.push(Check {
            name: name.to_string(),
            passed: value < bound,
            value,
            bound,
        });
        self
    }

    /// Records `value == expected` for counts and flags.
    pub fn equals(&mut self, name: &str, value: f64, expected: f64) -> &mut Self {
        self.checks.push(Check {
            name: name.to_string(),
            passed: value == expected,
            value,
            bound: expected,
        });
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

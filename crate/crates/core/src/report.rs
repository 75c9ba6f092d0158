//! Pass/fail reports produced by the finite checks.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub theorem: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(theorem: impl Into<String>) -> Self {
        Report { theorem: theorem.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, pass: bool, details: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, details: details.into() });
    }

    /// Appends the checks of `other`, prefixing their names.
    pub fn extend(&mut self, other: Report) {
        for c in other.checks {
            self.checks.push(Check { name: format!("{}/{}", other.theorem, c.name), ..c });
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.theorem, if self.passed() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            writeln!(f, "  [{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.details)?;
        }
        Ok(())
    }
}

use std::fmt;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    /// Failure data, `null` on success.
    pub witness: Option<serde_json::Value>,
}

impl Check {
    pub fn pass(name: &str, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Pass, detail: detail.into(), witness: None }
    }

    pub fn fail(name: &str, detail: impl Into<String>, witness: serde_json::Value) -> Self {
        Check { name: name.into(), status: Status::Fail, detail: detail.into(), witness: Some(witness) }
    }

    pub fn from_bool(name: &str, ok: bool, detail: impl Into<String>, witness: serde_json::Value) -> Self {
        if ok {
            Self::pass(name, detail)
        } else {
            Self::fail(name, detail, witness)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    /// Sorts the checks by name so output does not depend on evaluation order.
    pub fn new(suite: &str, seed: Option<u64>, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().all(|c| c.status == Status::Pass);
        Report { schema_version: SCHEMA_VERSION, suite: suite.into(), seed, checks, passed }
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.seed {
            Some(s) => writeln!(f, "suite {} (seed {s})", self.suite)?,
            None => writeln!(f, "suite {}", self.suite)?,
        }
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            writeln!(f, "  {tag} {:<18} {}", c.name, c.detail)?;
            if let Some(w) = &c.witness {
                writeln!(f, "       witness: {w}")?;
            }
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

use serde::{Deserialize, Serialize};

/// Outcome of a single named check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    /// Carries a printed witness of the failure.
    Fail(String),
    NotApplicable(String),
}

impl Outcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub outcome: Outcome,
}

/// A named batch of checks, together with the seed used for sampling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub seed: Option<u64>,
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, seed: Option<u64>) -> Self {
        CheckReport { name: name.into(), seed, checks: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, outcome: Outcome) {
        self.checks.push(CheckResult { name: name.into(), outcome });
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.push(name, Outcome::Pass);
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.push(name, Outcome::Fail(witness.into()));
    }

    pub fn not_applicable(&mut self, name: impl Into<String>, why: impl Into<String>) {
        self.push(name, Outcome::NotApplicable(why.into()));
    }

    /// Records a pass, or a failure with the first witness found.
    pub fn record(&mut self, name: impl Into<String>, first_failure: Option<String>) {
        match first_failure {
            None => self.pass(name),
            Some(w) => self.fail(name, w),
        }
    }

    pub fn extend(&mut self, other: CheckReport) {
        for c in other.checks {
            self.checks.push(CheckResult { name: format!("{}/{}", other.name, c.name), outcome: c.outcome });
        }
    }

    /// True when no check failed. Not-applicable checks do not count as failures.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !matches!(c.outcome, Outcome::Fail(_)))
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| matches!(c.outcome, Outcome::Fail(_)))
    }

    pub fn outcome(&self, name: &str) -> Option<&Outcome> {
        self.checks.iter().find(|c| c.name == name).map(|c| &c.outcome)
    }
}

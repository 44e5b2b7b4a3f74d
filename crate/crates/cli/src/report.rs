use std::collections::BTreeMap;
use std::fmt::Write;

use dlie_core::{CheckReport, Outcome};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// Whether a task is a positive check or a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub options: BTreeMap<String, String>,
    pub status: Status,
    pub expect: Expect,
    pub observed: Status,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub output: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub file: String,
    pub seed: u64,
    pub tasks: Vec<TaskReport>,
    pub summary: Summary,
}

impl Report {
    pub fn new(file: &str, seed: u64, tasks: Vec<TaskReport>) -> Self {
        let count = |s: Status| tasks.iter().filter(|t| t.status == s).count();
        let summary = Summary { passed: count(Status::Pass), failed: count(Status::Fail), errors: count(Status::Error) };
        Report { file: file.to_string(), seed, tasks, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.errors == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per task, then the outputs and any failing checks indented.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.tasks {
            let status = match t.status {
                Status::Pass => "PASS ",
                Status::Fail => "FAIL ",
                Status::Error => "ERROR",
            };
            let target = t.target.as_deref().unwrap_or("");
            let negative = if t.expect == Expect::Fail { " (expected to fail)" } else { "" };
            let _ = write!(s, "{status} {:>3}  {} {target}{negative}", t.index, t.task);
            if let Some(ms) = t.millis {
                let _ = write!(s, "  [{ms} ms]");
            }
            s.push('\n');
            for (k, v) in &t.output {
                let _ = writeln!(s, "        {k} = {v}");
            }
            if let Some(e) = &t.error {
                let _ = writeln!(s, "        error: {e}");
            }
            for c in &t.checks {
                for r in &c.checks {
                    if let Outcome::Fail(w) = &r.outcome {
                        let _ = writeln!(s, "        {}/{}: {w}", c.name, r.name);
                    }
                }
            }
        }
        let _ = writeln!(s, "{} passed, {} failed, {} errors", self.summary.passed, self.summary.failed, self.summary.errors);
        s
    }
}

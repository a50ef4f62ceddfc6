//! Structured check reports, rendered as TOML.

use serde::Serialize;
use std::fmt;

pub const REPORT_SCHEMA: &str = "costab-report/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail(String),
    /// The window or a search bound prevented a decision.
    Unverifiable(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    /// Combines two verdicts: any failure wins, then any unverifiable.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (f @ Verdict::Fail(_), _) | (_, f @ Verdict::Fail(_)) => f,
            (u @ Verdict::Unverifiable(_), _) | (_, u @ Verdict::Unverifiable(_)) => u,
            _ => Verdict::Pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "PASS"),
            Verdict::Fail(d) => write!(f, "FAIL: {d}"),
            Verdict::Unverifiable(d) => write!(f, "UNVERIFIABLE: {d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: String,
    pub scenario: String,
    pub window: [i32; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn new(scenario: impl Into<String>, window: (i32, i32)) -> Report {
        Report {
            schema: REPORT_SCHEMA.into(),
            scenario: scenario.into(),
            window: [window.0, window.1],
            field: None,
            checks: Vec::new(),
            notes: Vec::new(),
            artifacts: Vec::new(),
            elapsed_ms: None,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, verdict: Verdict) {
        self.checks.push(Check { name: name.into(), verdict });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn extend(&mut self, other: Report) {
        let prefix = other.scenario;
        for c in other.checks {
            self.push(format!("{prefix}.{}", c.name), c.verdict);
        }
        self.notes.extend(other.notes);
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.checks.iter().find(|c| c.name == name).map(|c| &c.verdict)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict.is_pass())
    }

    pub fn any_fail(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_fail())
    }

    /// 0 when everything passed, 1 on any failure, 2 when only undecided.
    pub fn exit_code(&self) -> i32 {
        if self.any_fail() {
            1
        } else if self.all_pass() {
            0
        } else {
            2
        }
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (window [{}, {}])", self.scenario, self.window[0], self.window[1])?;
        for c in &self.checks {
            writeln!(f, "  {}: {}", c.name, c.verdict)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_combine_and_render() {
        let v = Verdict::Pass.and(Verdict::Unverifiable("w".into()));
        assert_eq!(v, Verdict::Unverifiable("w".into()));
        assert!(Verdict::Unverifiable("w".into()).and(Verdict::Fail("x".into())).is_fail());
        let mut r = Report::new("demo", (-2, 2));
        r.push("a", Verdict::Pass);
        assert_eq!(r.exit_code(), 0);
        r.push("b", Verdict::Fail("witness (x, y)".into()));
        assert_eq!(r.exit_code(), 1);
        let text = r.to_text();
        assert!(text.contains("schema = \"costab-report/1\""));
        assert!(text.contains("witness (x, y)"));
    }
}

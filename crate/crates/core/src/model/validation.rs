use serde::Serialize;

use crate::error::{Error, Hypothesis, Result};

/// Outcome of a single clause of a hypothesis check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub hypothesis: Hypothesis,
    pub clause: String,
    pub passed: bool,
    pub detail: String,
    /// Latitude at which the clause fails, when it fails at a point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offending_y: Option<f64>,
    /// Measured quantity, e.g. a fitted constant or exponent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
}

/// Pass/fail verdicts for the clauses of one or more hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        hypothesis: Hypothesis,
        clause: &str,
        passed: bool,
        detail: impl Into<String>,
        offending_y: Option<f64>,
        measured: Option<f64>,
    ) {
        self.checks.push(Check {
            hypothesis,
            clause: clause.to_owned(),
            passed,
            detail: detail.into(),
            offending_y,
            measured,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }

    /// Converts the first failing clause into an error.
    pub fn into_result(self) -> Result<Self> {
        let err = self.failures().next().map(|c| {
            let at = c
                .offending_y
                .map(|y| format!(" at y = {y}"))
                .unwrap_or_default();
            Error::hypothesis(c.hypothesis, format!("{}: {}{at}", c.clause, c.detail))
        });
        match err {
            None => Ok(self),
            Some(e) => Err(e),
        }
    }
}

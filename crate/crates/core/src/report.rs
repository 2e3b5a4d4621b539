use serde::{Deserialize, Serialize};

/// Outcome of one numerical check. `passed` holds iff `residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Per-point or per-row residuals, in the order the check visited them.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<f64>,
    /// Auxiliary diagnostics such as truncation leakage bounds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<(String, f64)>,
}

impl VerificationReport {
    pub fn new(check_name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            check_name: check_name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            details: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_details(mut self, details: Vec<f64>) -> Self {
        self.details = details;
        self
    }

    pub fn with_note(mut self, name: impl Into<String>, value: f64) -> Self {
        self.notes.push((name.into(), value));
        self
    }

    /// Same residual judged against a different tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.residual <= tolerance;
        self
    }

    pub fn note(&self, name: &str) -> Option<f64> {
        self.notes.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

//! Audit outcomes: PASS, or FAIL with a concrete counterexample.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "PASS"),
            Status::Fail => write!(f, "FAIL"),
        }
    }
}

/// Outcome of one theorem/property check on one algebra.
///
/// Counterexamples are rendered deterministically (the lexicographically
/// least witness found by the exhaustive scan), so reports are stable
/// across runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    /// Check identifier, e.g. `thm2/permute-at-point`.
    pub check: String,
    pub status: Status,
    /// True when the check held for lack of anything to test
    /// (one-element algebra, empty family, inapplicable signature).
    pub vacuous: bool,
    /// Rendered counterexample for FAIL, occasionally a witness for PASS.
    pub witness: Option<String>,
    /// Free-form remarks: readings of garbled displays, skipped clauses,
    /// bounded-search depths.
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn pass(check: impl Into<String>) -> Self {
        AuditReport {
            check: check.into(),
            status: Status::Pass,
            vacuous: false,
            witness: None,
            notes: Vec::new(),
        }
    }

    pub fn fail(check: impl Into<String>, witness: impl Into<String>) -> Self {
        AuditReport {
            check: check.into(),
            status: Status::Fail,
            vacuous: false,
            witness: Some(witness.into()),
            notes: Vec::new(),
        }
    }

    pub fn vacuous_pass(check: impl Into<String>) -> Self {
        let mut r = Self::pass(check);
        r.vacuous = true;
        r
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.status, self.check)?;
        if self.vacuous {
            write!(f, " (vacuous)")?;
        }
        if let Some(w) = &self.witness {
            write!(f, ": {}", w)?;
        }
        for n in &self.notes {
            write!(f, " [{}]", n)?;
        }
        Ok(())
    }
}

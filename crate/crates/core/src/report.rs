//! Pass/fail records shared by the verification suites.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One checked identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity in words.
    pub reference: String,
    pub trials: usize,
    pub status: Status,
    /// Canonical text of a (shrunk) failing input, if any.
    pub witness: Option<String>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            records: vec![],
        }
    }

    /// Record an identity checked over `trials` inputs; `failure` holds the
    /// witness of the first failing input.
    pub fn record(&mut self, name: &str, reference: &str, trials: usize, failure: Option<String>) {
        self.records.push(CheckRecord {
            name: name.to_string(),
            reference: reference.to_string(),
            trials,
            status: if failure.is_none() { Status::Pass } else { Status::Fail },
            witness: failure,
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(CheckRecord::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.title.is_empty() {
            writeln!(f, "# {}", self.title)?;
        }
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            writeln!(f, "{status} {} (trials={}): {}", r.name, r.trials, r.reference)?;
            if let Some(w) = &r.witness {
                for line in w.lines() {
                    writeln!(f, "    {line}")?;
                }
            }
        }
        Ok(())
    }
}

//! Machine-readable probe results.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
}

/// One evaluated check. `anchor` is the formula the check exercises.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub deviation: f64,
    pub tolerance: f64,
}

impl CheckRecord {
    /// Pass iff `deviation <= tolerance` (a NaN deviation fails).
    pub fn compare(name: impl Into<String>, anchor: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        let status = if deviation <= tolerance { Status::Pass } else { Status::Fail };
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            status,
            deviation,
            tolerance,
        }
    }

    /// A check that is expected to fail: passes iff `deviation > tolerance`.
    pub fn expect_violation(name: impl Into<String>, anchor: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        let status = if deviation > tolerance { Status::Pass } else { Status::Fail };
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            status,
            deviation,
            tolerance,
        }
    }

    pub fn with_status(name: impl Into<String>, anchor: impl Into<String>, status: Status, deviation: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            status,
            deviation,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ProbeReport {
    pub command: String,
    pub config: serde_json::Value,
    pub records: Vec<CheckRecord>,
    /// Probe-specific payload (tables, Ritz values, verdicts).
    #[serde(default)]
    pub data: serde_json::Value,
    pub elapsed_seconds: f64,
    #[serde(default)]
    pub artifacts: Vec<PathBuf>,
}

impl ProbeReport {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        ProbeReport {
            command: command.into(),
            config,
            ..Default::default()
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        self.records.extend(records);
    }

    /// True when no record has status `Fail`.
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }

    /// One line per record, for terminals.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Vacuous => "VACUOUS",
            };
            out.push_str(&format!("{tag:7} {:<48} dev={:.3e} tol={:.1e}\n", r.name, r.deviation, r.tolerance));
        }
        out
    }
}

/// Writes rows of `(header, values)` as CSV.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
    }
    w.flush()?;
    Ok(())
}

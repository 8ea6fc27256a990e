use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// One line of the append-only experiment log. The primary report never
/// carries the timestamp or timing; they live here only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub outcome: Outcome,
    pub elapsed_ms: f64,
    pub version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail { witness: serde_json::Value },
    ReportOnly,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Fail { .. } => 1,
            _ => 0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail { .. } => "fail",
            Outcome::ReportOnly => "report-only",
        }
    }
}

pub fn append(path: &Path, record: &VerificationRecord) -> anyhow::Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(file, "{}", serde_json::to_string(record)?)?;
    Ok(())
}

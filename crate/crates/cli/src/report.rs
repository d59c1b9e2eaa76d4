//! Report documents: typed parsing of any emitted JSON report, round-trip
//! validation and TSV flattening.

use serde::{Deserialize, Serialize};

use fano_core::delta_engine::InvariantReport;
use fano_core::error::{Error, Result};

use crate::query::{K3TauReport, Verdict};

/// Any JSON document this tool emits and can re-read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportDoc {
    Invariants(Box<InvariantReport>),
    Verdict(Verdict),
    K3Tau(K3TauReport),
}

impl ReportDoc {
    /// Parses a report and verifies `parse(serialize(report)) = report`.
    pub fn parse_validated(json: &str) -> Result<ReportDoc> {
        let doc: ReportDoc = serde_json::from_str(json)
            .map_err(|e| Error::Input(format!("not a recognized report: {e}")))?;
        let re = serde_json::to_string(&doc)
            .map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
        let back: ReportDoc = serde_json::from_str(&re)
            .map_err(|e| Error::Internal(format!("round-trip parse failed: {e}")))?;
        if back != doc {
            return Err(Error::Internal("report does not round-trip".into()));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Internal(format!("serialization failed: {e}")))
    }

    /// Flattens the report into `path<TAB>value` rows with deterministic
    /// ordering.
    pub fn to_tsv(&self) -> Result<String> {
        let value = serde_json::to_value(self)
            .map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
        let mut rows = Vec::new();
        flatten("", &value, &mut rows);
        Ok(rows
            .into_iter()
            .map(|(k, v)| format!("{k}\t{v}"))
            .collect::<Vec<_>>()
            .join("\n"))
    }
}

fn flatten(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar_to_string(other))),
    }
}

fn scalar_to_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

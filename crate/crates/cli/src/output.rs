//! JSON and CSV rendering of command results.

use std::collections::BTreeMap;

use anyhow::Result;
use clap::ValueEnum;
use gafzero::montecarlo::McReport;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// What a command produced.
pub enum Payload {
    Reports(Vec<McReport>),
    /// Column names and rows for CSV, plus the JSON body.
    Table { json: Value, header: Vec<&'static str>, rows: Vec<Vec<String>> },
}

pub struct Document {
    pub command: String,
    pub provenance: BTreeMap<String, String>,
    pub payload: Payload,
}

impl Document {
    /// `None` for commands without a verdict.
    pub fn all_pass(&self) -> Option<bool> {
        match &self.payload {
            Payload::Reports(r) => Some(r.iter().all(|r| r.pass)),
            Payload::Table { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut doc = json!({
            "tool": "gafzero",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "provenance": self.provenance,
        });
        match &self.payload {
            Payload::Reports(reports) => {
                doc["pass"] = json!(self.all_pass());
                doc["reports"] = serde_json::to_value(reports).expect("reports serialize");
            }
            Payload::Table { json, .. } => doc["result"] = json.clone(),
        }
        doc
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.to_json())? + "\n"),
            Format::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.payload {
            Payload::Reports(reports) => {
                w.write_record([
                    "name", "criterion", "pass", "estimate", "std_error", "bound", "relation", "samples", "censored",
                    "seed", "runtime_ms", "params",
                ])?;
                for r in reports {
                    let params: Vec<String> = r
                        .params
                        .iter()
                        .filter(|(k, _)| k.as_str() != "criterion")
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect();
                    w.write_record([
                        r.name.clone(),
                        r.params.get("criterion").cloned().unwrap_or_default(),
                        r.pass.to_string(),
                        r.estimate.to_string(),
                        r.std_error.to_string(),
                        r.bound.map(|b| b.to_string()).unwrap_or_default(),
                        r.relation.to_string(),
                        r.samples.to_string(),
                        r.censored.to_string(),
                        r.seed.to_string(),
                        r.runtime_ms.to_string(),
                        params.join(" "),
                    ])?;
                }
            }
            Payload::Table { header, rows, .. } => {
                w.write_record(header)?;
                for row in rows {
                    w.write_record(row)?;
                }
            }
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

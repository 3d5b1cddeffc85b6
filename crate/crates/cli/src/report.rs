//! Deterministic JSON-lines reports.
//!
//! One record per check, sorted by check id before writing, so a fixed
//! (config, seed) pair produces byte-identical output. Failed records
//! carry a witness with enough data to re-run the single check.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

/// One check outcome. `claim` names the inequality or construction the
/// check verifies; pure plumbing checks carry the tag "plumbing".
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Record {
    pub check: String,
    pub claim: String,
    pub inputs: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub slack: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
}

/// Named plot series attached to a record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub info: usize,
    /// Empirical constants observed during the run (δ estimates, max
    /// d − d_m, fellow-travel sups, Morse margins, ...), keyed by name.
    pub constants: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn push(&mut self, record: Record) {
        match record.verdict {
            Verdict::Pass => self.summary.passed += 1,
            Verdict::Fail => self.summary.failed += 1,
            Verdict::Info => self.summary.info += 1,
        }
        self.records.push(record);
    }

    pub fn constant(&mut self, name: impl Into<String>, value: f64) {
        self.summary.constants.insert(name.into(), value);
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Serialize as JSON lines: records in check-id order, summary last.
    pub fn to_jsonl(&self) -> String {
        let mut records = self.records.clone();
        records.sort_by(|a, b| a.check.cmp(&b.check));
        let mut out = String::new();
        for r in &records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        #[derive(Serialize)]
        struct SummaryLine<'a> {
            summary: &'a Summary,
        }
        out.push_str(
            &serde_json::to_string(&SummaryLine {
                summary: &self.summary,
            })
            .expect("summary serializes"),
        );
        out.push('\n');
        out
    }

    pub fn write_to(&self, path: &std::path::Path) -> std::io::Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_jsonl().as_bytes())
    }

    /// Human-readable one-line-per-check summary.
    pub fn human_summary(&self) -> String {
        let mut records = self.records.clone();
        records.sort_by(|a, b| a.check.cmp(&b.check));
        let mut out = String::new();
        for r in &records {
            let verdict = match r.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Info => "info",
            };
            match r.bound {
                Some(b) => out.push_str(&format!(
                    "{verdict}  {:<42} value {:.6}  bound {:.6}\n",
                    r.check, r.value, b
                )),
                None => out.push_str(&format!(
                    "{verdict}  {:<42} value {:.6}\n",
                    r.check, r.value
                )),
            }
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} info\n",
            self.summary.passed, self.summary.failed, self.summary.info
        ));
        out
    }
}

/// Parse a JSON-lines report back (for `suite export`).
pub fn parse_jsonl(text: &str) -> anyhow::Result<Vec<Record>> {
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() || line.contains("\"summary\"") {
            continue;
        }
        out.push(serde_json::from_str::<Record>(line)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_is_sorted_and_stable() {
        let mut r = Report::default();
        r.push(Record {
            check: "b.second".into(),
            claim: "plumbing".into(),
            inputs: "00".into(),
            value: 1.0,
            bound: None,
            slack: 0.0,
            verdict: Verdict::Info,
            witness: None,
            series: None,
        });
        r.push(Record {
            check: "a.first".into(),
            claim: "plumbing".into(),
            inputs: "00".into(),
            value: 2.0,
            bound: Some(3.0),
            slack: 0.0,
            verdict: Verdict::Pass,
            witness: None,
            series: None,
        });
        let text = r.to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].contains("a.first"));
        assert!(lines[1].contains("b.second"));
        assert!(lines[2].contains("summary"));
        assert_eq!(text, r.to_jsonl());
        let parsed = parse_jsonl(&text).unwrap();
        assert_eq!(parsed.len(), 2);
    }
}

//! CSV plot-data export from JSON-lines reports.

use std::path::Path;

use anyhow::{anyhow, Context};

use crate::report::{parse_jsonl, Record};

/// Export the named series ("tdeviation", "fellow_travel",
/// "delta_convergence") from a report to CSV. When several records carry
/// the series, the one with the largest value wins (the worst case).
pub fn export_plotdata(report_path: &Path, what: &str, out_path: &Path) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(report_path)
        .with_context(|| format!("cannot read report {}", report_path.display()))?;
    let records = parse_jsonl(&text)?;
    let candidates: Vec<&Record> = records
        .iter()
        .filter(|r| r.series.as_ref().is_some_and(|s| s.name == what))
        .collect();
    let record = candidates
        .iter()
        .max_by(|a, b| {
            a.value
                .partial_cmp(&b.value)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or_else(|| {
            anyhow!(
                "report {} carries no series named `{what}`",
                report_path.display()
            )
        })?;
    let series = record.series.as_ref().unwrap();

    let mut out = String::new();
    out.push_str(&format!(
        "# series {} from check {} (value {})\n",
        series.name, record.check, record.value
    ));
    out.push_str(&format!("# columns: {}\n", series.columns.join(",")));
    out.push_str(&series.columns.join(","));
    out.push('\n');
    for row in &series.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(out_path, out)
        .with_context(|| format!("cannot write {}", out_path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{Record, Report, Series, Verdict};

    #[test]
    fn export_roundtrip_and_missing_series() {
        let mut report = Report::default();
        let mut rec = Record {
            check: "tcheck/seg".into(),
            claim: "plumbing".into(),
            inputs: "00".into(),
            value: 0.5,
            bound: None,
            slack: 0.0,
            verdict: Verdict::Info,
            witness: None,
            series: None,
        };
        rec.series = Some(Series {
            name: "tdeviation".into(),
            columns: vec!["t".into(), "dz".into()],
            rows: vec![vec![0.0, 1.0], vec![1.0, 0.5]],
        });
        report.push(rec);
        let dir = std::env::temp_dir().join("hypro-export-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let rp = dir.join("r.jsonl");
        report.write_to(&rp).unwrap();
        let out = dir.join("t.csv");
        export_plotdata(&rp, "tdeviation", &out).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("t,dz"));
        assert!(text.contains("1,0.5"));
        let err = export_plotdata(&rp, "fellow_travel", &out).unwrap_err();
        assert!(err.to_string().contains("fellow_travel"));
    }
}

//! Verification reports.
//!
//! `report.csv` has one row per check with the columns
//! `scenario_id, stage, body, target, eps, lambda, cloud_err, fine_err,
//! bound, status, check`; empty cells mean "not applicable". Reals use 17
//! significant digits. Lines starting with `#` are comments: the first holds
//! the write time, the others carry warnings. `report.json` mirrors the rows
//! and warnings. The plot file lists `log10(fine_err)` per stage for the
//! witness and block checks.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::scenario::point_to_flat;
use crate::verify::{ReportRow, Verification};
use crate::Result;

pub const CSV_HEADER: &str =
    "scenario_id,stage,body,target,eps,lambda,cloud_err,fine_err,bound,status,check";

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario_id: String,
    pub fingerprint: String,
    pub verification: Verification,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    check: &'a str,
    stage: usize,
    body: usize,
    target: usize,
    eps: f64,
    lambda: usize,
    cloud_err: Option<f64>,
    fine_err: f64,
    bound: Option<f64>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    at: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    scenario_id: &'a str,
    fingerprint: &'a str,
    failures: usize,
    warnings: &'a [String],
    rows: Vec<JsonRow<'a>>,
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl Report {
    pub fn new(scenario_id: &str, fingerprint: &str, verification: Verification) -> Self {
        Self {
            scenario_id: scenario_id.to_string(),
            fingerprint: fingerprint.to_string(),
            verification,
        }
    }

    pub fn rows(&self) -> &[ReportRow] {
        &self.verification.rows
    }

    pub fn failures(&self) -> usize {
        self.verification.failures()
    }

    /// CSV text; `written_at` (seconds since the epoch) goes to the first
    /// comment line.
    pub fn to_csv(&self, written_at: u64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# written at unix time {written_at}");
        let _ = writeln!(out, "# fingerprint {}", self.fingerprint);
        for w in &self.verification.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        let _ = writeln!(out, "{CSV_HEADER}");
        let id = csv_field(&self.scenario_id);
        for r in self.rows() {
            let _ = writeln!(
                out,
                "{id},{},{},{},{},{},{},{},{},{},{}",
                r.stage,
                r.body,
                r.target,
                real(r.eps),
                r.lambda,
                opt(r.cloud_err),
                real(r.fine_err),
                opt(r.bound),
                r.status.name(),
                csv_field(&r.check)
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows = self
            .rows()
            .iter()
            .map(|r| JsonRow {
                check: &r.check,
                stage: r.stage,
                body: r.body,
                target: r.target,
                eps: r.eps,
                lambda: r.lambda,
                cloud_err: r.cloud_err,
                fine_err: r.fine_err,
                bound: r.bound,
                status: r.status.name(),
                at: r.at.as_ref().map(|p| point_to_flat(p)),
            })
            .collect();
        let doc = JsonReport {
            scenario_id: &self.scenario_id,
            fingerprint: &self.fingerprint,
            failures: self.failures(),
            warnings: &self.verification.warnings,
            rows,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    /// `check,stage,body,target,log10_fine_err` for witness and block rows.
    pub fn plot_data(&self) -> String {
        let mut out = String::from("check,stage,body,target,log10_fine_err\n");
        for r in self
            .rows()
            .iter()
            .filter(|r| r.check == "witness" || r.check == "block")
        {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.check,
                r.stage,
                r.body,
                r.target,
                real(r.fine_err.log10())
            );
        }
        out
    }

    /// Writes `report.csv` and `report.json` (and `plot.csv` on request)
    /// into `dir`.
    pub fn write(&self, dir: &Path, plot: bool) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.csv"), self.to_csv(now_unix()))?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        if plot {
            std::fs::write(dir.join("plot.csv"), self.plot_data())?;
        }
        Ok(())
    }
}

/// The CSV without its comment lines.
pub fn strip_comments(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::RowStatus;
    use num_complex::Complex64;

    fn row(check: &str, fine: f64, bound: Option<f64>, status: RowStatus) -> ReportRow {
        ReportRow {
            check: check.into(),
            stage: 1,
            body: 1,
            target: 2,
            eps: 0.5,
            lambda: 4,
            cloud_err: Some(0.1),
            fine_err: fine,
            bound,
            status,
            at: None,
        }
    }

    fn report() -> Report {
        let mut v = Verification::default();
        v.rows
            .push(row("witness", 0.01, Some(0.53), RowStatus::Pass));
        v.rows.push(row("block", 0.6, Some(0.53), RowStatus::Fail));
        let mut r = row("recentered", 0.2, None, RowStatus::Info);
        r.cloud_err = None;
        r.at = Some(vec![Complex64::new(0.5, -0.25)]);
        v.rows.push(r);
        v.warnings
            .push("stage 1 (body 1, target 2) was not met".into());
        Report::new("demo, one", "ff00", v)
    }

    #[test]
    fn csv_layout() {
        let csv = report().to_csv(42);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# written at unix time 42");
        assert_eq!(lines[1], "# fingerprint ff00");
        assert_eq!(
            lines[2],
            "# warning: stage 1 (body 1, target 2) was not met"
        );
        assert_eq!(lines[3], CSV_HEADER);
        assert_eq!(
            lines[4],
            "\"demo, one\",1,1,2,5.0000000000000000e-1,4,1.0000000000000001e-1,\
             1.0000000000000000e-2,5.3000000000000003e-1,pass,witness"
        );
        assert!(lines[5].ends_with(",fail,block"));
        assert!(lines[6].contains(",4,,2.0000000000000001e-1,,info,recentered"));
        assert_eq!(strip_comments(&csv), strip_comments(&report().to_csv(7)));
    }

    #[test]
    fn json_mirror() {
        let v: serde_json::Value = serde_json::from_str(&report().to_json()).unwrap();
        assert_eq!(v["failures"], 1);
        assert_eq!(v["rows"][0]["fine_err"], 0.01);
        assert_eq!(v["rows"][2]["bound"], serde_json::Value::Null);
        assert_eq!(v["rows"][2]["at"][1], -0.25);
        assert!(v["rows"][0].get("at").is_none());
    }

    #[test]
    fn plot_rows() {
        let p = report().plot_data();
        let lines: Vec<&str> = p.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "witness,1,1,2,-2.0000000000000000e0");
    }
}

//! CSV artifacts and the run summary.
//!
//! All numeric output goes through one fixed formatter so reruns of the
//! same configuration are byte-identical whatever the thread count.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::noise::{ScalarPath, VectorPath};

/// Fixed-width scientific float formatting used in every artifact.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.12e}")
}

/// One row of the machine-readable run summary.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub experiment: String,
    pub statistic: String,
    pub epsilon: Option<f64>,
    pub value: f64,
    pub threshold: Option<f64>,
    /// Pass flag for rows that carry a criterion; informational rows leave
    /// it empty.
    pub pass: Option<bool>,
    /// Plain-language anchor of the claim the row checks.
    pub claim: String,
}

impl SummaryRow {
    pub fn info(experiment: &str, statistic: &str, epsilon: Option<f64>, value: f64, claim: &str) -> Self {
        SummaryRow {
            experiment: experiment.into(),
            statistic: statistic.into(),
            epsilon,
            value,
            threshold: None,
            pass: None,
            claim: claim.into(),
        }
    }

    pub fn checked(
        experiment: &str,
        statistic: &str,
        epsilon: Option<f64>,
        value: f64,
        threshold: f64,
        pass: bool,
        claim: &str,
    ) -> Self {
        SummaryRow {
            experiment: experiment.into(),
            statistic: statistic.into(),
            epsilon,
            value,
            threshold: Some(threshold),
            pass: Some(pass),
            claim: claim.into(),
        }
    }
}

/// Outcome of one experiment: a verdict, summary rows, and named CSV
/// bodies rendered in memory (written out by the runner).
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub name: String,
    pub pass: bool,
    pub summary: Vec<SummaryRow>,
    pub detail_csv: Vec<(String, String)>,
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("experiment,statistic,epsilon,value,threshold,verdict,claim\n");
    for r in rows {
        let eps = r.epsilon.map(fmt_f64).unwrap_or_default();
        let thr = r.threshold.map(fmt_f64).unwrap_or_default();
        let verdict = match r.pass {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "",
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.experiment,
            r.statistic,
            eps,
            fmt_f64(r.value),
            thr,
            verdict,
            r.claim
        )
        .expect("string write");
    }
    out
}

/// Per-rung estimator detail: `estimator,path_id,epsilon,t,value`.
pub struct EstimatorCsv {
    body: String,
}

impl EstimatorCsv {
    pub fn new() -> Self {
        EstimatorCsv {
            body: String::from("estimator,path_id,epsilon,t,value\n"),
        }
    }

    pub fn push(&mut self, estimator: &str, path_id: u64, epsilon: f64, t: f64, value: f64) {
        writeln!(
            self.body,
            "{},{},{},{},{}",
            estimator,
            path_id,
            fmt_f64(epsilon),
            fmt_f64(t),
            fmt_f64(value)
        )
        .expect("string write");
    }

    pub fn finish(self) -> String {
        self.body
    }
}

impl Default for EstimatorCsv {
    fn default() -> Self {
        Self::new()
    }
}

/// Path dump: `path_id,t,mode,value` (mode 0 for scalar paths).
pub fn scalar_path_csv(paths: &[(u64, &ScalarPath)]) -> String {
    let mut out = String::from("path_id,t,mode,value\n");
    for (id, p) in paths {
        for (j, v) in p.values.iter().enumerate() {
            writeln!(out, "{},{},0,{}", id, fmt_f64(p.grid.node(j)), fmt_f64(*v))
                .expect("string write");
        }
    }
    out
}

pub fn vector_path_csv(paths: &[(u64, &VectorPath)]) -> String {
    let mut out = String::from("path_id,t,mode,value\n");
    for (id, p) in paths {
        for (j, v) in p.values.iter().enumerate() {
            let t = fmt_f64(p.grid.node(j));
            for (k, c) in v.coeffs().iter().enumerate() {
                writeln!(out, "{},{},{},{}", id, t, k + 1, fmt_f64(*c)).expect("string write");
            }
        }
    }
    out
}

/// Write all artifacts of a run under `dir`.
pub fn write_artifacts(dir: &Path, results: &[ExperimentResult]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut all_rows = Vec::new();
    for r in results {
        for (name, body) in &r.detail_csv {
            std::fs::write(dir.join(name), body)?;
        }
        all_rows.extend(r.summary.iter().cloned());
    }
    std::fs::write(dir.join("summary.csv"), summary_csv(&all_rows))?;
    Ok(())
}

/// Human-readable convergence report from summary rows.
pub fn render_report(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let mut current = String::new();
    for r in rows {
        if r.experiment != current {
            current = r.experiment.clone();
            writeln!(out, "\n[{current}] {}", r.claim).expect("string write");
        }
        let eps = r
            .epsilon
            .map(|e| format!(" eps={e:.6}"))
            .unwrap_or_default();
        let verdict = match r.pass {
            Some(true) => "  PASS",
            Some(false) => "  FAIL",
            None => "",
        };
        let thr = r
            .threshold
            .map(|t| format!(" (threshold {t:.6e})"))
            .unwrap_or_default();
        writeln!(out, "  {:<28}{} = {:.6e}{}{}", r.statistic, eps, r.value, thr, verdict)
            .expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;

    #[test]
    fn summary_csv_round_trips_fields() {
        let rows = vec![
            SummaryRow::checked("E1", "median_sup_dev", Some(0.01), 0.05, 0.08, true, "claim a"),
            SummaryRow::info("E2", "slope", None, 1.0, "claim b"),
        ];
        let csv = summary_csv(&rows);
        assert!(csv.starts_with("experiment,statistic,epsilon"));
        assert!(csv.contains("E1,median_sup_dev,1.000000000000e-2,5.000000000000e-2,8.000000000000e-2,pass,claim a"));
        assert!(csv.contains("E2,slope,,1.000000000000e0,,,claim b"));
    }

    #[test]
    fn path_csv_shapes() {
        let grid = TimeGrid::new(1.0, 2).unwrap();
        let p = ScalarPath::from_values(grid, vec![0.0, 1.0, 2.0]).unwrap();
        let csv = scalar_path_csv(&[(7, &p)]);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("7,0"));
    }
}

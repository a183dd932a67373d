//! Experiment report rows and their CSV form.
//!
//! Rows are a pure function of (model files, dataset file, seed, config), so
//! two runs with the same inputs produce byte-identical CSV output. Column
//! order is fixed; values print in shortest round-trip float form.

use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use thiserror::Error;

pub const CSV_HEADER: [&str; 8] =
    ["experiment", "model_id", "law_count", "ell_or_J", "metric", "value", "n", "seed"];

/// One measured quantity. `n` counts the datapoints aggregated into `value`
/// (1 for per-term rows); undefined-IoU datapoints never produce rows and
/// shrink `n` of their aggregates instead.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub model_id: String,
    pub law_count: usize,
    pub ell_or_j: usize,
    pub metric: String,
    pub value: f64,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum ReportReadError {
    #[error("failed reading report: {0}")]
    Csv(#[from] csv::Error),
    #[error("report header mismatch: got {got:?}")]
    BadHeader { got: Vec<String> },
    #[error("report record {record}: bad field {field}: {value:?}")]
    BadField { record: usize, field: &'static str, value: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn new() -> Self {
        ExperimentReport::default()
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: ExperimentReport) {
        self.rows.extend(other.rows);
    }

    pub fn select<'a>(&'a self, experiment: &'a str, metric: &'a str) -> impl Iterator<Item = &'a ReportRow> {
        self.rows
            .iter()
            .filter(move |r| r.experiment == experiment && r.metric == metric)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&CSV_HEADER.join(","));
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{:?},{},{}",
                r.experiment, r.model_id, r.law_count, r.ell_or_j, r.metric, r.value, r.n, r.seed
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv_string())
    }

    pub fn read_csv(path: &Path) -> Result<Self, ReportReadError> {
        let mut reader = csv::Reader::from_reader(File::open(path).map_err(csv::Error::from)?);
        let header: Vec<String> =
            reader.headers()?.iter().map(|s| s.to_string()).collect();
        if header != CSV_HEADER {
            return Err(ReportReadError::BadHeader { got: header });
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let field = |idx: usize| record.get(idx).unwrap_or("").to_string();
            let parse_usize = |idx: usize, name: &'static str| {
                field(idx).parse::<usize>().map_err(|_| ReportReadError::BadField {
                    record: i + 1,
                    field: name,
                    value: field(idx),
                })
            };
            rows.push(ReportRow {
                experiment: field(0),
                model_id: field(1),
                law_count: parse_usize(2, "law_count")?,
                ell_or_j: parse_usize(3, "ell_or_J")?,
                metric: field(4),
                value: field(5).parse::<f64>().map_err(|_| ReportReadError::BadField {
                    record: i + 1,
                    field: "value",
                    value: field(5),
                })?,
                n: parse_usize(6, "n")?,
                seed: field(7).parse::<u64>().map_err(|_| ReportReadError::BadField {
                    record: i + 1,
                    field: "seed",
                    value: field(7),
                })?,
            });
        }
        Ok(ExperimentReport { rows })
    }

    /// Fixed-width text table of the aggregate rows (everything except the
    /// per-term `iou` samples), for terminal display.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<12} {:<22} {:>5} {:>8} {:<14} {:>12} {:>6} {:>10}",
            "experiment", "model_id", "laws", "ell_or_J", "metric", "value", "n", "seed"
        )
        .unwrap();
        for r in self.rows.iter().filter(|r| r.metric != "iou") {
            writeln!(
                out,
                "{:<12} {:<22} {:>5} {:>8} {:<14} {:>12.6} {:>6} {:>10}",
                r.experiment, r.model_id, r.law_count, r.ell_or_j, r.metric, r.value, r.n, r.seed
            )
            .unwrap();
        }
        out
    }

    /// CSV projection of one (experiment, metric) series, for plotting.
    pub fn plot_series(&self, experiment: &str, metric: &str) -> String {
        let mut out = String::from("model_id,law_count,ell_or_J,value,n\n");
        for r in self.select(experiment, metric) {
            writeln!(out, "{},{},{},{:?},{}", r.model_id, r.law_count, r.ell_or_j, r.value, r.n)
                .unwrap();
        }
        out
    }
}

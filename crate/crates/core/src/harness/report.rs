//! Per-item results and their serialized forms.

use std::time::Duration;

use serde::Serialize;

use crate::geometry::Cube;

/// One checked item: `ratio = lhs / (constant * rhs)` against `bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub id: String,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
    /// Set when the item did not meet the hypotheses and was not judged.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub witnesses: Vec<Cube>,
    #[serde(skip)]
    pub runtime: Duration,
}

pub const CSV_HEADER: &str = "id,lhs,rhs,constant,ratio,bound,pass";

/// `lhs / (constant * rhs)`, with `0/0 = 0`.
pub fn ratio_of(lhs: f64, rhs: f64, constant: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / (constant * rhs)
    }
}

impl Report {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.id, self.lhs, self.rhs, self.constant, self.ratio, self.bound, self.pass
        )
    }
}

/// Rows in the given order, header first, newline terminated.
pub fn to_csv(reports: &[Report]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub items: usize,
    pub skipped: usize,
    pub max_ratio: f64,
    pub failures: Vec<String>,
}

pub fn summarize(reports: &[Report]) -> Summary {
    let judged = reports.iter().filter(|r| r.skipped.is_none());
    Summary {
        schema: 1,
        items: reports.len(),
        skipped: reports.iter().filter(|r| r.skipped.is_some()).count(),
        max_ratio: judged.map(|r| r.ratio).fold(0.0, f64::max),
        failures: reports
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.id.clone())
            .collect(),
    }
}

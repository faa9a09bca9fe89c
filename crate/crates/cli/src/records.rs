use std::io::{Read, Write};

use serde::Deserialize;

use crate::CliError;

pub const HEADER: [&str; 9] = [
    "domain",
    "initial",
    "alpha",
    "lambda1",
    "lambda2",
    "norm_x",
    "norm_y",
    "wall_time_seconds",
    "status",
];

/// One simulation of a sweep. Norms are `None` when the run failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub domain: String,
    pub initial: String,
    pub alpha: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub norm_x: Option<f64>,
    pub norm_y: Option<f64>,
    pub wall_time_seconds: f64,
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn norms(&self) -> Option<[f64; 2]> {
        Some([self.norm_x?, self.norm_y?])
    }
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_records<W: Write>(out: W, records: &[SweepRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    for r in records {
        let status = match &r.error {
            None => "ok".to_string(),
            Some(e) => format!("failed: {e}"),
        };
        w.write_record([
            r.domain.clone(),
            r.initial.clone(),
            fmt_float(r.alpha),
            fmt_float(r.lambda1),
            fmt_float(r.lambda2),
            opt(r.norm_x),
            opt(r.norm_y),
            fmt_float(r.wall_time_seconds),
            status,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct Row {
    domain: String,
    initial: String,
    alpha: f64,
    lambda1: f64,
    lambda2: f64,
    norm_x: Option<f64>,
    norm_y: Option<f64>,
    wall_time_seconds: f64,
    status: String,
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<SweepRecord>, CliError> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(CliError::Records(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut records = Vec::new();
    for row in reader.deserialize::<Row>() {
        let row = row?;
        let error = match row.status.as_str() {
            "ok" => None,
            s => Some(s.strip_prefix("failed: ").unwrap_or(s).to_string()),
        };
        if error.is_none() && (row.norm_x.is_none() || row.norm_y.is_none()) {
            return Err(CliError::Records("record marked ok without norms".into()));
        }
        records.push(SweepRecord {
            domain: row.domain,
            initial: row.initial,
            alpha: row.alpha,
            lambda1: row.lambda1,
            lambda2: row.lambda2,
            norm_x: row.norm_x,
            norm_y: row.norm_y,
            wall_time_seconds: row.wall_time_seconds,
            error,
        });
    }
    Ok(records)
}

/// Mapped grid of one order: `points[i][j]` is the image of `(lambda1[i], lambda2[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    pub alpha: f64,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub points: Vec<Vec<[f64; 2]>>,
}

fn distinct_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Splits the records of a single domain/initial pair into complete grids, one per `α`, ascending.
pub fn grids(records: &[SweepRecord]) -> Result<Vec<AlphaGrid>, CliError> {
    let first = records.first().ok_or_else(|| CliError::Records("no records".into()))?;
    if records.iter().any(|r| r.domain != first.domain || r.initial != first.initial) {
        return Err(CliError::Records("records mix several domain/initial pairs".into()));
    }
    let mut out = Vec::new();
    for alpha in distinct_sorted(records.iter().map(|r| r.alpha)) {
        let rows: Vec<&SweepRecord> = records.iter().filter(|r| r.alpha == alpha).collect();
        let lambda1 = distinct_sorted(rows.iter().map(|r| r.lambda1));
        let lambda2 = distinct_sorted(rows.iter().map(|r| r.lambda2));
        if lambda1.len() < 2 || lambda2.len() < 2 {
            return Err(CliError::Records(format!("alpha {alpha}: grid needs at least 2 values per axis")));
        }
        let mut points = vec![vec![None; lambda2.len()]; lambda1.len()];
        for r in &rows {
            let i = lambda1.iter().position(|&l| l == r.lambda1).expect("value collected above");
            let j = lambda2.iter().position(|&l| l == r.lambda2).expect("value collected above");
            let p = r
                .norms()
                .ok_or_else(|| CliError::Records(format!("alpha {alpha}: failed record at ({}, {})", r.lambda1, r.lambda2)))?;
            if points[i][j].replace(p).is_some() {
                return Err(CliError::Records(format!("alpha {alpha}: duplicate record at ({}, {})", r.lambda1, r.lambda2)));
            }
        }
        let points = points
            .into_iter()
            .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| CliError::Records(format!("alpha {alpha}: incomplete grid")))?;
        out.push(AlphaGrid {
            alpha,
            lambda1,
            lambda2,
            points,
        });
    }
    Ok(out)
}

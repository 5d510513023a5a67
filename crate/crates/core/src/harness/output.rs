//! Time series records and CSV emission.
//!
//! Floats are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` exactly.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const TIME_SERIES_HEADER: [&str; 3] = ["step", "observable", "value"];
pub const SATURATION_HEADER: [&str; 5] = ["ell", "pair_i", "pair_j", "concurrence_sat", "ci_halfwidth"];

/// Formats with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub step: usize,
    pub observable: String,
    pub value: f64,
}

/// Per-step observable values, steps strictly increasing per observable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    records: Vec<Record>,
    last_step: BTreeMap<String, usize>,
}

impl TimeSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: usize, observable: &str, value: f64) -> Result<()> {
        if let Some(&last) = self.last_step.get(observable) {
            if step <= last {
                return Err(Error::Argument(format!(
                    "step {step} for {observable} does not follow step {last}"
                )));
            }
        }
        self.last_step.insert(observable.to_string(), step);
        self.records.push(Record {
            step,
            observable: observable.to_string(),
            value,
        });
        Ok(())
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Values of one observable in step order.
    pub fn values(&self, observable: &str) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.observable == observable)
            .map(|r| r.value)
            .collect()
    }

    pub fn observables(&self) -> Vec<&str> {
        self.last_step.keys().map(String::as_str).collect()
    }

    pub fn extend(&mut self, other: TimeSeries) -> Result<()> {
        for r in other.records {
            self.push(r.step, &r.observable, r.value)?;
        }
        Ok(())
    }
}

/// One row of a saturation table.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SaturationRow {
    pub ell: f64,
    pub pair_i: usize,
    pub pair_j: usize,
    pub concurrence_sat: f64,
    pub ci_halfwidth: f64,
}

/// Generic table: header plus already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

impl From<&TimeSeries> for Table {
    fn from(series: &TimeSeries) -> Self {
        let mut t = Table::new(&TIME_SERIES_HEADER);
        for r in series.records() {
            t.push(vec![r.step.to_string(), r.observable.clone(), format_float(r.value)]);
        }
        t
    }
}

impl From<&[SaturationRow]> for Table {
    fn from(rows: &[SaturationRow]) -> Self {
        let mut t = Table::new(&SATURATION_HEADER);
        for r in rows {
            t.push(vec![
                format_float(r.ell),
                r.pair_i.to_string(),
                r.pair_j.to_string(),
                format_float(r.concurrence_sat),
                format_float(r.ci_halfwidth),
            ]);
        }
        t
    }
}

/// Writes a table as UTF-8 CSV. Tables without rows are refused.
pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::Argument(format!(
            "refusing to write {}: no data rows",
            path.display()
        )));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let to_io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    };
    w.write_record(&table.header).map_err(|e| Error::io(path, to_io(e)))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| Error::io(path, to_io(e)))?;
    }
    let inner = w
        .into_inner()
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    inner
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?
        .flush()
        .map_err(|e| Error::io(path, e))
}

pub fn emit_time_series(series: &TimeSeries, path: &Path) -> Result<()> {
    emit_csv(&Table::from(series), path)
}

pub fn emit_saturation_table(rows: &[SaturationRow], path: &Path) -> Result<()> {
    emit_csv(&Table::from(rows), path)
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    let found = r
        .headers()
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Config(format!(
            "{}: unexpected header {:?}",
            path.display(),
            found
        )));
    }
    r.records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, k: usize, path: &Path) -> Result<T> {
    rec.get(k)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Config(format!("{}: malformed field {k} in {:?}", path.display(), rec)))
}

pub fn read_time_series(path: &Path) -> Result<TimeSeries> {
    let mut series = TimeSeries::new();
    for rec in read_rows(path, &TIME_SERIES_HEADER)? {
        let obs: String = field(&rec, 1, path)?;
        series.push(field(&rec, 0, path)?, &obs, field(&rec, 2, path)?)?;
    }
    Ok(series)
}

pub fn read_saturation_table(path: &Path) -> Result<Vec<SaturationRow>> {
    read_rows(path, &SATURATION_HEADER)?
        .iter()
        .map(|rec| {
            Ok(SaturationRow {
                ell: field(rec, 0, path)?,
                pair_i: field(rec, 1, path)?,
                pair_j: field(rec, 2, path)?,
                concurrence_sat: field(rec, 3, path)?,
                ci_halfwidth: field(rec, 4, path)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17, 0.0] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn steps_must_increase() {
        let mut s = TimeSeries::new();
        s.push(1, "a", 0.0).unwrap();
        s.push(1, "b", 0.0).unwrap();
        s.push(2, "a", 0.0).unwrap();
        assert!(s.push(2, "a", 0.0).is_err());
        assert_eq!(s.values("a").len(), 2);
    }

    #[test]
    fn csv_headers_and_empty_refusal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ts.csv");
        let mut s = TimeSeries::new();
        assert!(emit_time_series(&s, &path).is_err());
        s.push(1, "C(1,3)", 0.25).unwrap();
        emit_time_series(&s, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("step,observable,value\n"));
        assert_eq!(read_time_series(&path).unwrap(), s);

        let rows = [SaturationRow {
            ell: 2.8,
            pair_i: 1,
            pair_j: 3,
            concurrence_sat: 0.01,
            ci_halfwidth: 1e-4,
        }];
        let path = dir.path().join("sat.csv");
        emit_saturation_table(&rows, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("ell,pair_i,pair_j,concurrence_sat,ci_halfwidth\n"));
        assert_eq!(read_saturation_table(&path).unwrap(), rows);
        assert!(emit_saturation_table(&[], &path).is_err());
    }

    #[test]
    fn io_errors_carry_path() {
        let s = {
            let mut s = TimeSeries::new();
            s.push(1, "x", 1.0).unwrap();
            s
        };
        let err = emit_time_series(&s, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}

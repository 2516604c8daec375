// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Time-series records and their CSV form.
//!
//! Header `time,observable,value,stderr,method`. Floats are written in the
//! shortest form that parses back to the same bits, and `stderr` is empty
//! for deterministic results, so emit/parse round-trips exactly.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 5] = ["time", "observable", "value", "stderr", "method"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub time: f64,
    pub observable: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub method: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries {
    pub records: Vec<Record>,
}

#[derive(Debug, thiserror::Error)]
pub enum SeriesError {
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unexpected CSV header {0:?}")]
    Header(Vec<String>),
    #[error("invalid series: {0}")]
    Invalid(String),
}

impl TimeSeries {
    /// Values of one observable, in time order.
    pub fn values(&self, observable: &str) -> Vec<(f64, f64, Option<f64>)> {
        self.records
            .iter()
            .filter(|r| r.observable == observable)
            .map(|r| (r.time, r.value, r.stderr))
            .collect()
    }

    /// Checks finite values and strictly increasing times per observable.
    pub fn validate(&self) -> Result<(), SeriesError> {
        let mut last: std::collections::HashMap<&str, f64> = Default::default();
        for r in &self.records {
            if !r.time.is_finite() || !r.value.is_finite() || r.stderr.is_some_and(|s| s.is_nan()) {
                return Err(SeriesError::Invalid(format!(
                    "non-finite entry for '{}' at t = {}",
                    r.observable, r.time
                )));
            }
            if let Some(&prev) = last.get(r.observable.as_str()) {
                if !(r.time > prev) {
                    return Err(SeriesError::Invalid(format!(
                        "times for '{}' not increasing at {}",
                        r.observable, r.time
                    )));
                }
            }
            last.insert(&r.observable, r.time);
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String, SeriesError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            let stderr = r.stderr.map(|s| s.to_string()).unwrap_or_default();
            w.write_record([
                r.time.to_string(),
                r.observable.clone(),
                r.value.to_string(),
                stderr,
                r.method.clone(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| SeriesError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self, SeriesError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != CSV_HEADER {
            return Err(SeriesError::Header(header));
        }
        let records = r.deserialize().collect::<Result<Vec<Record>, _>>()?;
        Ok(Self { records })
    }

    /// Writes to a temporary file beside `path` and renames it into place.
    pub fn write_atomic(&self, path: &Path) -> Result<(), SeriesError> {
        let text = self.to_csv()?;
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(text.as_bytes())?;
        tmp.flush()?;
        tmp.persist(path).map_err(|e| SeriesError::Io(e.error))?;
        Ok(())
    }
}

//! Per-iteration solver records and their CSV form.
//!
//! Column order is fixed:
//! `n,objective,r_p,r_d,dist_to_ref,lyapunov,inner_dual_step_norm_last`.
//! Absent quantities are empty fields. Floats use the shortest text that
//! parses back to the same bits, so identical runs give identical files.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = [
    "n",
    "objective",
    "r_p",
    "r_d",
    "dist_to_ref",
    "lyapunov",
    "inner_dual_step_norm_last",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// Outer iteration index.
    pub n: usize,
    pub objective: f64,
    pub r_p: f64,
    pub r_d: f64,
    /// `||u_n - u_ref||`, when a reference is known.
    pub dist_to_ref: Option<f64>,
    /// `beta ||u_n - u_ref||^2 + alpha^2 / k_max ||v_n^0 - v_ref||^2`.
    pub lyapunov: Option<f64>,
    /// Last dual step of the inner loop that produced `u_n`.
    pub inner_dual_step_norm_last: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub rows: Vec<TraceRow>,
}

impl SolveTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn has_reference(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.lyapunov.is_some())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(io_err)?;
        for row in &self.rows {
            w.write_record([
                row.n.to_string(),
                format_f64(row.objective),
                format_f64(row.r_p),
                format_f64(row.r_d),
                format_opt(row.dist_to_ref),
                format_opt(row.lyapunov),
                format_opt(row.inner_dual_step_norm_last),
            ])
            .map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::TraceIo(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is ascii")
    }

    /// Parses a trace written by [`SolveTrace::write_csv`]. The header must
    /// match exactly.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers().map_err(io_err)?;
        if header.iter().ne(CSV_HEADER.iter().copied()) {
            return Err(Error::TraceIo(format!("unexpected header {header:?}")));
        }
        let mut rows = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record.map_err(io_err)?;
            if record.len() != CSV_HEADER.len() {
                return Err(Error::TraceIo(format!("row {line}: expected 7 fields")));
            }
            let required = |i: usize| -> Result<f64> {
                parse_opt(&record[i], line)?
                    .ok_or_else(|| Error::TraceIo(format!("row {line}: empty {}", CSV_HEADER[i])))
            };
            rows.push(TraceRow {
                n: record[0]
                    .parse()
                    .map_err(|_| Error::TraceIo(format!("row {line}: bad iteration index")))?,
                objective: required(1)?,
                r_p: required(2)?,
                r_d: required(3)?,
                dist_to_ref: parse_opt(&record[4], line)?,
                lyapunov: parse_opt(&record[5], line)?,
                inner_dual_step_norm_last: parse_opt(&record[6], line)?,
            });
        }
        Ok(SolveTrace { rows })
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Self::read_csv(text.as_bytes())
    }
}

fn io_err(e: csv::Error) -> Error {
    Error::TraceIo(e.to_string())
}

/// Shortest round-trip representation.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

fn parse_opt(field: &str, line: usize) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| Error::TraceIo(format!("row {line}: cannot parse {field:?}")))
}

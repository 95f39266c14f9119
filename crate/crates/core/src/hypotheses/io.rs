//! Prediction-matrix CSV and class-definition files.
//!
//! Matrix CSV: a header `h0,h1,...,h{n-1}` followed by one row per example,
//! each holding `n` values in `{0,1}` (1 = hypothesis correct).
//!
//! Class file (TOML):
//!
//! ```toml
//! gamma0 = 0.15        # optional
//! [[hypothesis]]
//! id = 0
//! accuracy = 0.65
//! ```

use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::{HypothesisClass, MatrixSource, SuccessVector};
use crate::error::{Error, Result};

pub fn parse_matrix_csv<R: Read>(reader: R) -> Result<MatrixSource> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::malformed(1, "missing header line"));
    }
    for (i, name) in header.iter().enumerate() {
        if name != format!("h{i}") {
            return Err(Error::malformed(
                1,
                format!("header column {i} is `{name}`, expected `h{i}`"),
            ));
        }
    }
    let n = header.len();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let bits = record
            .iter()
            .enumerate()
            .map(|(h, field)| match field {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::malformed(
                    line,
                    format!("column h{h} holds `{other}`, expected 0 or 1"),
                )),
            })
            .collect::<Result<Vec<bool>>>()?;
        rows.push(SuccessVector::new(bits));
    }
    MatrixSource::new(n, rows)
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => Error::malformed(
            line,
            format!("row has {len} fields, header has {expected_len}"),
        ),
        _ => Error::malformed(line, e.to_string()),
    }
}

pub fn read_matrix_csv(path: &Path) -> Result<MatrixSource> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_csv(std::io::BufReader::new(file)).map_err(|e| e.in_file(path))
}

pub fn write_matrix_csv<W: Write>(writer: W, n: usize, rows: &[SuccessVector]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(writer);
    let to_io = |e: csv::Error| Error::io("<matrix>", std::io::Error::other(e));
    w.write_record((0..n).map(|h| format!("h{h}")))
        .map_err(to_io)?;
    for row in rows {
        if row.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: row.len(),
            });
        }
        w.write_record(row.bits().iter().map(|&b| if b { "1" } else { "0" }))
            .map_err(to_io)?;
    }
    w.flush().map_err(|e| Error::io("<matrix>", e))?;
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassFile {
    gamma0: Option<f64>,
    #[serde(default)]
    hypothesis: Vec<ClassEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassEntry {
    id: usize,
    accuracy: f64,
}

pub fn parse_class_file(text: &str) -> Result<HypothesisClass> {
    let file: ClassFile = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map_or(0, |s| text[..s.start].matches('\n').count() as u64 + 1);
        Error::malformed(line, e.message().to_string())
    })?;
    let mut entries = file.hypothesis;
    entries.sort_by_key(|e| e.id);
    for (expected, entry) in entries.iter().enumerate() {
        if entry.id != expected {
            return Err(Error::param(
                "class",
                format!("hypothesis ids must be unique and contiguous from 0; missing or repeated id near {expected}"),
            ));
        }
    }
    let accuracies: Vec<f64> = entries.iter().map(|e| e.accuracy).collect();
    let class = HypothesisClass::from_accuracies(&accuracies)?;
    match file.gamma0 {
        Some(g) => class.with_gamma0(g),
        None => Ok(class),
    }
}

pub fn read_class_file(path: &Path) -> Result<HypothesisClass> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_class_file(&text).map_err(|e| e.in_file(path))
}

//! Canonical JSON serialization.
//!
//! All file formats share one convention: UTF-8, newline-terminated, and
//! every real number written in scientific notation with 17 significant
//! digits. 17 digits round-trip any f64 exactly, so
//! `serialize(parse(serialize(x))) == serialize(x)` byte for byte — the CLI
//! relies on this for diff-able artifacts.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::io;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        // one digit before the point + 16 after = 17 significant digits
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize to the canonical newline-terminated JSON string.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Json(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Json(e.to_string()))
}

pub fn from_json_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

/// Square-matrix file format: `{"dim": n, "entries": [[[re, im], ...], ...]}`
/// row-major.
pub fn matrix_to_json(m: &ComplexMatrix) -> Result<String> {
    let n = m.dim()?;
    let entries = (0..n)
        .map(|i| (0..n).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect();
    to_json_string(&MatrixJson { dim: n, entries })
}

pub fn matrix_from_json(s: &str) -> Result<ComplexMatrix> {
    let repr: MatrixJson = from_json_str(s)?;
    if repr.entries.len() != repr.dim || repr.entries.iter().any(|r| r.len() != repr.dim) {
        return Err(Error::Json(format!(
            "matrix entries do not form a {0}x{0} grid",
            repr.dim
        )));
    }
    Ok(ComplexMatrix::from_fn(repr.dim, repr.dim, |i, j| {
        let [re, im] = repr.entries[i][j];
        Complex64::new(re, im)
    }))
}

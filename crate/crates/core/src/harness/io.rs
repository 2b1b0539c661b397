//! Matrix files: JSON objects `{name, rows, cols, entries}` with `entries`
//! a row-major array of `[re, im]` pairs.
//!
//! ```json
//! {"name": "T", "rows": 1, "cols": 2, "entries": [[1.0, 0.0], [0.0, -2.5]]}
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(name: impl Into<String>, m: &ComplexMatrix) -> Self {
        Self {
            name: name.into(),
            rows: m.rows(),
            cols: m.cols(),
            entries: m.row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(self.rows, self.cols, entries)
    }

    /// Parses and validates a matrix file. Every failure is an
    /// [`Error::Parse`] carrying the byte offset it refers to.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let file: MatrixFile = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
            offset: byte_offset(bytes, e.line(), e.column()),
            message: e.to_string(),
        })?;
        if file.entries.len() != file.rows * file.cols {
            return Err(Error::Parse {
                offset: key_offset(bytes, "entries"),
                message: format!(
                    "entries has {} pairs, expected rows*cols = {}",
                    file.entries.len(),
                    file.rows * file.cols
                ),
            });
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix files always serialize")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

/// Byte offset of a 1-based `(line, column)` position as reported by
/// `serde_json`, clamped to the input length.
fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start = bytes
        .iter()
        .enumerate()
        .filter(|&(_, &b)| b == b'\n')
        .nth(line.saturating_sub(2))
        .map_or(0, |(i, _)| if line == 1 { 0 } else { i + 1 });
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

/// Offset of the first occurrence of `"key"`, or 0.
fn key_offset(bytes: &[u8], key: &str) -> usize {
    let needle = format!("\"{key}\"");
    bytes
        .windows(needle.len())
        .position(|w| w == needle.as_bytes())
        .unwrap_or(0)
}

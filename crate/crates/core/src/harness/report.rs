//! Command reports: text for people, JSON for machines, same data in both.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::io::MatrixFile;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedVerdict {
    pub name: String,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedResidual {
    pub name: String,
    pub value: f64,
    /// Threshold the residual is judged against, when there is one.
    pub bound: Option<f64>,
}

/// A failing trial, complete enough to be replayed on its own.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub campaign: String,
    pub seed: u64,
    pub index: u64,
    pub reason: String,
    pub matrices: Vec<MatrixFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    /// `sha256:<hex>` over the command's inputs.
    pub inputs: String,
    pub verdicts: Vec<NamedVerdict>,
    pub residuals: Vec<NamedResidual>,
    /// Matrices worth showing (factors, reproduced example entries).
    pub matrices: Vec<MatrixFile>,
    /// Free-form `key: value` lines, e.g. trial counts.
    pub notes: Vec<(String, String)>,
    pub counterexample: Option<Counterexample>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, input_bytes: &[&[u8]]) -> Self {
        Self {
            command: command.into(),
            inputs: digest(input_bytes),
            verdicts: Vec::new(),
            residuals: Vec::new(),
            matrices: Vec::new(),
            notes: Vec::new(),
            counterexample: None,
            passed: true,
        }
    }

    /// Records a verdict; a false verdict fails the report.
    pub fn verdict(&mut self, name: impl Into<String>, value: bool) {
        self.passed &= value;
        self.verdicts.push(NamedVerdict {
            name: name.into(),
            value,
        });
    }

    /// Records an informational residual with no threshold.
    pub fn residual(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.push(NamedResidual {
            name: name.into(),
            value,
            bound: None,
        });
    }

    /// Records a residual together with the verdict `value <= bound`.
    pub fn bounded(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        let name = name.into();
        self.verdict(format!("{name} <= {bound:e}"), value <= bound);
        self.residuals.push(NamedResidual {
            name,
            value,
            bound: Some(bound),
        });
    }

    pub fn matrix(&mut self, file: MatrixFile) {
        self.matrices.push(file);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "inputs: {}", self.inputs);
        for (k, v) in &self.notes {
            let _ = writeln!(out, "{k}: {v}");
        }
        for m in &self.matrices {
            let _ = writeln!(out, "matrix {} ({}x{})", m.name, m.rows, m.cols);
            for i in 0..m.rows {
                for j in 0..m.cols {
                    let [re, im] = m.entries[i * m.cols + j];
                    let _ = writeln!(out, "  {}[{i}][{j}] = {}", m.name, format_entry(re, im));
                }
            }
        }
        for r in &self.residuals {
            match r.bound {
                Some(b) => {
                    let _ = writeln!(
                        out,
                        "residual {} = {:.3e} (bound {:.1e})",
                        r.name, r.value, b
                    );
                }
                None => {
                    let _ = writeln!(out, "residual {} = {:.3e}", r.name, r.value);
                }
            }
        }
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "verdict {}: {}",
                v.name,
                if v.value { "pass" } else { "FAIL" }
            );
        }
        if let Some(c) = &self.counterexample {
            let _ = writeln!(
                out,
                "counterexample: campaign {} seed {} trial {}: {}",
                c.campaign, c.seed, c.index, c.reason
            );
        }
        let _ = writeln!(out, "result: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

/// Sixteen decimals; the imaginary part only when nonzero.
pub fn format_entry(re: f64, im: f64) -> String {
    // `+ 0.0` folds negative zero into zero.
    let re = re + 0.0;
    if im == 0.0 {
        format!("{re:.16}")
    } else {
        format!("{re:.16}{im:+.16}i")
    }
}

/// `sha256:<hex>` of the length-prefixed concatenation of the inputs.
pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

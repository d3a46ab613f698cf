// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Output documents: reduced-model JSON, validation JSON and CSV.
//!
//! Numbers serialize through the shortest round-trip formatting, so reading
//! a document back and re-serializing reproduces it byte for byte. Column
//! meanings are documented in `schemas/output-columns.md`.

use serde::{Deserialize, Serialize};

use crate::config::{matrix_literal, MatrixLiteral};
use crate::engine::ReducedModel;
use crate::error::Result;
use crate::validation::ValidationReport;

pub const REDUCE_SCHEMA: &str = "adiael.reduce.v1";
pub const VALIDATE_SCHEMA: &str = "adiael.validate.v1";
pub const ORACLE_SCHEMA: &str = "adiael.oracle.v1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    /// Row-major, complex entries as `[re, im]`.
    pub data: MatrixLiteral,
}

impl MatrixDoc {
    pub fn from_cmat(m: &crate::linalg::CMat) -> Self {
        MatrixDoc { rows: m.nrows(), cols: m.ncols(), data: matrix_literal(m) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OrderDoc {
    pub order: usize,
    pub method: String,
    pub invariance_residual: f64,
    pub gauge_residual: f64,
    /// Reduced generator contribution on the retained space.
    pub generator: MatrixDoc,
    /// Correction map from retained-space operators to joint operators.
    pub correction: MatrixDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReduceDoc {
    pub schema: String,
    pub dim_a: usize,
    pub dim_b: usize,
    pub g: f64,
    /// Diagnostic timescale ratio `g / kappa_ref`.
    pub epsilon: f64,
    pub warnings: Vec<String>,
    pub orders: Vec<OrderDoc>,
}

impl ReduceDoc {
    pub fn from_reduced(red: &ReducedModel) -> Self {
        ReduceDoc {
            schema: REDUCE_SCHEMA.to_string(),
            dim_a: red.model.dim_a,
            dim_b: red.model.dim_b,
            g: red.model.g,
            epsilon: red.epsilon,
            warnings: red.warnings.clone(),
            orders: red
                .orders
                .iter()
                .map(|o| OrderDoc {
                    order: o.order,
                    method: o.method.to_string(),
                    invariance_residual: o.invariance_residual,
                    gauge_residual: o.gauge_residual,
                    generator: MatrixDoc::from_cmat(&o.generator.mat),
                    correction: MatrixDoc::from_cmat(&o.correction.mat),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateDoc {
    pub schema: String,
    #[serde(flatten)]
    pub report: ValidationReport,
}

/// RFC 4180 CSV with '.' decimal separator. Fields containing commas,
/// quotes or newlines are quoted; floats print in shortest round-trip form.
pub fn write_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(","));
    out.push_str("\r\n");
    for row in rows {
        out.push_str(&row.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(","));
        out.push_str("\r\n");
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Pretty JSON with a trailing newline; the writer used by every command.
pub fn to_json_string<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

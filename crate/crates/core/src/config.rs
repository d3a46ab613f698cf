// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Model configuration documents.
//!
//! Configs are UTF-8 JSON validated against the schema shipped in
//! `schemas/model-config.schema.json`; unknown keys are rejected. Complex
//! numbers are `[re, im]` pairs and matrices row-major nested arrays.

use serde::{Deserialize, Serialize};

use crate::engine::SylvesterMethod;
use crate::error::{Error, Result};
use crate::linalg::{CMat, Operator, C64};
use crate::model::{boson_ops, damped_mode_spec, qubit_ops, BipartiteModel};
use crate::quad::QuadratureConfig;

pub type MatrixLiteral = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dims: Dims,
    #[serde(rename = "hamiltonian_A")]
    pub hamiltonian_a: HamiltonianA,
    #[serde(rename = "lindblad_B")]
    pub lindblad_b: LindbladB,
    pub couplings: Vec<Coupling>,
    pub g: f64,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianA {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_eg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixLiteral>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladB {
    #[serde(rename = "omega_B")]
    pub omega_b: f64,
    pub kappa: f64,
    #[serde(default)]
    pub kappa_phi: f64,
    #[serde(default)]
    pub n_th: f64,
    pub fock_cutoff: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(rename = "A_k", skip_serializing_if = "Option::is_none")]
    pub a_k: Option<MatrixLiteral>,
    #[serde(rename = "B_k", skip_serializing_if = "Option::is_none")]
    pub b_k: Option<MatrixLiteral>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solver {
    #[serde(default = "default_method")]
    pub method: SylvesterMethod,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_decay_folds")]
    pub decay_folds: f64,
}

fn default_method() -> SylvesterMethod {
    SylvesterMethod::Direct
}
fn default_tol() -> f64 {
    1e-9
}
fn default_decay_folds() -> f64 {
    40.0
}

impl Default for Solver {
    fn default() -> Self {
        Solver { method: default_method(), tol: default_tol(), decay_folds: default_decay_folds() }
    }
}

/// Everything a command needs to run: the model plus solver options.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub model: BipartiteModel,
    pub method: SylvesterMethod,
    pub quad: QuadratureConfig,
    pub order: usize,
}

pub fn parse_matrix(lit: &MatrixLiteral, expect_dim: usize, what: &str) -> Result<Operator> {
    if lit.len() != expect_dim || lit.iter().any(|row| row.len() != expect_dim) {
        return Err(Error::Config(format!(
            "{what}: matrix literal must be {expect_dim}x{expect_dim}"
        )));
    }
    let mat = CMat::from_shape_fn((expect_dim, expect_dim), |(i, j)| {
        C64::new(lit[i][j][0], lit[i][j][1])
    });
    Operator::new(mat)
}

pub fn matrix_literal(op: &CMat) -> MatrixLiteral {
    (0..op.nrows())
        .map(|i| (0..op.ncols()).map(|j| [op[(i, j)].re, op[(i, j)].im]).collect())
        .collect()
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(text)?;
        Ok(cfg)
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        if self.dims.b != self.lindblad_b.fock_cutoff {
            return Err(Error::Config(format!(
                "dims.B = {} must equal lindblad_B.fock_cutoff = {}",
                self.dims.b, self.lindblad_b.fock_cutoff
            )));
        }
        if !(self.g >= 0.0) {
            return Err(Error::Config(format!("g = {} must be nonnegative", self.g)));
        }
        let h_a = self.resolve_hamiltonian()?;
        let spec_b = damped_mode_spec(
            self.lindblad_b.omega_b,
            self.lindblad_b.kappa,
            self.lindblad_b.kappa_phi,
            self.lindblad_b.n_th,
            self.lindblad_b.fock_cutoff,
        )
        .map_err(|e| Error::Config(format!("lindblad_B: {e}")))?;
        if self.couplings.is_empty() {
            return Err(Error::Config("couplings: at least one coupling is required".into()));
        }
        let mut couplings = Vec::new();
        for (k, c) in self.couplings.iter().enumerate() {
            couplings.extend(self.resolve_coupling(c, k)?);
        }
        let model = BipartiteModel::new(h_a, spec_b, couplings, self.g)
            .map_err(|e| Error::Config(format!("model: {e}")))?;
        let quad = QuadratureConfig {
            tol: self.solver.tol,
            decay_folds: self.solver.decay_folds,
            ..Default::default()
        };
        quad.validate().map_err(|e| Error::Config(format!("solver: {e}")))?;
        Ok(ResolvedConfig { model, method: self.solver.method, quad, order: self.order })
    }

    fn resolve_hamiltonian(&self) -> Result<Operator> {
        let h = &self.hamiltonian_a;
        match (&h.preset, &h.matrix) {
            (Some(name), None) => match name.as_str() {
                "qubit_sigma_z" => {
                    if self.dims.a != 2 {
                        return Err(Error::Config(
                            "hamiltonian_A: preset qubit_sigma_z requires dims.A = 2".into(),
                        ));
                    }
                    let omega = h.omega_eg.ok_or_else(|| {
                        Error::Config("hamiltonian_A: preset qubit_sigma_z needs omega_eg".into())
                    })?;
                    // H_A = -omega_eg sz / 2 in the ground-state-positive basis
                    Ok(qubit_ops().z.scale(C64::new(-omega / 2.0, 0.0)))
                }
                other => Err(Error::Config(format!("hamiltonian_A: unknown preset {other:?}"))),
            },
            (None, Some(lit)) => {
                if h.omega_eg.is_some() {
                    return Err(Error::Config(
                        "hamiltonian_A: omega_eg only applies to presets".into(),
                    ));
                }
                parse_matrix(lit, self.dims.a, "hamiltonian_A")
            }
            _ => Err(Error::Config(
                "hamiltonian_A: exactly one of preset or matrix must be given".into(),
            )),
        }
    }

    fn resolve_coupling(&self, c: &Coupling, idx: usize) -> Result<Vec<(Operator, Operator)>> {
        match (&c.preset, &c.a_k, &c.b_k) {
            (Some(name), None, None) => {
                if self.dims.a != 2 {
                    return Err(Error::Config(format!(
                        "couplings[{idx}]: preset {name:?} requires dims.A = 2"
                    )));
                }
                let q = qubit_ops();
                let (b, bd, _) = boson_ops(self.dims.b)?;
                match name.as_str() {
                    "jaynes_cummings" => Ok(vec![(q.raise, b), (q.lower, bd)]),
                    "dipolar_sigma_x" => Ok(vec![(q.x, b.add(&bd))]),
                    other => {
                        Err(Error::Config(format!("couplings[{idx}]: unknown preset {other:?}")))
                    }
                }
            }
            (None, Some(a), Some(b)) => {
                let a_op = parse_matrix(a, self.dims.a, &format!("couplings[{idx}].A_k"))?;
                let b_op = parse_matrix(b, self.dims.b, &format!("couplings[{idx}].B_k"))?;
                Ok(vec![(a_op, b_op)])
            }
            _ => Err(Error::Config(format!(
                "couplings[{idx}]: give either a preset or both A_k and B_k"
            ))),
        }
    }
}

// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error taxonomy shared by all modules.

use num_complex::Complex64;

/// Failures surfaced by model construction, solvers, and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The Sylvester system is (near-)singular: an eigenvalue of the left
    /// coefficient collides with one of the negated right coefficient.
    #[error("singular Sylvester system: eigenvalue {lhs} of A collides with {rhs} of -B (gap {gap:.3e}, threshold {threshold:.3e})")]
    SingularSylvester {
        lhs: Complex64,
        rhs: Complex64,
        gap: f64,
        threshold: f64,
    },

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("degenerate steady state: kernel dimension {count}, expected 1")]
    DegenerateSteadyState { count: usize },

    #[error("no spectral separation between slow and fast blocks: {0}")]
    NoSeparation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Numerical(format!("LAPACK: {e}"))
    }
}

impl Error {
    /// Process exit code for the CLI: 2 for input problems, 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::DimensionMismatch(_)
            | Error::Config(_)
            | Error::Json(_)
            | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adiabatic elimination of a fast-decaying quantum subsystem coupled to a
//! retained subsystem with fast unitary dynamics.
//!
//! The crate builds bipartite Lindblad models, computes the order-by-order
//! reduced generators and invariant-manifold correction maps in the
//! partial-trace gauge, evaluates the closed-form reduced models of the two
//! worked examples (resonant exchange coupling and lab-frame dipolar
//! coupling), and validates everything against brute-force integration of
//! the full master equation.

// force the BLAS backend link
extern crate blas_src;

pub mod error;
pub mod linalg;
pub mod model;
pub mod quad;
pub mod engine;
pub mod oracles;
pub mod validation;
pub mod config;
pub mod report;

pub use error::{Error, Result};

// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive composite Gauss-Legendre quadrature.
//!
//! Panels are refined by bisection; the error estimate per panel is the
//! Richardson-style difference between the one-panel rule and the sum of the
//! two half-panel rules. Budgets are allotted proportionally to panel length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// Parameters of the semi-infinite integrals.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Relative tolerance on the accumulated integral.
    pub tol: f64,
    /// Horizon in units of the slowest decay time: `T = decay_folds / mu`.
    pub decay_folds: f64,
    /// Hard cap on the number of accepted panels.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { tol: 1e-9, decay_folds: 40.0, max_panels: 512 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.decay_folds > 0.0) || self.max_panels == 0 {
            return Err(Error::InvalidArgument(format!(
                "quadrature config requires tol > 0, decay_folds > 0, max_panels > 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Values an integrand may produce.
pub trait QuadOutput: Clone {
    fn scaled(&self, w: f64) -> Self;
    fn add_scaled(&mut self, other: &Self, w: f64);
    fn norm(&self) -> f64;
    fn diff_norm(&self, other: &Self) -> f64;
}

impl QuadOutput for C64 {
    fn scaled(&self, w: f64) -> Self {
        self * w
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn norm(&self) -> f64 {
        num_complex::Complex::norm(*self)
    }
    fn diff_norm(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl QuadOutput for CMat {
    fn scaled(&self, w: f64) -> Self {
        self.mapv(|z| z * w)
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        self.zip_mut_with(other, |a, b| *a += b * w);
    }
    fn norm(&self) -> f64 {
        self.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
    fn diff_norm(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

// 16-point Gauss-Legendre nodes (positive half) and weights on [-1, 1].
const GL16_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL16_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// One 16-point panel over `[a, b]`.
pub fn gl16<T: QuadOutput>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> T {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc: Option<T> = None;
    for k in 0..8 {
        let dx = half * GL16_X[k];
        let w = GL16_W[k] * half;
        for x in [mid - dx, mid + dx] {
            let v = f(x);
            match &mut acc {
                None => acc = Some(v.scaled(w)),
                Some(a) => a.add_scaled(&v, w),
            }
        }
    }
    acc.expect("gl16 evaluates at least one node")
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// The per-panel budget is `tol * max(magnitude, floor)` distributed by
/// panel length, where `magnitude` is estimated from a uniform first pass of
/// `initial_panels` panels. The `floor` lets callers state the natural scale
/// of the result, so integrands that are pure round-off settle immediately
/// instead of chasing noise. Exhausting `max_panels` stops refinement; the
/// returned error estimate tells the caller how much was left on the table.
pub fn integrate_adaptive<T: QuadOutput>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    tol: f64,
    max_panels: usize,
    initial_panels: usize,
    floor: f64,
) -> Result<(T, f64, usize)> {
    if !(b > a) {
        return Err(Error::InvalidArgument(format!("bad integration range [{a}, {b}]")));
    }
    let init = initial_panels.clamp(1, max_panels);
    let len = b - a;
    let mut stack: Vec<(f64, f64, T)> = Vec::new();
    let mut magnitude = 0.0f64;
    for k in 0..init {
        let x0 = a + len * k as f64 / init as f64;
        let x1 = a + len * (k + 1) as f64 / init as f64;
        let i = gl16(&mut f, x0, x1);
        magnitude += i.norm();
        stack.push((x0, x1, i));
    }
    let tol_abs = tol * magnitude.max(floor).max(f64::MIN_POSITIVE);

    let mut total: Option<T> = None;
    let mut err_acc = 0.0f64;
    let mut panels = 0usize;
    while let Some((x0, x1, whole)) = stack.pop() {
        let mid = 0.5 * (x0 + x1);
        let left = gl16(&mut f, x0, mid);
        let right = gl16(&mut f, mid, x1);
        let mut refined = left.clone();
        refined.add_scaled(&right, 1.0);
        let err = refined.diff_norm(&whole);
        let budget = tol_abs * (x1 - x0) / len;
        if err <= budget || panels + stack.len() + 2 > max_panels {
            err_acc += err;
            panels += 2;
            match &mut total {
                None => total = Some(refined),
                Some(t) => t.add_scaled(&refined, 1.0),
            }
        } else {
            stack.push((x0, mid, left));
            stack.push((mid, x1, right));
        }
    }
    Ok((total.expect("at least one panel"), err_acc, panels))
}

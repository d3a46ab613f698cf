// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Matrix exponentials of dense complex matrices.
//!
//! Two routes: spectral (eigendecomposition, reused across many times `t`)
//! and scaling-and-squaring with a diagonal Padé kernel. The spectral route
//! is used whenever the eigenvector matrix is well conditioned
//! (condition number below 1e8); otherwise we fall back to Padé.

use ndarray_linalg::{Eig, Factorize, OperationNorm, Solve, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{dagger, CMat, CVec, C64};

/// Condition-number bound on the eigenvector matrix above which the spectral
/// route is abandoned.
pub const EIGVEC_COND_LIMIT: f64 = 1e8;

/// Reusable propagator `t -> e^{tM}` for a fixed matrix `M`.
pub enum Propagator {
    /// `M = V diag(lambda) V^{-1}` with well-conditioned `V`.
    Spectral { eigvals: CVec, vecs: CMat, vecs_inv: CMat },
    /// Defective or badly conditioned eigenbasis: exponentiate per call.
    Dense { mat: CMat },
}

impl Propagator {
    pub fn new(m: &CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch("expm of a non-square matrix".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("expm of a matrix with non-finite entries".into()));
        }
        let (eigvals, vecs) = m.eig()?;
        if let Some(vecs_inv) = well_conditioned_inverse(&vecs)? {
            Ok(Propagator::Spectral { eigvals, vecs, vecs_inv })
        } else {
            Ok(Propagator::Dense { mat: m.clone() })
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Propagator::Spectral { vecs, .. } => vecs.nrows(),
            Propagator::Dense { mat } => mat.nrows(),
        }
    }

    /// Zero every eigenvalue below `rel_tol` of the spectral radius.
    ///
    /// Markovian generators carry an exact kernel (the trace functional is a
    /// left null vector by construction); assembly round-off shifts it by
    /// O(eps * ||M||), which turns into `e^{eps ||M|| t}` drift at long
    /// horizons. Restoring the kernel keeps such propagation trace-exact.
    pub fn snap_kernel(&mut self, rel_tol: f64) {
        if let Propagator::Spectral { eigvals, .. } = self {
            let scale = eigvals.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for v in eigvals.iter_mut() {
                if v.norm() < rel_tol * scale {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Dense matrix of `e^{tM}`.
    pub fn at(&self, t: f64) -> Result<CMat> {
        match self {
            Propagator::Spectral { eigvals, vecs, vecs_inv } => {
                let phases = eigvals.mapv(|l| (l * t).exp());
                let mut scaled = vecs.clone();
                for (j, col) in scaled.columns_mut().into_iter().enumerate() {
                    let p = phases[j];
                    let mut col = col;
                    col.mapv_inplace(|z| z * p);
                }
                Ok(scaled.dot(vecs_inv))
            }
            Propagator::Dense { mat } => expm_pade(&mat.mapv(|z| z * t)),
        }
    }

    /// `e^{tM} v` without forming the full exponential on the spectral route.
    pub fn apply(&self, t: f64, v: &CVec) -> Result<CVec> {
        match self {
            Propagator::Spectral { eigvals, vecs, vecs_inv } => {
                let mut w = vecs_inv.dot(v);
                for (j, x) in w.iter_mut().enumerate() {
                    *x *= (eigvals[j] * t).exp();
                }
                Ok(vecs.dot(&w))
            }
            Propagator::Dense { .. } => Ok(self.at(t)?.dot(v)),
        }
    }
}

/// Inverse of `v` if its condition number stays below [`EIGVEC_COND_LIMIT`].
fn well_conditioned_inverse(v: &CMat) -> Result<Option<CMat>> {
    let (_, sv, _) = v.svd(false, false)?;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= 0.0 || smax / smin >= EIGVEC_COND_LIMIT {
        return Ok(None);
    }
    let lu = v.factorize()?;
    let n = v.nrows();
    let mut inv = CMat::zeros((n, n));
    let mut e = CVec::zeros(n);
    for j in 0..n {
        e.fill(C64::new(0.0, 0.0));
        e[j] = C64::new(1.0, 0.0);
        let col = lu.solve(&e)?;
        inv.column_mut(j).assign(&col);
    }
    Ok(Some(inv))
}

/// `e^{tM}` for a dense complex matrix.
pub fn expm(m: &CMat, t: f64) -> Result<CMat> {
    Propagator::new(m)?.at(t)
}

// Scaling-and-squaring with [m/m] diagonal Padé kernels, order chosen from
// the 1-norm thresholds of Higham (2005).
const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Padé numerator/denominator split for even coefficient table `c`:
/// `U = A * (c1 I + c3 A^2 + ...)`, `V = c0 I + c2 A^2 + ...`.
fn pade_uv(a: &CMat, c: &[f64]) -> (CMat, CMat) {
    let n = a.nrows();
    let a2 = a.dot(a);
    // even powers a^0, a^2, a^4, ...
    let mut even_pows: Vec<CMat> = vec![CMat::eye(n)];
    let needed = (c.len() - 1) / 2;
    for _ in 0..needed {
        let next = even_pows.last().unwrap().dot(&a2);
        even_pows.push(next);
    }
    let mut u_poly = CMat::zeros((n, n));
    let mut v = CMat::zeros((n, n));
    for (k, &ck) in c.iter().enumerate() {
        let term = &even_pows[k / 2] * C64::new(ck, 0.0);
        if k % 2 == 1 {
            u_poly += &term;
        } else {
            v += &term;
        }
    }
    (a.dot(&u_poly), v)
}

/// Order-13 form reuses low powers to keep the operation count down.
fn pade13_uv(a: &CMat) -> (CMat, CMat) {
    let n = a.nrows();
    let c = &PADE_13;
    let id = CMat::eye(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let u_inner = &a6 * C64::new(c[13], 0.0) + &a4 * C64::new(c[11], 0.0) + &a2 * C64::new(c[9], 0.0);
    let u = a.dot(
        &(a6.dot(&u_inner)
            + &a6 * C64::new(c[7], 0.0)
            + &a4 * C64::new(c[5], 0.0)
            + &a2 * C64::new(c[3], 0.0)
            + &id * C64::new(c[1], 0.0)),
    );
    let v_inner = &a6 * C64::new(c[12], 0.0) + &a4 * C64::new(c[10], 0.0) + &a2 * C64::new(c[8], 0.0);
    let v = a6.dot(&v_inner)
        + &a6 * C64::new(c[6], 0.0)
        + &a4 * C64::new(c[4], 0.0)
        + &a2 * C64::new(c[2], 0.0)
        + &id * C64::new(c[0], 0.0);
    (u, v)
}

/// Scaling-and-squaring matrix exponential with diagonal Padé kernel.
pub fn expm_pade(a: &CMat) -> Result<CMat> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch("expm of a non-square matrix".into()));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("expm of a matrix with non-finite entries".into()));
    }
    let norm1 = a.opnorm_one()?;
    let (scaled, squarings, order): (CMat, usize, usize) = if norm1 <= THETA_3 {
        (a.clone(), 0, 3)
    } else if norm1 <= THETA_5 {
        (a.clone(), 0, 5)
    } else if norm1 <= THETA_7 {
        (a.clone(), 0, 7)
    } else if norm1 <= THETA_9 {
        (a.clone(), 0, 9)
    } else {
        let s = ((norm1 / THETA_13).log2().ceil()).max(0.0) as usize;
        let factor = C64::new(0.5f64.powi(s as i32), 0.0);
        (a.mapv(|z| z * factor), s, 13)
    };

    let (u, v) = match order {
        3 => pade_uv(&scaled, &PADE_3),
        5 => pade_uv(&scaled, &PADE_5),
        7 => pade_uv(&scaled, &PADE_7),
        9 => pade_uv(&scaled, &PADE_9),
        _ => pade13_uv(&scaled),
    };

    // (V - U) F = (V + U)
    let lhs = &v - &u;
    let rhs = &v + &u;
    let lu = lhs.factorize()?;
    let n = a.nrows();
    let mut f = CMat::zeros((n, n));
    for j in 0..n {
        let col = lu.solve(&rhs.column(j).to_owned())?;
        f.column_mut(j).assign(&col);
    }
    for _ in 0..squarings {
        f = f.dot(&f);
    }
    Ok(f)
}

/// Hermitian conjugation sandwich `e^{-i t H} X e^{i t H}` via the
/// eigendecomposition of `H`; used by tests as an independent route.
#[allow(dead_code)]
pub fn conjugate_by_unitary(h: &CMat, x: &CMat, t: f64) -> Result<CMat> {
    let (w, u) = crate::linalg::eigh_hermitian(h)?;
    let ud = dagger(&u);
    let xt = ud.dot(x).dot(&u);
    let d = h.nrows();
    let phased = CMat::from_shape_fn((d, d), |(i, j)| {
        xt[(i, j)] * (Complex64::new(0.0, -(w[i] - w[j]) * t)).exp()
    });
    Ok(u.dot(&phased).dot(&ud))
}

// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Sylvester-equation solvers for `A X + X B = C`.
//!
//! Two independent routes are kept on purpose: the `direct` route reduces
//! along the (small) right coefficient and back-substitutes shifted linear
//! systems, while the `quadrature` route evaluates the stable integral
//! representation `X = -∫_0^∞ e^{tA} C e^{tB} dt`. Agreement between the two
//! is used as a cross-check throughout the test suite.

use ndarray_linalg::solve::LUFactorized;
use ndarray_linalg::{Eig, EigVals, Factorize, Solve, SVD};
use ndarray::OwnedRepr;

use crate::error::{Error, Result};
use crate::linalg::{fro_norm, CMat, CVec, RectangularMap, Superoperator, C64, ZERO};
use crate::quad::{integrate_adaptive, QuadratureConfig};

/// Relative spectral-gap threshold below which the system counts as singular.
pub const DISJOINT_SPECTRA_THRESHOLD: f64 = 1e-10;

/// Residual contract of the direct solver, relative to `||C||_F`.
pub const DIRECT_RESIDUAL_BOUND: f64 = 1e-10;

fn check_dims(a: &Superoperator, b: &Superoperator, c: &RectangularMap) -> Result<()> {
    if c.mat.nrows() != a.mat.nrows() || c.mat.ncols() != b.mat.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "Sylvester shapes: A {:?}, B {:?}, C {:?}",
            a.mat.dim(),
            b.mat.dim(),
            c.mat.dim()
        )));
    }
    Ok(())
}

fn spectral_scale(eig_a: &CVec, eig_b: &CVec) -> f64 {
    let ma = eig_a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mb = eig_b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (ma + mb).max(1e-300)
}

/// Solve `A X + X B = C` by eigendecomposing `B` and back-substituting the
/// shifted systems `(A + mu_j I) x = c_j`. Requires the spectra of `A` and
/// `-B` to be disjoint; the residual is refined once and verified against
/// [`DIRECT_RESIDUAL_BOUND`].
pub fn solve_sylvester_direct(
    a: &Superoperator,
    b: &Superoperator,
    c: &RectangularMap,
) -> Result<RectangularMap> {
    check_dims(a, b, c)?;
    let eig_a = a.mat.eigvals()?;
    let (eig_b, vb) = b.mat.eig()?;
    let scale = spectral_scale(&eig_a, &eig_b);
    let threshold = DISJOINT_SPECTRA_THRESHOLD * scale;
    for la in eig_a.iter() {
        for mb in eig_b.iter() {
            let gap = (la + mb).norm();
            if gap < threshold {
                return Err(Error::SingularSylvester {
                    lhs: *la,
                    rhs: -*mb,
                    gap,
                    threshold,
                });
            }
        }
    }

    let vb_inv = invert_small(&vb)?;
    let c_tilde = c.mat.dot(&vb);
    let n = a.mat.nrows();
    let m = b.mat.nrows();
    let mut x_tilde = CMat::zeros((n, m));
    // group equal shifts so each LU factorization is reused
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        (eig_b[i].re, eig_b[i].im)
            .partial_cmp(&(eig_b[j].re, eig_b[j].im))
            .unwrap()
    });
    let cluster_tol = 1e-12 * scale;
    let mut k = 0;
    while k < m {
        let mut group = vec![order[k]];
        while k + 1 < m && (eig_b[order[k + 1]] - eig_b[order[k]]).norm() <= cluster_tol {
            k += 1;
            group.push(order[k]);
        }
        k += 1;
        let shift = eig_b[group[0]];
        let mut shifted = a.mat.clone();
        for i in 0..n {
            shifted[(i, i)] += shift;
        }
        let lu = shifted.factorize()?;
        for &j in &group {
            let rhs = c_tilde.column(j).to_owned();
            let mut x = lu.solve(&rhs)?;
            // one refinement sweep
            let r = &rhs - &shifted.dot(&x);
            let dx = lu.solve(&r)?;
            x += &dx;
            x_tilde.column_mut(j).assign(&x);
        }
    }
    let x = x_tilde.dot(&vb_inv);

    let resid = fro_norm(&(a.mat.dot(&x) + x.dot(&b.mat) - &c.mat));
    let c_norm = fro_norm(&c.mat).max(1e-300);
    if resid > DIRECT_RESIDUAL_BOUND * c_norm {
        return Err(Error::Numerical(format!(
            "direct Sylvester residual {resid:.3e} exceeds {:.3e}",
            DIRECT_RESIDUAL_BOUND * c_norm
        )));
    }
    RectangularMap::new(c.out_dim, c.in_dim, x)
}

/// Solve `A X + X B = C` through the integral representation
/// `X = -∫_0^∞ e^{tA} C e^{tB} dt`, truncated at `decay_folds` e-folds of the
/// slowest decaying mode and evaluated with adaptive Gauss-Legendre panels.
///
/// Non-decaying directions (the kernel of the joint flow) are projected out;
/// if `C` carries weight on them the integral diverges and an error is
/// returned.
pub fn solve_sylvester_quadrature(
    a: &Superoperator,
    b: &Superoperator,
    c: &RectangularMap,
    q: &QuadratureConfig,
) -> Result<RectangularMap> {
    check_dims(a, b, c)?;
    q.validate()?;
    let (eig_a, va) = a.mat.eig()?;
    let (eig_b, vb) = b.mat.eig()?;

    let (_, sv, _) = va.svd(false, false)?;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= 0.0 || smax / smin > 1e10 {
        return Err(Error::Numerical(
            "eigenvector matrix of A too ill-conditioned for the quadrature route; use the direct solver".into(),
        ));
    }

    let va_lu = va.factorize()?;
    let n = a.mat.nrows();
    let m = b.mat.nrows();
    let mut c_modal = CMat::zeros((n, m));
    {
        let cv = c.mat.dot(&vb);
        for j in 0..m {
            let col = va_lu.solve(&cv.column(j).to_owned())?;
            c_modal.column_mut(j).assign(&col);
        }
    }

    let scale = spectral_scale(&eig_a, &eig_b);
    let eta = 1e-9 * scale;
    let c_norm = fro_norm(&c_modal).max(1e-300);
    let mut mu = f64::INFINITY;
    let mut any_decaying = false;
    for i in 0..n {
        for j in 0..m {
            let re = eig_a[i].re + eig_b[j].re;
            if re < -eta {
                any_decaying = true;
                if c_modal[(i, j)].norm() > 1e-14 * c_norm {
                    mu = mu.min(-re);
                }
            } else {
                // non-decaying pair: C must not point along it
                if c_modal[(i, j)].norm() > 1e-8 * c_norm {
                    return Err(Error::DivergentIntegral(format!(
                        "inhomogeneity has weight {:.3e} on a non-decaying mode pair (Re(lambda+mu) = {re:.3e})",
                        c_modal[(i, j)].norm()
                    )));
                }
                c_modal[(i, j)] = ZERO;
            }
        }
    }
    if !any_decaying {
        return Err(Error::DivergentIntegral(
            "no decaying direction detected in the joint flow".into(),
        ));
    }
    if !mu.is_finite() {
        // C vanished on every decaying pair: the solution is zero
        return RectangularMap::new(c.out_dim, c.in_dim, CMat::zeros((n, m)));
    }

    let horizon = q.decay_folds / mu;
    let init = (q.decay_folds.ceil() as usize).clamp(8, q.max_panels / 2);
    let exps_a: Vec<C64> = eig_a.to_vec();
    let exps_b: Vec<C64> = eig_b.to_vec();
    let integrand = |t: f64| -> CMat {
        let ea: Vec<C64> = exps_a.iter().map(|l| (l * t).exp()).collect();
        let eb: Vec<C64> = exps_b.iter().map(|l| (l * t).exp()).collect();
        CMat::from_shape_fn((n, m), |(i, j)| c_modal[(i, j)] * ea[i] * eb[j])
    };
    // natural scale of the integral: inhomogeneity over the decay rate
    let floor = c_norm / mu;
    let (s_modal, err, panels) =
        integrate_adaptive(integrand, 0.0, horizon, q.tol, q.max_panels, init, floor)?;
    let accept = 100.0 * q.tol * fro_norm(&s_modal).max(floor);
    if err > accept {
        return Err(Error::Numerical(format!(
            "quadrature residual {err:.3e} exceeds {accept:.3e} after {panels} panels; raise max_panels or use the direct solver"
        )));
    }

    let vb_inv = invert_small(&vb)?;
    let x = va.dot(&s_modal).dot(&vb_inv).mapv(|z| -z);
    RectangularMap::new(c.out_dim, c.in_dim, x)
}

fn invert_small(m: &CMat) -> Result<CMat> {
    let lu = m.factorize()?;
    let n = m.nrows();
    let mut inv = CMat::zeros((n, n));
    let mut e = CVec::zeros(n);
    for j in 0..n {
        e.fill(ZERO);
        e[j] = C64::new(1.0, 0.0);
        let col = lu.solve(&e)?;
        inv.column_mut(j).assign(&col);
    }
    Ok(inv)
}

/// One deflated shift of a shifted-system family: `(A + shift I) x = rhs`
/// subject to `<gauge_i, x> = 0`, with `kernel_i` spanning the null space of
/// the shifted matrix. The bordered system
///
/// ```text
/// [ A + shift I   K ] [x]   [rhs]
/// [ G             0 ] [y] = [ 0 ]
/// ```
///
/// is square and nonsingular when `G K` is; `y` returns the component of the
/// right-hand side outside the range and should be at round-off level for
/// consistent systems.
pub struct DeflatedShift {
    pub shift: C64,
    pub kernel: Vec<CVec>,
    pub gauge: Vec<CVec>,
}

pub struct ShiftedDeflatedSolver {
    dim: usize,
    shifts: Vec<C64>,
    bordered: Vec<(CMat, LUFactorized<OwnedRepr<C64>>, usize)>,
}

impl ShiftedDeflatedSolver {
    pub fn new(a: &CMat, shifts: Vec<DeflatedShift>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch("deflated solver needs a square matrix".into()));
        }
        let mut bordered = Vec::with_capacity(shifts.len());
        let mut shift_vals = Vec::with_capacity(shifts.len());
        for s in &shifts {
            if s.kernel.len() != s.gauge.len() {
                return Err(Error::InvalidArgument(
                    "deflation needs matching kernel and gauge basis sizes".into(),
                ));
            }
            let r = s.kernel.len();
            let mut m = CMat::zeros((n + r, n + r));
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = a[(i, j)];
                }
                m[(i, i)] += s.shift;
            }
            for (t, k) in s.kernel.iter().enumerate() {
                for i in 0..n {
                    m[(i, n + t)] = k[i];
                }
            }
            for (t, g) in s.gauge.iter().enumerate() {
                for j in 0..n {
                    m[(n + t, j)] = g[j].conj();
                }
            }
            let lu = m.factorize()?;
            bordered.push((m, lu, r));
            shift_vals.push(s.shift);
        }
        Ok(ShiftedDeflatedSolver { dim: n, shifts: shift_vals, bordered })
    }

    pub fn shift(&self, idx: usize) -> C64 {
        self.shifts[idx]
    }

    /// Solve the `idx`-th shifted system. Returns the gauge-fixed solution and
    /// the norm of the out-of-range defect `y`.
    pub fn solve(&self, idx: usize, rhs: &CVec) -> Result<(CVec, f64)> {
        let (m, lu, r) = &self.bordered[idx];
        let n = self.dim;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch("deflated solve: rhs length".into()));
        }
        let mut aug = CVec::zeros(n + r);
        for i in 0..n {
            aug[i] = rhs[i];
        }
        let mut sol = lu.solve(&aug)?;
        // one refinement sweep
        let resid = &aug - &m.dot(&sol);
        let corr = lu.solve(&resid)?;
        sol += &corr;
        let x = sol.slice(ndarray::s![..n]).to_owned();
        let defect = sol
            .slice(ndarray::s![n..])
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        Ok((x, defect))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, Operator};
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_cmat(rng: &mut impl Rng, n: usize) -> CMat {
        CMat::from_shape_fn((n, n), |_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
    }

    fn sop(mat: CMat) -> Superoperator {
        // tests here only need the raw matrix; side is immaterial for 1x1
        let d2 = mat.nrows();
        let d = (d2 as f64).sqrt().round() as usize;
        assert_eq!(d * d, d2, "test superoperators must have square side");
        Superoperator { dim: d, mat }
    }

    fn rect(out_dim: usize, in_dim: usize, mat: CMat) -> RectangularMap {
        RectangularMap { out_dim, in_dim, mat }
    }

    #[test]
    fn scalar_case() {
        let a = sop(ndarray::array![[C64::new(2.0, 0.0)]]);
        let b = sop(ndarray::array![[C64::new(3.0, 0.0)]]);
        let c = rect(1, 1, ndarray::array![[C64::new(10.0, 0.0)]]);
        let x = solve_sylvester_direct(&a, &b, &c).unwrap();
        assert_abs_diff_eq!(x.mat[(0, 0)].re, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn negated_identity_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 4;
        let a = sop(CMat::eye(n).mapv(|z| -z));
        let b = sop(CMat::eye(n).mapv(|z| -z));
        let c = rect(2, 2, random_cmat(&mut rng, n));
        let x = solve_sylvester_direct(&a, &b, &c).unwrap();
        let expect = c.mat.mapv(|z| -z * 0.5);
        assert_abs_diff_eq!(fro_norm(&(&x.mat - &expect)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn random_stable_instance_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..5 {
            // stable A: shifted anti-Hermitian plus negative diagonal
            let n = 9;
            let g = random_cmat(&mut rng, n);
            let mut a = &g - &dagger(&g);
            for i in 0..n {
                a[(i, i)] += C64::new(-1.0 - rng.gen::<f64>(), 0.0);
            }
            // anti-Hermitian B
            let h = random_cmat(&mut rng, 4);
            let b = (&h - &dagger(&h)).mapv(|z| z * 0.5);
            let c = CMat::from_shape_fn((n, 4), |_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            let a = sop(a);
            let b = sop(b);
            let c = rect(3, 2, c);
            let x = solve_sylvester_direct(&a, &b, &c).unwrap();
            let resid = fro_norm(&(a.mat.dot(&x.mat) + x.mat.dot(&b.mat) - &c.mat));
            assert!(resid <= 1e-10 * fro_norm(&c.mat));
        }
    }

    #[test]
    fn singular_pair_is_named() {
        let a = sop(ndarray::array![[C64::new(1.0, 0.0)]]);
        let b = sop(ndarray::array![[C64::new(-1.0, 0.0)]]);
        let c = rect(1, 1, ndarray::array![[C64::new(1.0, 0.0)]]);
        match solve_sylvester_direct(&a, &b, &c) {
            Err(Error::SingularSylvester { lhs, rhs, .. }) => {
                assert_abs_diff_eq!(lhs.re, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(rhs.re, 1.0, epsilon = 1e-12);
            }
            other => panic!("expected singularity error, got {other:?}"),
        }
    }

    #[test]
    fn quadrature_scalar_decay() {
        // a x + x b = c with a = -1, b = 0, c = 2: x = c/(a+b) = -2, reached
        // through -int_0^inf e^{-t} c dt with int_0^inf e^{-t} dt = 1
        let a = sop(ndarray::array![[C64::new(-1.0, 0.0)]]);
        let b = sop(ndarray::array![[ZERO]]);
        let c = rect(1, 1, ndarray::array![[C64::new(2.0, 0.0)]]);
        let q = QuadratureConfig::default();
        let x = solve_sylvester_quadrature(&a, &b, &c, &q).unwrap();
        assert_abs_diff_eq!(x.mat[(0, 0)].re, -2.0, epsilon = 1e-8);
        let xd = solve_sylvester_direct(&a, &b, &c).unwrap();
        assert_abs_diff_eq!(xd.mat[(0, 0)].re, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn quadrature_zero_inhomogeneity() {
        let a = sop(ndarray::array![[C64::new(-1.0, 0.0)]]);
        let b = sop(ndarray::array![[ZERO]]);
        let c = rect(1, 1, ndarray::array![[ZERO]]);
        let x = solve_sylvester_quadrature(&a, &b, &c, &QuadratureConfig::default()).unwrap();
        assert_eq!(x.mat[(0, 0)], ZERO);
    }

    #[test]
    fn quadrature_agrees_with_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 9;
        let g = random_cmat(&mut rng, n);
        let mut a = &g - &dagger(&g);
        for i in 0..n {
            a[(i, i)] += C64::new(-0.5 - rng.gen::<f64>(), 0.0);
        }
        let h = random_cmat(&mut rng, 4);
        let b = (&h - &dagger(&h)).mapv(|z| z * 0.5);
        let c = CMat::from_shape_fn((n, 4), |_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let a = sop(a);
        let b = sop(b);
        let c = rect(3, 2, c);
        let xd = solve_sylvester_direct(&a, &b, &c).unwrap();
        let q = QuadratureConfig { tol: 1e-10, ..Default::default() };
        let xq = solve_sylvester_quadrature(&a, &b, &c, &q).unwrap();
        let rel = fro_norm(&(&xd.mat - &xq.mat)) / fro_norm(&xd.mat);
        assert!(rel <= 1e-8, "cross-solver relative gap {rel:.3e}");
    }

    #[test]
    fn quadrature_divergent_when_no_decay() {
        let a = sop(ndarray::array![[C64::new(0.0, 1.0)]]);
        let b = sop(ndarray::array![[ZERO]]);
        let c = rect(1, 1, ndarray::array![[C64::new(1.0, 0.0)]]);
        assert!(matches!(
            solve_sylvester_quadrature(&a, &b, &c, &QuadratureConfig::default()),
            Err(Error::DivergentIntegral(_))
        ));
    }

    #[test]
    fn deflated_solver_fixes_gauge() {
        // A = diag(-1, 0): kernel e2 at shift 0; gauge row e2
        let a = ndarray::array![
            [C64::new(-1.0, 0.0), ZERO],
            [ZERO, ZERO]
        ];
        let mut kernel = CVec::zeros(2);
        kernel[1] = C64::new(1.0, 0.0);
        let solver = ShiftedDeflatedSolver::new(
            &a,
            vec![DeflatedShift { shift: ZERO, kernel: vec![kernel.clone()], gauge: vec![kernel] }],
        )
        .unwrap();
        // rhs in range: (-1, 0)
        let mut rhs = CVec::zeros(2);
        rhs[0] = C64::new(-1.0, 0.0);
        let (x, defect) = solver.solve(0, &rhs).unwrap();
        assert_abs_diff_eq!(x[0].re, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(x[1].norm(), 0.0, epsilon = 1e-13);
        assert!(defect < 1e-13);
    }
}

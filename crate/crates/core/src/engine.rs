// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Order-by-order adiabatic elimination: reduced generators on the retained
//! subsystem and the invariant-manifold correction maps, in the partial-trace
//! gauge `Tr_B K_n = 0` for `n >= 1`.
//!
//! All quantities carry their `g^n` weights explicitly; the dimensionless
//! ratio `g / kappa_ref` is reported only as a diagnostic.

use ndarray::prelude::*;
use ndarray_linalg::{Eig, Factorize, Solve};

use crate::error::{Error, Result};
use crate::linalg::{
    commutator_sop, dagger, fro_norm, kron, left_mult, partial_trace_b_map, right_mult,
    vectorize, CMat, CVec, DeflatedShift, Operator, Propagator, RectangularMap,
    ShiftedDeflatedSolver, Superoperator, C64, ONE, ZERO,
};
use crate::model::{adjoint_lindbladian, lindbladian, steady_state, BipartiteModel};
use crate::quad::{integrate_adaptive, QuadratureConfig};

/// Solver route for the order-n correction maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SylvesterMethod {
    /// Shifted, gauge-deflated LU solves in the eigenbasis of `H_A`.
    Direct,
    /// Stable integral representation evaluated by panel quadrature.
    Quadrature,
}

impl SylvesterMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            SylvesterMethod::Direct => "direct",
            SylvesterMethod::Quadrature => "quadrature",
        }
    }
}

/// Route for the second-order reduced generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ls2Method {
    /// Scalar correlation integrals against the Heisenberg-picture flow.
    AdjointQuadrature,
    /// Partial trace of the interaction commutator with the first-order map.
    FromK1(SylvesterMethod),
}

/// Orders are capped here: dense solves on the joint space grow too fast
/// beyond desk scale.
pub const MAX_ORDER: usize = 6;

/// One term of the reduced expansion.
#[derive(Debug, Clone)]
pub struct ReducedOrder {
    pub order: usize,
    /// Generator contribution on the A space, `g^n` included.
    pub generator: Superoperator,
    /// Correction map from A-operators to joint operators, `g^n` included.
    pub correction: RectangularMap,
    /// Which Sylvester path produced the correction.
    pub method: &'static str,
    /// Relative residual of the order-n invariance condition.
    pub invariance_residual: f64,
    /// `||Tr_B K_n||_F` (for n = 0: deviation of `Tr_B K_0` from identity).
    pub gauge_residual: f64,
}

/// Reduced model: per-order generators and corrections plus diagnostics.
#[derive(Debug, Clone)]
pub struct ReducedModel {
    pub model: BipartiteModel,
    pub rho_bar: Operator,
    /// Diagnostic timescale ratio `g / kappa_ref`.
    pub epsilon: f64,
    pub orders: Vec<ReducedOrder>,
    pub warnings: Vec<String>,
}

impl ReducedModel {
    /// Sum of the generator contributions up to and including `order`.
    pub fn generator_up_to(&self, order: usize) -> Superoperator {
        let mut acc = Superoperator::zeros(self.model.dim_a);
        for o in self.orders.iter().take(order + 1) {
            acc = acc.add(&o.generator);
        }
        acc
    }

    /// Sum of the correction maps up to and including `order`.
    pub fn correction_up_to(&self, order: usize) -> RectangularMap {
        let mut acc = RectangularMap::zeros(self.model.joint_dim(), self.model.dim_a);
        for o in self.orders.iter().take(order + 1) {
            acc.mat += &o.correction.mat;
        }
        acc
    }

    pub fn max_order(&self) -> usize {
        self.orders.len().saturating_sub(1)
    }
}

/// `B_k - Tr(B_k rho_bar) I`, so that `Tr(result * rho_bar) = 0`.
pub fn centered_coupling(b_k: &Operator, rho_bar: &Operator) -> Operator {
    let mean = b_k.matmul(rho_bar).trace();
    let mut m = b_k.mat.clone();
    for i in 0..b_k.dim {
        m[(i, i)] -= mean;
    }
    Operator { dim: b_k.dim, mat: m }
}

/// `A^-(t) = e^{-i t H_A} A e^{i t H_A}`, via the eigendecomposition of
/// `H_A`. Unitary similarity preserves the singular values of `A`.
pub fn a_minus(a_k: &Operator, h_a: &Operator, t: f64) -> Result<Operator> {
    if !h_a.is_hermitian(1e-12) {
        return Err(Error::InvalidArgument("a_minus requires a Hermitian H_A".into()));
    }
    let (w, u) = crate::linalg::eigh_hermitian(&h_a.mat)?;
    let ud = dagger(&u);
    let tilde = ud.dot(&a_k.mat).dot(&u);
    let d = h_a.dim;
    let phased = CMat::from_shape_fn((d, d), |(i, j)| {
        tilde[(i, j)] * C64::new(0.0, -(w[i] - w[j]) * t).exp()
    });
    Ok(Operator { dim: d, mat: u.dot(&phased).dot(&ud) })
}

/// Heisenberg-picture flow `B(t) = e^{t L_B^*}(B)`.
pub fn b_heisenberg(b_k: &Operator, spec_b: &crate::model::LindbladSpec, t: f64) -> Result<Operator> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("b_heisenberg requires t >= 0, got {t}")));
    }
    let adj = adjoint_lindbladian(spec_b);
    let prop = Propagator::new(&adj.mat)?;
    let v = prop.apply(t, &vectorize(&b_k.mat))?;
    Ok(Operator { dim: b_k.dim, mat: crate::linalg::unvectorize(&v, b_k.dim)? })
}

/// Correlation matrices
/// `c_{k,l}(t) = Tr(B_l(t) B_{0,k} rho_bar)` and
/// `c~_{k,l}(t) = Tr(B_l(t) rho_bar B_{0,k})`, computed via the
/// Heisenberg-picture flow of the partner operator.
pub fn correlation_coeffs(model: &BipartiteModel, t: f64) -> Result<(CMat, CMat)> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("correlation time must be >= 0, got {t}")));
    }
    let rho_bar = steady_state(&lindbladian(&model.spec_b))?;
    let nk = model.couplings.len();
    let mut c = CMat::zeros((nk, nk));
    let mut c_tilde = CMat::zeros((nk, nk));
    let adj = adjoint_lindbladian(&model.spec_b);
    let prop = Propagator::new(&adj.mat)?;
    for (l, (_, b_l)) in model.couplings.iter().enumerate() {
        let v = prop.apply(t, &vectorize(&b_l.mat))?;
        let b_l_t = crate::linalg::unvectorize(&v, model.dim_b)?;
        for (k, (_, b_k)) in model.couplings.iter().enumerate() {
            let b0k = centered_coupling(b_k, &rho_bar);
            c[(k, l)] = b_l_t.dot(&b0k.mat).dot(&rho_bar.mat).diag().sum();
            c_tilde[(k, l)] = b_l_t.dot(&rho_bar.mat).dot(&b0k.mat).diag().sum();
        }
    }
    Ok((c, c_tilde))
}

/// Embedding map `rho_s -> rho_s (x) rho_bar` as a matrix.
pub fn embedding_map(rho_bar: &Operator, dim_a: usize) -> RectangularMap {
    let db = rho_bar.dim;
    let d = dim_a * db;
    let mut m = CMat::zeros((d * d, dim_a * dim_a));
    for col_a in 0..dim_a {
        for row_a in 0..dim_a {
            let mut unit = CMat::zeros((dim_a, dim_a));
            unit[(row_a, col_a)] = ONE;
            let emb = kron(&unit, &rho_bar.mat);
            m.column_mut(col_a * dim_a + row_a).assign(&vectorize(&emb));
        }
    }
    RectangularMap { out_dim: d, in_dim: dim_a, mat: m }
}

/// Order zero of the expansion: free rotation on A and the product embedding.
pub fn order0(model: &BipartiteModel) -> Result<(Superoperator, RectangularMap, Operator)> {
    let rho_bar = steady_state(&lindbladian(&model.spec_b))?;
    let gen = Superoperator {
        dim: model.dim_a,
        mat: commutator_sop(&model.h_a.mat).mapv(|z| z * C64::new(0.0, -1.0)),
    };
    let corr = embedding_map(&rho_bar, model.dim_a);
    Ok((gen, corr, rho_bar))
}

/// First-order reduced generator
/// `rho_s -> -i g sum_k Tr(B_k rho_bar) [A_k, rho_s]`.
pub fn ls1(model: &BipartiteModel, rho_bar: &Operator) -> Superoperator {
    let mut m = CMat::zeros((model.dim_a * model.dim_a, model.dim_a * model.dim_a));
    for (a_k, b_k) in &model.couplings {
        let mean = b_k.matmul(rho_bar).trace();
        m.scaled_add(C64::new(0.0, -model.g) * mean, &commutator_sop(&a_k.mat));
    }
    Superoperator { dim: model.dim_a, mat: m }
}

/// First-order correction map by the selected Sylvester route.
pub fn k1(
    model: &BipartiteModel,
    method: SylvesterMethod,
    q: &QuadratureConfig,
) -> Result<RectangularMap> {
    let reduced = reduce(model, 1, method, q)?;
    Ok(reduced.orders[1].correction.clone())
}

/// Second-order reduced generator.
pub fn ls2(model: &BipartiteModel, method: Ls2Method, q: &QuadratureConfig) -> Result<Superoperator> {
    match method {
        Ls2Method::FromK1(sylvester) => {
            let reduced = reduce(model, 2, sylvester, q)?;
            Ok(reduced.orders[2].generator.clone())
        }
        Ls2Method::AdjointQuadrature => ls2_adjoint_quadrature(model, q),
    }
}

/// Full expansion to `max_order`.
pub fn reduce(
    model: &BipartiteModel,
    max_order: usize,
    method: SylvesterMethod,
    q: &QuadratureConfig,
) -> Result<ReducedModel> {
    if max_order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "expansion order {max_order} exceeds the cost cap {MAX_ORDER}"
        )));
    }
    q.validate()?;
    let (gen0, corr0, rho_bar) = order0(model)?;
    let mut warnings = Vec::new();
    if let Some(w) = model.fock_adequacy_warning(&rho_bar) {
        warnings.push(w);
    }

    let d_a = model.dim_a;
    let d2 = d_a * d_a;
    let joint = model.joint_dim();
    let ptrace = partial_trace_b_map(d_a, model.dim_b);
    let gauge0 = {
        let diff = &ptrace.mat.dot(&corr0.mat) - &CMat::eye(d2);
        fro_norm(&diff)
    };
    let mut orders = vec![ReducedOrder {
        order: 0,
        generator: gen0,
        correction: corr0,
        method: "order0",
        invariance_residual: 0.0,
        gauge_residual: gauge0,
    }];

    if max_order >= 1 {
        let solver: Box<dyn OrderSolver> = match method {
            SylvesterMethod::Direct => Box::new(DirectOrderSolver::new(model, &rho_bar)?),
            SylvesterMethod::Quadrature => Box::new(QuadOrderSolver::new(model, q.clone())?),
        };
        // interaction commutator with the coupling strength absorbed
        let hi = model.interaction_hamiltonian();
        let l_int =
            (left_mult(&hi.mat) - right_mult(&hi.mat)).mapv(|z| z * C64::new(0.0, -model.g));
        let a_free = model.free_generator();
        let b_syl = commutator_sop(&model.h_a.mat).mapv(|z| z * C64::new(0.0, 1.0));
        // left multiplication by I (x) B_k on the joint space, per coupling
        let lift_b: Vec<CMat> = model
            .couplings
            .iter()
            .map(|(_, b)| left_mult(&kron(&CMat::eye(d_a), &b.mat)))
            .collect();

        for n in 1..=max_order {
            let prev = &orders[n - 1].correction;
            // generator at order n from the correction at order n-1
            let mut gen_n = CMat::zeros((d2, d2));
            for ((a_k, _), lift) in model.couplings.iter().zip(&lift_b) {
                let traced = ptrace.mat.dot(&lift.dot(&prev.mat));
                gen_n = gen_n
                    + commutator_sop(&a_k.mat)
                        .dot(&traced)
                        .mapv(|z| z * C64::new(0.0, -model.g));
            }
            // inhomogeneity of the order-n condition
            let mut c_n = orders[0].correction.mat.dot(&gen_n);
            for m in 1..n {
                c_n = c_n + orders[m].correction.mat.dot(&orders[n - m].generator.mat);
            }
            c_n = c_n - l_int.dot(&prev.mat);

            let corr_n = solver.solve(&c_n)?;

            let c_scale = fro_norm(&c_n);
            let resid = if c_scale > 0.0 {
                let r = a_free.mat.dot(&corr_n) + corr_n.dot(&b_syl) - &c_n;
                fro_norm(&r) / c_scale
            } else {
                0.0
            };
            let gauge = fro_norm(&ptrace.mat.dot(&corr_n));
            orders.push(ReducedOrder {
                order: n,
                generator: Superoperator { dim: d_a, mat: gen_n },
                correction: RectangularMap { out_dim: joint, in_dim: d_a, mat: corr_n },
                method: method.tag(),
                invariance_residual: resid,
                gauge_residual: gauge,
            });
        }
    }

    Ok(ReducedModel {
        model: model.clone(),
        rho_bar,
        epsilon: model.epsilon(),
        orders,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// order-n Sylvester solvers
// ---------------------------------------------------------------------------

trait OrderSolver {
    /// Solve `A_free X + X (i H_A^x) = C` in the partial-trace gauge.
    fn solve(&self, c: &CMat) -> Result<CMat>;
}

/// Bohr-frequency clusters of `H_A`: members are vec-indices `I = m*d + n`
/// (the matrix unit `|n><m|`), all sharing the frequency `w_n - w_m` within
/// the cluster tolerance.
fn bohr_clusters(w: &Array1<f64>) -> Vec<(f64, Vec<usize>)> {
    let d = w.len();
    let scale = w.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1.0);
    let tol = 1e-9 * scale;
    let mut items: Vec<(f64, usize)> = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            items.push((w[n] - w[m], m * d + n));
        }
    }
    items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
    for (nu, idx) in items {
        match clusters.last_mut() {
            Some((v, members)) if (nu - *v).abs() <= tol => members.push(idx),
            _ => clusters.push((nu, vec![idx])),
        }
    }
    clusters
}

/// Direct route: solve column-by-column in the eigenbasis of `H_A`, where the
/// right coefficient is diagonal with the Bohr frequencies. Each shifted
/// system is bordered with the known kernel (slow eigenoperators embedded
/// with `rho_bar`) and the partial-trace gauge rows, which both fixes the
/// gauge and removes the center-manifold singularity.
struct DirectOrderSolver {
    dim_a: usize,
    joint: usize,
    /// eigenbasis transform on A: `H_A = U diag(w) U^†`
    u: CMat,
    solver: ShiftedDeflatedSolver,
    /// cluster index for every vec-column of the A operator space
    column_cluster: Vec<usize>,
    /// `vec_A` change of basis, original -> eigen and back
    t_a: CMat,
    t_a_inv: CMat,
}

impl DirectOrderSolver {
    fn new(model: &BipartiteModel, rho_bar: &Operator) -> Result<Self> {
        let d_a = model.dim_a;
        let d_b = model.dim_b;
        let joint = model.joint_dim();
        let (w, u) = crate::linalg::eigh_hermitian(&model.h_a.mat)?;
        let ud = dagger(&u);

        // free generator with H_A diagonalized; B side untouched
        let h_eig = {
            let mut h = CMat::zeros((joint, joint));
            let diag_a = CMat::from_shape_fn((d_a, d_a), |(i, j)| {
                if i == j {
                    C64::new(w[i], 0.0)
                } else {
                    ZERO
                }
            });
            h += &kron(&diag_a, &CMat::eye(d_b));
            h += &kron(&CMat::eye(d_a), &model.spec_b.h.mat);
            h
        };
        let channels: Vec<(f64, Operator)> = model
            .spec_b
            .channels
            .iter()
            .map(|c| {
                (
                    c.rate,
                    Operator { dim: joint, mat: kron(&CMat::eye(d_a), &c.jump.mat) },
                )
            })
            .collect();
        let spec = crate::model::LindbladSpec::new(Operator { dim: joint, mat: h_eig }, channels)?;
        let a_free_eig = lindbladian(&spec);

        let clusters = bohr_clusters(&w);
        let mut column_cluster = vec![0usize; d_a * d_a];
        let mut shifts = Vec::with_capacity(clusters.len());
        for (ci, (nu, members)) in clusters.iter().enumerate() {
            let mut kernel = Vec::with_capacity(members.len());
            let mut gauge = Vec::with_capacity(members.len());
            for &idx in members {
                column_cluster[idx] = ci;
                let (n, m) = (idx % d_a, idx / d_a);
                let mut unit = CMat::zeros((d_a, d_a));
                unit[(n, m)] = ONE;
                kernel.push(vectorize(&kron(&unit, &rho_bar.mat)));
                gauge.push(vectorize(&kron(&unit, &CMat::eye(d_b))));
            }
            shifts.push(DeflatedShift { shift: C64::new(0.0, *nu), kernel, gauge });
        }
        let solver = ShiftedDeflatedSolver::new(&a_free_eig.mat, shifts)?;

        // vec_A basis change: vec(U^† X U) = (U^T (x) U^†) vec(X)
        let t_a = kron(&u.t().to_owned(), &ud);
        let t_a_inv = kron(&u.mapv(|z| z.conj()), &u);
        Ok(DirectOrderSolver { dim_a: d_a, joint, u, solver, column_cluster, t_a, t_a_inv })
    }

    /// Conjugate every joint-space column by `U (x) I` (direction per flag).
    fn conjugate_columns(&self, m: &CMat, to_eigen: bool) -> Result<CMat> {
        let d_b = self.joint / self.dim_a;
        let uj = kron(&self.u, &CMat::eye(d_b));
        let ujd = dagger(&uj);
        let (l, r): (&CMat, &CMat) = if to_eigen { (&ujd, &uj) } else { (&uj, &ujd) };
        let mut out = CMat::zeros(m.raw_dim());
        for j in 0..m.ncols() {
            let x = crate::linalg::unvectorize(&m.column(j).to_owned(), self.joint)?;
            let y = l.dot(&x).dot(r);
            out.column_mut(j).assign(&vectorize(&y));
        }
        Ok(out)
    }
}

impl OrderSolver for DirectOrderSolver {
    fn solve(&self, c: &CMat) -> Result<CMat> {
        // into the eigenbasis: columns mix on the A side, then each joint
        // column is conjugated
        let c_cols = c.dot(&self.t_a_inv);
        let c_eig = self.conjugate_columns(&c_cols, true)?;
        let mut x_eig = CMat::zeros(c_eig.raw_dim());
        for j in 0..c_eig.ncols() {
            let rhs = c_eig.column(j).to_owned();
            let (x, _defect) = self.solver.solve(self.column_cluster[j], &rhs)?;
            x_eig.column_mut(j).assign(&x);
        }
        let x_cols = self.conjugate_columns(&x_eig, false)?;
        Ok(x_cols.dot(&self.t_a))
    }
}

/// Quadrature route: `X = -∫_0^∞ e^{t A_free} C e^{i t H_A^x} dt` evaluated in
/// the modal basis of the free generator, with the center manifold projected
/// out (the inhomogeneity carries no weight there by construction).
struct QuadOrderSolver {
    eig_a: CVec,
    v_a: CMat,
    v_a_inv: CMat,
    eig_b: CVec,
    v_b: CMat,
    v_b_inv: CMat,
    q: QuadratureConfig,
}

impl QuadOrderSolver {
    fn new(model: &BipartiteModel, q: QuadratureConfig) -> Result<Self> {
        let a_free = model.free_generator();
        let (eig_a, v_a) = a_free.mat.eig()?;
        let v_a_inv = invert(&v_a)?;
        let b_syl = commutator_sop(&model.h_a.mat).mapv(|z| z * C64::new(0.0, 1.0));
        let (eig_b, v_b) = b_syl.eig()?;
        let v_b_inv = invert(&v_b)?;
        Ok(QuadOrderSolver { eig_a, v_a, v_a_inv, eig_b, v_b, v_b_inv, q })
    }
}

fn invert(m: &CMat) -> Result<CMat> {
    let lu = m.factorize()?;
    let n = m.nrows();
    let mut inv = CMat::zeros((n, n));
    let mut e = CVec::zeros(n);
    for j in 0..n {
        e.fill(ZERO);
        e[j] = ONE;
        inv.column_mut(j).assign(&lu.solve(&e)?);
    }
    Ok(inv)
}

impl OrderSolver for QuadOrderSolver {
    fn solve(&self, c: &CMat) -> Result<CMat> {
        let n = self.eig_a.len();
        let m = self.eig_b.len();
        let mut c_modal = self.v_a_inv.dot(c).dot(&self.v_b);
        let scale_re = self
            .eig_a
            .iter()
            .chain(self.eig_b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let eta = 1e-9 * scale_re;
        let c_norm = fro_norm(&c_modal).max(1e-300);
        let mut mu = f64::INFINITY;
        for i in 0..n {
            for j in 0..m {
                let re = self.eig_a[i].re + self.eig_b[j].re;
                if re < -eta {
                    if c_modal[(i, j)].norm() > 1e-14 * c_norm {
                        mu = mu.min(-re);
                    }
                } else {
                    if c_modal[(i, j)].norm() > 1e-7 * c_norm {
                        return Err(Error::DivergentIntegral(format!(
                            "order-n inhomogeneity has weight {:.3e} on a non-decaying mode",
                            c_modal[(i, j)].norm()
                        )));
                    }
                    c_modal[(i, j)] = ZERO;
                }
            }
        }
        if !mu.is_finite() {
            return Ok(CMat::zeros((n, m)));
        }
        let horizon = self.q.decay_folds / mu;
        let init = (self.q.decay_folds.ceil() as usize).clamp(8, self.q.max_panels / 2);
        let integrand = |t: f64| -> CMat {
            let ea: Vec<C64> = self.eig_a.iter().map(|l| (l * t).exp()).collect();
            let eb: Vec<C64> = self.eig_b.iter().map(|l| (l * t).exp()).collect();
            CMat::from_shape_fn((n, m), |(i, j)| c_modal[(i, j)] * ea[i] * eb[j])
        };
        let floor = c_norm / mu;
        let (s_modal, err, panels) = integrate_adaptive(
            integrand,
            0.0,
            horizon,
            self.q.tol,
            self.q.max_panels,
            init,
            floor,
        )?;
        let accept = 100.0 * self.q.tol * fro_norm(&s_modal).max(floor);
        if err > accept {
            return Err(Error::Numerical(format!(
                "order-n quadrature residual {err:.3e} exceeds {accept:.3e} after {panels} panels"
            )));
        }
        Ok(self.v_a.dot(&s_modal).dot(&self.v_b_inv).mapv(|z| -z))
    }
}

// ---------------------------------------------------------------------------
// second order via the adjoint flow
// ---------------------------------------------------------------------------

/// Modal form of the correlation coefficients: eigendecompose the adjoint
/// B-side generator once, so every `c_{k,l}(t)` evaluation is a short sum
/// over decaying modes.
struct CorrelationKernel {
    eigvals: CVec,
    /// per (k, l): modal coefficient vectors of `c` and `c~`
    coeffs: Vec<Vec<(CVec, CVec)>>,
    /// slowest retained decay rate
    gap: f64,
}

impl CorrelationKernel {
    fn new(model: &BipartiteModel, rho_bar: &Operator) -> Result<Self> {
        let adj = adjoint_lindbladian(&model.spec_b);
        let (eigvals, v) = adj.mat.eig()?;
        let v_lu = v.factorize()?;
        let nk = model.couplings.len();
        let d_b = model.dim_b;
        let scale = eigvals.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let eta = 1e-9 * scale;

        // w_l = V^{-1} vec(B_l); tau_k = V^T vec((B_{0,k} rho_bar)^T)
        let mut w_vecs = Vec::with_capacity(nk);
        let mut tau = Vec::with_capacity(nk);
        let mut tau_tilde = Vec::with_capacity(nk);
        for (_, b) in &model.couplings {
            w_vecs.push(v_lu.solve(&vectorize(&b.mat))?);
        }
        let v_t = v.t().to_owned();
        for (_, b) in &model.couplings {
            let b0 = centered_coupling(b, rho_bar);
            let y = vectorize(&b0.mat.dot(&rho_bar.mat).t().to_owned());
            let y_tilde = vectorize(&rho_bar.mat.dot(&b0.mat).t().to_owned());
            tau.push(v_t.dot(&y));
            tau_tilde.push(v_t.dot(&y_tilde));
        }

        let mut coeffs = Vec::with_capacity(nk);
        let mut gap = f64::INFINITY;
        let mut total = 0.0f64;
        let mut dropped = 0.0f64;
        for k in 0..nk {
            let mut row = Vec::with_capacity(nk);
            for l in 0..nk {
                let mut c = CVec::zeros(d_b * d_b);
                let mut ct = CVec::zeros(d_b * d_b);
                for j in 0..d_b * d_b {
                    let cv = w_vecs[l][j] * tau[k][j];
                    let cvt = w_vecs[l][j] * tau_tilde[k][j];
                    if eigvals[j].re < -eta {
                        c[j] = cv;
                        ct[j] = cvt;
                        total += cv.norm() + cvt.norm();
                        if cv.norm() + cvt.norm() > 0.0 {
                            gap = gap.min(-eigvals[j].re);
                        }
                    } else {
                        // stationary directions carry no weight for centered
                        // couplings; anything beyond round-off is reported
                        dropped += cv.norm() + cvt.norm();
                    }
                }
                row.push((c, ct));
            }
            coeffs.push(row);
        }
        if dropped > 1e-7 * total.max(1e-300) {
            return Err(Error::DivergentIntegral(format!(
                "correlation coefficients retain weight {dropped:.3e} on non-decaying modes"
            )));
        }
        if !gap.is_finite() {
            // couplings vanish entirely
            gap = 1.0;
        }
        Ok(CorrelationKernel { eigvals, coeffs, gap })
    }

    fn eval(&self, k: usize, l: usize, t: f64) -> (C64, C64) {
        let (c, ct) = &self.coeffs[k][l];
        let mut sc = ZERO;
        let mut sct = ZERO;
        for j in 0..self.eigvals.len() {
            if c[j] != ZERO || ct[j] != ZERO {
                let e = (self.eigvals[j] * t).exp();
                sc += c[j] * e;
                sct += ct[j] * e;
            }
        }
        (sc, sct)
    }

    /// Total modal weight of the pair, for negligibility screening.
    fn pair_mass(&self, k: usize, l: usize) -> f64 {
        let (c, ct) = &self.coeffs[k][l];
        c.iter().map(|z| z.norm()).sum::<f64>() + ct.iter().map(|z| z.norm()).sum::<f64>()
    }
}

/// Second-order generator by integrating the correlation-weighted rotating
/// coupling operators, then assembling the commutators.
fn ls2_adjoint_quadrature(model: &BipartiteModel, q: &QuadratureConfig) -> Result<Superoperator> {
    q.validate()?;
    let rho_bar = steady_state(&lindbladian(&model.spec_b))?;
    let kernel = CorrelationKernel::new(model, &rho_bar)?;
    let (w, u) = crate::linalg::eigh_hermitian(&model.h_a.mat)?;
    let ud = dagger(&u);
    let d_a = model.dim_a;
    let nk = model.couplings.len();

    let horizon = q.decay_folds / kernel.gap;
    let init = (q.decay_folds.ceil() as usize).clamp(8, q.max_panels / 2);

    // pairs whose coefficients are pure round-off contribute nothing and
    // would only feed noise into the panel refinement
    let pair_mass: Vec<Vec<f64>> = (0..nk)
        .map(|k| (0..nk).map(|l| kernel.pair_mass(k, l)).collect())
        .collect();
    let mass_scale = pair_mass
        .iter()
        .flatten()
        .fold(0.0f64, |a, &m| a.max(m));

    let mut gen = CMat::zeros((d_a * d_a, d_a * d_a));
    for k in 0..nk {
        let a_k_tilde = ud.dot(&model.couplings[k].0.mat).dot(&u);
        for l in 0..nk {
            if pair_mass[k][l] <= 1e-14 * mass_scale {
                continue;
            }
            // stacked integrand [c * A^-(t); c~ * A^-(t)] in the H_A eigenbasis
            let integrand = |t: f64| -> CMat {
                let (c, ct) = kernel.eval(k, l, t);
                let mut out = CMat::zeros((2 * d_a, d_a));
                for i in 0..d_a {
                    for j in 0..d_a {
                        let phase = C64::new(0.0, -(w[i] - w[j]) * t).exp();
                        let base = a_k_tilde[(i, j)] * phase;
                        out[(i, j)] = c * base;
                        out[(d_a + i, j)] = ct * base;
                    }
                }
                out
            };
            let floor = mass_scale / kernel.gap;
            let (stacked, err, panels) =
                integrate_adaptive(integrand, 0.0, horizon, q.tol, q.max_panels, init, floor)?;
            let accept = 100.0 * q.tol * fro_norm(&stacked).max(floor);
            if err > accept {
                return Err(Error::Numerical(format!(
                    "correlation integral ({k},{l}) residual {err:.3e} exceeds {accept:.3e} after {panels} panels"
                )));
            }
            let m_int = u
                .dot(&stacked.slice(ndarray::s![..d_a, ..]).to_owned())
                .dot(&ud);
            let mt_int = u
                .dot(&stacked.slice(ndarray::s![d_a.., ..]).to_owned())
                .dot(&ud);
            let a_l = &model.couplings[l].0;
            let term = commutator_sop(&a_l.mat).dot(&(left_mult(&m_int) - right_mult(&mt_int)));
            gen.scaled_add(C64::new(-model.g * model.g, 0.0), &term);
        }
    }
    Ok(Superoperator { dim: d_a, mat: gen })
}

/// Slowest decay rate of a B-side generator: smallest `|Re lambda|` over the
/// non-stationary spectrum.
pub fn spectral_gap(gen: &Superoperator) -> Result<f64> {
    use ndarray_linalg::EigVals;
    let vals = gen.mat.eigvals()?;
    let scale = vals.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let gap = vals
        .iter()
        .filter(|z| z.re < -1e-9 * scale)
        .map(|z| -z.re)
        .fold(f64::INFINITY, f64::min);
    if gap.is_finite() {
        Ok(gap)
    } else {
        Err(Error::NoSeparation("generator has no decaying spectrum".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{boson_ops, damped_mode_spec, qubit_ops, thermal_state, LindbladSpec};
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn jc_model(kappa: f64, kphi: f64, delta: f64, n_th: f64, g: f64, cutoff: usize) -> BipartiteModel {
        let q = qubit_ops();
        let spec = damped_mode_spec(delta, kappa, kphi, n_th, cutoff).unwrap();
        let (b, bd, _) = boson_ops(cutoff).unwrap();
        BipartiteModel::new(Operator::zeros(2), spec, vec![(q.raise, b), (q.lower, bd)], g).unwrap()
    }

    fn labframe_model(
        kappa: f64,
        kphi: f64,
        omega_b: f64,
        omega_eg: f64,
        n_th: f64,
        g: f64,
        cutoff: usize,
    ) -> BipartiteModel {
        let q = qubit_ops();
        let spec = damped_mode_spec(omega_b, kappa, kphi, n_th, cutoff).unwrap();
        let (b, bd, _) = boson_ops(cutoff).unwrap();
        let h_a = q.z.scale(C64::new(-omega_eg / 2.0, 0.0));
        BipartiteModel::new(h_a, spec, vec![(q.x, b.add(&bd))], g).unwrap()
    }

    #[test]
    fn centered_coupling_cases() {
        let rho = thermal_state(0.7, 16).unwrap().op;
        // identity centers away entirely
        let c = centered_coupling(&Operator::identity(16), &rho);
        assert!(c.norm_fro() < 1e-14);
        // b is already centered against a thermal state
        let (b, _, num) = boson_ops(16).unwrap();
        let cb = centered_coupling(&b, &rho);
        assert!(cb.sub(&b).norm_fro() < 1e-14);
        // number operator recenters by the mean occupation
        let cn = centered_coupling(&num, &rho);
        let mean: f64 = (0..16).map(|n| n as f64 * rho.mat[(n, n)].re).sum();
        let expect = num.sub(&Operator::identity(16).scale(C64::new(mean, 0.0)));
        assert!(cn.sub(&expect).norm_fro() < 1e-12);
    }

    #[test]
    fn a_minus_free_and_rotating() {
        let q = qubit_ops();
        // H_A = 0 leaves the operator untouched
        let out = a_minus(&q.x, &Operator::zeros(2), 1.3).unwrap();
        assert!(out.sub(&q.x).norm_fro() < 1e-14);
        // t = 0 is the identity map
        let h = q.z.scale(C64::new(-0.8 / 2.0, 0.0));
        let out = a_minus(&q.x, &h, 0.0).unwrap();
        assert!(out.sub(&q.x).norm_fro() < 1e-14);
        // H_A = -w sz/2: sigma_x picks counter-rotating phases on sigma+-
        let w_eg = 0.8;
        let t = 0.9;
        let out = a_minus(&q.x, &h, t).unwrap();
        let expect = q
            .raise
            .scale(C64::new(0.0, -w_eg * t).exp())
            .add(&q.lower.scale(C64::new(0.0, w_eg * t).exp()));
        assert!(out.sub(&expect).norm_fro() < 1e-13);
    }

    #[test]
    fn a_minus_preserves_singular_values() {
        use ndarray_linalg::SVD;
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let m = CMat::from_shape_fn((3, 3), |_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let a = Operator::new(m).unwrap();
        let hm = CMat::from_shape_fn((3, 3), |_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let h = Operator::new(&hm + &dagger(&hm)).unwrap();
        let (_, s0, _) = a.mat.svd(false, false).unwrap();
        let (_, s1, _) = a_minus(&a, &h, 2.2).unwrap().mat.svd(false, false).unwrap();
        for (x, y) in s0.iter().zip(s1.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn b_heisenberg_identity_and_zero_time() {
        let spec = damped_mode_spec(0.5, 1.0, 0.1, 0.3, 8).unwrap();
        let (b, _, _) = boson_ops(8).unwrap();
        let out = b_heisenberg(&b, &spec, 0.0).unwrap();
        assert!(out.sub(&b).norm_fro() < 1e-12);
        let id = Operator::identity(8);
        let out = b_heisenberg(&id, &spec, 3.0).unwrap();
        assert!(out.sub(&id).norm_fro() < 1e-10);
        assert!(b_heisenberg(&b, &spec, -1.0).is_err());
    }

    #[test]
    fn b_heisenberg_damped_mode_closed_form() {
        // with n_th = 0 the truncated flow of b is exact; thermal excitation
        // feeds the edge defect back down the ladder, which is why closed-form
        // matrix comparisons exclude the top Fock levels
        let (kappa, kphi, delta) = (1.0, 0.2, 0.4);
        let spec = damped_mode_spec(delta, kappa, kphi, 0.0, 14).unwrap();
        let (b, _, _) = boson_ops(14).unwrap();
        let t = 0.7;
        let out = b_heisenberg(&b, &spec, t).unwrap();
        let gamma = C64::new(kappa + kphi, 2.0 * delta);
        let expect = b.scale((-gamma * 0.5 * t).exp());
        let mut diff = out.sub(&expect).mat;
        for i in 0..14 {
            for j in 12..14 {
                diff[(i, j)] = ZERO;
                diff[(j, i)] = ZERO;
            }
        }
        assert!(fro_norm(&diff) < 1e-10, "edge-excluded deviation {}", fro_norm(&diff));
    }

    #[test]
    fn order0_structure() {
        let model = jc_model(1.0, 0.0, 0.3, 0.2, 0.05, 10);
        let (gen, corr, _rho) = order0(&model).unwrap();
        assert!(gen.norm_fro() < 1e-14, "free qubit rotation vanishes for H_A = 0");
        // embedding then partial trace is the identity on random inputs
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let p = partial_trace_b_map(2, 10);
        let x = Operator::new(CMat::from_shape_fn((2, 2), |_| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        }))
        .unwrap();
        let joint = corr.apply(&x).unwrap();
        let back = p.apply(&joint).unwrap();
        assert!(back.sub(&x).norm_fro() < 1e-13);
    }

    #[test]
    fn order0_labframe_generator() {
        let model = labframe_model(1.0, 0.0, 3.0, 2.0, 0.0, 0.05, 8);
        let (gen, _, _) = order0(&model).unwrap();
        let q = qubit_ops();
        let expect = commutator_sop(&q.z.scale(C64::new(-2.0 / 2.0, 0.0)).mat)
            .mapv(|z| z * C64::new(0.0, -1.0));
        assert!(fro_norm(&(&gen.mat - &expect)) < 1e-13);
    }

    #[test]
    fn ls1_vanishes_for_centered_couplings_and_not_otherwise() {
        let model = jc_model(1.0, 0.1, 0.3, 0.4, 0.07, 12);
        let rho_bar = steady_state(&lindbladian(&model.spec_b)).unwrap();
        let l1 = ls1(&model, &rho_bar);
        assert!(l1.norm_fro() < 1e-12);

        // g = 0 trivially vanishes
        let mut m0 = model.clone();
        m0.g = 0.0;
        assert!(ls1(&m0, &rho_bar).norm_fro() == 0.0);

        // B = b + b^dag + alpha I produces -i g alpha [A, .]
        let q = qubit_ops();
        let (b, bd, _) = boson_ops(12).unwrap();
        let alpha = 0.37;
        let shifted = b.add(&bd).add(&Operator::identity(12).scale(C64::new(alpha, 0.0)));
        let spec = damped_mode_spec(0.3, 1.0, 0.0, 0.4, 12).unwrap();
        let model2 = BipartiteModel::new(Operator::zeros(2), spec, vec![(q.x.clone(), shifted)], 0.07)
            .unwrap();
        let rho2 = steady_state(&lindbladian(&model2.spec_b)).unwrap();
        let l1 = ls1(&model2, &rho2);
        let expect = commutator_sop(&q.x.mat).mapv(|z| z * C64::new(0.0, -0.07 * alpha));
        assert!(fro_norm(&(&l1.mat - &expect)) < 1e-12);
    }

    #[test]
    fn k1_gauge_invariance_and_cross_solver() {
        let model = jc_model(1.0, 0.0, 0.3, 0.2, 0.05, 12);
        let q = QuadratureConfig { tol: 1e-10, ..Default::default() };
        let k_direct = k1(&model, SylvesterMethod::Direct, &q).unwrap();
        let k_quad = k1(&model, SylvesterMethod::Quadrature, &q).unwrap();
        let rel = fro_norm(&(&k_direct.mat - &k_quad.mat)) / fro_norm(&k_direct.mat);
        assert!(rel < 1e-8, "cross-solver gap {rel:.3e}");

        let p = partial_trace_b_map(2, 12);
        assert!(fro_norm(&p.mat.dot(&k_direct.mat)) < 1e-10);

        // zero coupling gives a zero map
        let mut m0 = model.clone();
        m0.g = 0.0;
        let k0 = k1(&m0, SylvesterMethod::Direct, &q).unwrap();
        assert!(k0.norm_fro() < 1e-14);
    }

    #[test]
    fn k1_linearity_and_hermiticity_compatibility() {
        let model = labframe_model(1.0, 0.1, 2.0, 1.3, 0.2, 0.06, 8);
        let q = QuadratureConfig::default();
        let k = k1(&model, SylvesterMethod::Direct, &q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let x = Operator::new(CMat::from_shape_fn((2, 2), |_| {
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            }))
            .unwrap();
            // K(X^dag) = K(X)^dag
            let lhs = k.apply(&x.dagger()).unwrap();
            let rhs = k.apply(&x).unwrap().dagger();
            assert!(lhs.sub(&rhs).norm_fro() < 1e-12 * rhs.norm_fro().max(1e-30));
        }
    }

    #[test]
    fn correlation_coeffs_at_zero_and_closed_form() {
        let model = jc_model(1.0, 0.3, 0.5, 0.4, 0.05, 16);
        let rho_bar = steady_state(&lindbladian(&model.spec_b)).unwrap();
        let (c0, _) = correlation_coeffs(&model, 0.0).unwrap();
        // at t = 0: c_{k,l} = Tr(B_l B_{0,k} rho_bar)
        for k in 0..2 {
            for l in 0..2 {
                let b0k = centered_coupling(&model.couplings[k].1, &rho_bar);
                let expect = model.couplings[l]
                    .1
                    .matmul(&b0k)
                    .matmul(&rho_bar)
                    .trace();
                assert!((c0[(k, l)] - expect).norm() < 1e-12);
            }
        }
        // single-mode decay: c_{2,1}(t) = (1+n_bar) e^{-gamma t / 2}
        let t = 0.9;
        let (c, ct) = correlation_coeffs(&model, t).unwrap();
        let gamma = C64::new(1.0 + 0.3, 2.0 * 0.5);
        let n_bar: f64 = (0..16).map(|n| n as f64 * rho_bar.mat[(n, n)].re).sum();
        let decay = (-gamma * 0.5 * t).exp();
        assert!((c[(1, 0)] - decay * (1.0 + n_bar)).norm() < 1e-4);
        assert!((ct[(0, 1)] - decay.conj() * (1.0 + n_bar)).norm() < 1e-4);
    }

    #[test]
    fn correlation_decay_rate_matches_spectral_gap() {
        let model = jc_model(1.0, 0.2, 0.4, 0.3, 0.05, 12);
        let gap = spectral_gap(&lindbladian(&model.spec_b)).unwrap();
        let ts: Vec<f64> = (1..=10).map(|i| 0.4 * i as f64).collect();
        let norms: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let (c, _) = correlation_coeffs(&model, t).unwrap();
                fro_norm(&c)
            })
            .collect();
        // linear fit of log ||c(t)||
        let n = ts.len() as f64;
        let sx: f64 = ts.iter().sum();
        let sy: f64 = norms.iter().map(|v| v.ln()).sum();
        let sxx: f64 = ts.iter().map(|t| t * t).sum();
        let sxy: f64 = ts.iter().zip(&norms).map(|(t, v)| t * v.ln()).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let fitted_rate = -slope;
        assert!(
            (fitted_rate - gap).abs() <= 0.2 * gap,
            "fitted decay {fitted_rate:.4} vs gap {gap:.4}"
        );
    }

    #[test]
    fn ls2_dual_paths_agree_on_random_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let q = QuadratureConfig { tol: 1e-11, ..Default::default() };
        for trial in 0..3usize {
            // random small model: Hermitian H_A, dipolar-type coupling
            let d_a = 2 + trial % 2;
            let cutoff = 7;
            let hm = CMat::from_shape_fn((d_a, d_a), |_| {
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let h_a = Operator::new((&hm + &dagger(&hm)).mapv(|z| z * 0.7)).unwrap();
            let am = CMat::from_shape_fn((d_a, d_a), |_| {
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let a_op = Operator::new(&am + &dagger(&am)).unwrap();
            let (b, bd, _) = boson_ops(cutoff).unwrap();
            let spec = damped_mode_spec(0.9, 1.0, 0.15, 0.25, cutoff).unwrap();
            let model =
                BipartiteModel::new(h_a, spec, vec![(a_op, b.add(&bd))], 0.08).unwrap();
            let l_adj = ls2(&model, Ls2Method::AdjointQuadrature, &q).unwrap();
            let l_k1 = ls2(&model, Ls2Method::FromK1(SylvesterMethod::Direct), &q).unwrap();
            let rel = l_adj.sub(&l_k1).norm_fro() / l_k1.norm_fro();
            assert!(rel < 1e-8, "trial {trial}: dual-path gap {rel:.3e}");
        }
    }

    #[test]
    fn ls2_zero_coupling() {
        let mut model = jc_model(1.0, 0.0, 0.3, 0.0, 0.05, 8);
        model.g = 0.0;
        let q = QuadratureConfig::default();
        let l = ls2(&model, Ls2Method::AdjointQuadrature, &q).unwrap();
        assert!(l.norm_fro() < 1e-14);
    }

    #[test]
    fn reduce_is_consistent_with_standalone_operations() {
        let model = labframe_model(1.0, 0.2, 3.0, 2.0, 0.3, 0.05, 8);
        let q = QuadratureConfig { tol: 1e-10, ..Default::default() };
        let red = reduce(&model, 2, SylvesterMethod::Direct, &q).unwrap();

        let (gen0, corr0, rho_bar) = order0(&model).unwrap();
        assert!(red.orders[0].generator.sub(&gen0).norm_fro() <= 1e-14 * gen0.norm_fro().max(1.0));
        assert!(fro_norm(&(&red.orders[0].correction.mat - &corr0.mat)) <= 1e-14);

        let l1 = ls1(&model, &rho_bar);
        assert!(red.orders[1].generator.sub(&l1).norm_fro() <= 1e-13 * l1.norm_fro().max(1.0));

        let k = k1(&model, SylvesterMethod::Direct, &q).unwrap();
        let kscale = k.norm_fro().max(1e-30);
        assert!(fro_norm(&(&red.orders[1].correction.mat - &k.mat)) <= 1e-12 * kscale);

        let l2 = ls2(&model, Ls2Method::FromK1(SylvesterMethod::Direct), &q).unwrap();
        let l2scale = l2.norm_fro().max(1e-30);
        assert!(red.orders[2].generator.sub(&l2).norm_fro() <= 1e-12 * l2scale);
    }

    #[test]
    fn reduce_diagnostics_to_third_order() {
        for model in [
            jc_model(1.0, 0.1, 0.5, 0.3, 0.05, 9),
            labframe_model(1.0, 0.2, 3.0, 2.0, 0.3, 0.05, 9),
        ] {
            let q = QuadratureConfig { tol: 1e-10, ..Default::default() };
            let red = reduce(&model, 3, SylvesterMethod::Direct, &q).unwrap();
            for o in &red.orders[1..] {
                assert!(o.invariance_residual < 1e-10, "order {} residual {:.2e}", o.order, o.invariance_residual);
                assert!(o.gauge_residual < 1e-10, "order {} gauge {:.2e}", o.order, o.gauge_residual);
            }
            // generators annihilate trace and preserve Hermiticity
            let mut rng = ChaCha8Rng::seed_from_u64(45);
            for o in &red.orders {
                let x = Operator::new(CMat::from_shape_fn((2, 2), |_| {
                    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                }))
                .unwrap();
                let out = o.generator.apply(&x).unwrap();
                assert!(out.trace().norm() < 1e-10 * o.generator.norm_fro().max(1e-30));
                let lhs = o.generator.apply(&x.dagger()).unwrap();
                let rhs = o.generator.apply(&x).unwrap().dagger();
                assert!(lhs.sub(&rhs).norm_fro() < 1e-10 * rhs.norm_fro().max(1e-30));
            }
            // odd orders vanish for purely off-diagonal mode couplings
            assert!(red.orders[1].generator.norm_fro() < 1e-12);
            assert!(red.orders[3].generator.norm_fro() < 1e-12 * red.orders[2].generator.norm_fro());
        }
    }

    #[test]
    fn reduce_order_cap() {
        let model = jc_model(1.0, 0.0, 0.3, 0.0, 0.02, 6);
        let q = QuadratureConfig::default();
        assert!(reduce(&model, 7, SylvesterMethod::Direct, &q).is_err());
    }

    #[test]
    fn fock_warning_attached_when_tail_is_heavy() {
        // n_th = 1 with a tiny cutoff leaves visible steady-state mass on top
        let model = jc_model(1.0, 0.0, 0.3, 1.0, 0.05, 6);
        let q = QuadratureConfig::default();
        let red = reduce(&model, 1, SylvesterMethod::Direct, &q).unwrap();
        assert!(!red.warnings.is_empty());

        let ok_model = jc_model(1.0, 0.0, 0.3, 0.0, 0.05, 8);
        let red = reduce(&ok_model, 1, SylvesterMethod::Direct, &q).unwrap();
        assert!(red.warnings.is_empty());
    }

    #[test]
    fn degenerate_h_a_spectrum_is_handled() {
        // H_A with a repeated eigenvalue: clusters simply grow
        let h = Operator::new(ndarray::array![
            [C64::new(0.5, 0.0), ZERO, ZERO],
            [ZERO, C64::new(0.5, 0.0), ZERO],
            [ZERO, ZERO, C64::new(-0.5, 0.0)]
        ])
        .unwrap();
        let mut a = CMat::zeros((3, 3));
        a[(0, 2)] = ONE;
        a[(2, 0)] = ONE;
        a[(0, 1)] = ONE;
        a[(1, 0)] = ONE;
        let a_op = Operator::new(a).unwrap();
        let (b, bd, _) = boson_ops(6).unwrap();
        let spec = damped_mode_spec(0.8, 1.0, 0.0, 0.2, 6).unwrap();
        let model = BipartiteModel::new(h, spec, vec![(a_op, b.add(&bd))], 0.05).unwrap();
        let q = QuadratureConfig::default();
        let red = reduce(&model, 2, SylvesterMethod::Direct, &q).unwrap();
        assert!(red.orders[2].invariance_residual < 1e-10);
        assert!(red.orders[2].gauge_residual < 1e-10);
    }

    #[test]
    fn spec_with_zero_hamiltonian_spec() {
        // LindbladSpec H = 0 accepted, epsilon diagnostic reflects g/kappa
        let q = qubit_ops();
        let spec = LindbladSpec::new(Operator::zeros(2), vec![(2.0, q.lower.clone())]).unwrap();
        let model = BipartiteModel::new(
            Operator::zeros(2),
            spec,
            vec![(q.x.clone(), q.x.clone())],
            0.1,
        )
        .unwrap();
        assert_abs_diff_eq!(model.epsilon(), 0.05, epsilon = 1e-15);
    }
}

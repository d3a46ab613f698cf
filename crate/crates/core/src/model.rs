// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Bipartite open-system models: Lindblad generators, their Heisenberg-picture
//! adjoints, steady states, and the standard qubit/boson operator factories.

use ndarray::prelude::*;
use ndarray_linalg::SVD;

use crate::error::{Error, Result};
use crate::linalg::{
    adjoint_dissipator_sop, commutator_sop, dagger, dissipator_sop, fro_norm, kron, tensor,
    unvectorize, CMat, Operator, Superoperator, C64, ONE, ZERO,
};

/// Tolerance for Hermiticity checks on Hamiltonians and couplings.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Relative singular-value cutoff identifying the generator kernel.
pub const KERNEL_TOL: f64 = 1e-10;

/// Steady-state tail mass above level `N-3` beyond which the Fock cutoff is
/// flagged as inadequate.
pub const FOCK_TAIL_TOL: f64 = 1e-8;

/// One dissipation channel: a nonnegative rate and a jump operator.
#[derive(Debug, Clone)]
pub struct Channel {
    pub rate: f64,
    pub jump: Operator,
}

/// Hamiltonian plus dissipation channels on one subsystem.
///
/// Hamiltonians are in angular-frequency units, rates in inverse-time units.
#[derive(Debug, Clone)]
pub struct LindbladSpec {
    pub h: Operator,
    pub channels: Vec<Channel>,
}

impl LindbladSpec {
    pub fn new(h: Operator, channels: Vec<(f64, Operator)>) -> Result<Self> {
        if !h.is_hermitian(HERMITICITY_TOL) {
            return Err(Error::InvalidArgument(
                "Lindblad spec: Hamiltonian is not Hermitian within 1e-12".into(),
            ));
        }
        let dim = h.dim;
        let mut chs = Vec::with_capacity(channels.len());
        for (rate, jump) in channels {
            if !(rate >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "Lindblad spec: channel rate {rate} is negative"
                )));
            }
            if jump.dim != dim {
                return Err(Error::DimensionMismatch(format!(
                    "Lindblad spec: jump dim {} vs Hamiltonian dim {dim}",
                    jump.dim
                )));
            }
            chs.push(Channel { rate, jump });
        }
        Ok(LindbladSpec { h: h2_normalize(h), channels: chs })
    }

    pub fn dim(&self) -> usize {
        self.h.dim
    }

    /// Largest channel rate; reference scale for the timescale-separation
    /// diagnostic.
    pub fn reference_rate(&self) -> f64 {
        self.channels.iter().map(|c| c.rate).fold(0.0, f64::max)
    }
}

/// Symmetrize away round-off in a Hamiltonian that already passed the check.
fn h2_normalize(h: Operator) -> Operator {
    let sym = (&h.mat + &dagger(&h.mat)).mapv(|z| z * 0.5);
    Operator { dim: h.dim, mat: sym }
}

/// Matrix of `rho -> -i[H, rho] + sum_k rate_k D[L_k](rho)` in the fixed
/// column-stacking convention.
pub fn lindbladian(spec: &LindbladSpec) -> Superoperator {
    let mut m = commutator_sop(&spec.h.mat).mapv(|z| z * C64::new(0.0, -1.0));
    for ch in &spec.channels {
        m.scaled_add(C64::new(ch.rate, 0.0), &dissipator_sop(&ch.jump.mat));
    }
    Superoperator { dim: spec.dim(), mat: m }
}

/// Matrix of the Heisenberg-picture generator
/// `X -> +i[H, X] + sum_k rate_k (L^† X L - {L^†L, X}/2)`.
///
/// Satisfies the trace pairing `Tr(X L(rho)) = Tr(L*(X) rho)`.
pub fn adjoint_lindbladian(spec: &LindbladSpec) -> Superoperator {
    let mut m = commutator_sop(&spec.h.mat).mapv(|z| z * C64::new(0.0, 1.0));
    for ch in &spec.channels {
        m.scaled_add(C64::new(ch.rate, 0.0), &adjoint_dissipator_sop(&ch.jump.mat));
    }
    Superoperator { dim: spec.dim(), mat: m }
}

/// Unique trace-1 Hermitian positive fixed point of a generator, from the
/// null singular vector. Errors when the kernel is not one-dimensional.
pub fn steady_state(gen: &Superoperator) -> Result<Operator> {
    let (_, sv, vt) = gen
        .mat
        .svd(false, true)
        .map_err(|e| Error::Numerical(format!("steady-state SVD failed: {e}")))?;
    let vt = vt.expect("requested right singular vectors");
    let smax = sv.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
    let null_count = sv.iter().filter(|&&s| s < KERNEL_TOL * smax).count();
    if null_count != 1 {
        return Err(Error::DegenerateSteadyState { count: null_count });
    }
    // smallest singular value is last in LAPACK ordering
    let v = vt.row(vt.nrows() - 1).mapv(|z| z.conj());
    let x = unvectorize(&v.to_owned(), gen.dim)?;
    let herm = (&x + &dagger(&x)).mapv(|z| z * 0.5);
    let tr = herm.diag().sum();
    if tr.norm() < 1e-14 {
        return Err(Error::Numerical("steady-state candidate has vanishing trace".into()));
    }
    let rho = herm.mapv(|z| z / tr);
    let residual = crate::linalg::vec_norm(&gen.mat.dot(&crate::linalg::vectorize(&rho)));
    let scale = fro_norm(&gen.mat).max(1.0);
    if residual > 10.0 * KERNEL_TOL * scale {
        return Err(Error::Numerical(format!(
            "steady-state residual {residual:.3e} exceeds {:.3e}",
            10.0 * KERNEL_TOL * scale
        )));
    }
    Ok(Operator { dim: gen.dim, mat: rho })
}

/// Truncated thermal state of a harmonic mode plus the discarded tail mass.
#[derive(Debug, Clone)]
pub struct ThermalState {
    pub op: Operator,
    /// Probability mass of the untruncated distribution above the cutoff.
    pub tail_mass: f64,
}

/// Diagonal truncated geometric distribution with mean occupation `n_th`,
/// renormalized to unit trace.
pub fn thermal_state(n_th: f64, cutoff: usize) -> Result<ThermalState> {
    if cutoff < 1 {
        return Err(Error::InvalidArgument("thermal state needs cutoff >= 1".into()));
    }
    if !(n_th >= 0.0) {
        return Err(Error::InvalidArgument(format!("thermal occupation {n_th} must be >= 0")));
    }
    let q = if n_th == 0.0 { 0.0 } else { n_th / (n_th + 1.0) };
    let mut w = Array1::<f64>::zeros(cutoff);
    for n in 0..cutoff {
        w[n] = (1.0 - q) * q.powi(n as i32);
    }
    let kept: f64 = w.sum();
    let tail = (1.0 - kept).max(0.0);
    let mat = CMat::from_shape_fn((cutoff, cutoff), |(i, j)| {
        if i == j {
            C64::new(w[i] / kept, 0.0)
        } else {
            ZERO
        }
    });
    Ok(ThermalState { op: Operator { dim: cutoff, mat }, tail_mass: tail })
}

/// Truncated annihilation, creation and number operators,
/// `b |n> = sqrt(n) |n-1>`.
pub fn boson_ops(cutoff: usize) -> Result<(Operator, Operator, Operator)> {
    if cutoff < 2 {
        return Err(Error::InvalidArgument("boson operators need cutoff >= 2".into()));
    }
    let mut b = CMat::zeros((cutoff, cutoff));
    for n in 1..cutoff {
        b[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let bd = dagger(&b);
    let num = bd.dot(&b);
    Ok((
        Operator { dim: cutoff, mat: b },
        Operator { dim: cutoff, mat: bd },
        Operator { dim: cutoff, mat: num },
    ))
}

/// Qubit operators in the ordered basis `(|g>, |e>)`.
///
/// Sign convention: `sigma_z = |g><g| - |e><e|` is **ground-state positive**,
/// opposite to the common excited-state-positive choice. The lowering
/// operator is `sigma_minus = |g><e|`.
#[derive(Debug, Clone)]
pub struct QubitOps {
    pub lower: Operator,
    pub raise: Operator,
    pub x: Operator,
    pub z: Operator,
}

pub fn qubit_ops() -> QubitOps {
    let lower = Operator::new(ndarray::array![[ZERO, ONE], [ZERO, ZERO]]).unwrap();
    let raise = lower.dagger();
    let x = lower.add(&raise);
    let z = Operator::new(ndarray::array![[ONE, ZERO], [ZERO, -ONE]]).unwrap();
    QubitOps { lower, raise, x, z }
}

/// Full problem description: slow subsystem A with Hamiltonian `h_a`, fast
/// subsystem B with Lindblad spec `spec_b`, and the weak Hamiltonian coupling
/// `g * sum_k A_k (x) B_k`.
#[derive(Debug, Clone)]
pub struct BipartiteModel {
    pub dim_a: usize,
    pub dim_b: usize,
    pub h_a: Operator,
    pub spec_b: LindbladSpec,
    pub couplings: Vec<(Operator, Operator)>,
    pub g: f64,
}

impl BipartiteModel {
    pub fn new(
        h_a: Operator,
        spec_b: LindbladSpec,
        couplings: Vec<(Operator, Operator)>,
        g: f64,
    ) -> Result<Self> {
        if !h_a.is_hermitian(HERMITICITY_TOL) {
            return Err(Error::InvalidArgument("model: H_A is not Hermitian within 1e-12".into()));
        }
        if !(g >= 0.0) {
            return Err(Error::InvalidArgument(format!("model: coupling strength {g} must be >= 0")));
        }
        let dim_a = h_a.dim;
        let dim_b = spec_b.dim();
        for (k, (a, b)) in couplings.iter().enumerate() {
            if a.dim != dim_a || b.dim != dim_b {
                return Err(Error::DimensionMismatch(format!(
                    "coupling {k}: dims ({}, {}) vs model ({dim_a}, {dim_b})",
                    a.dim, b.dim
                )));
            }
        }
        let model = BipartiteModel { dim_a, dim_b, h_a: h2_normalize(h_a), spec_b, couplings, g };
        let hi = model.interaction_hamiltonian();
        if !hi.is_hermitian(HERMITICITY_TOL) {
            return Err(Error::InvalidArgument(
                "model: sum_k A_k (x) B_k is not Hermitian within 1e-12; the interaction must be a valid Hamiltonian".into(),
            ));
        }
        Ok(model)
    }

    pub fn joint_dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// `sum_k A_k (x) B_k` (without the factor `g`).
    pub fn interaction_hamiltonian(&self) -> Operator {
        let mut m = CMat::zeros((self.joint_dim(), self.joint_dim()));
        for (a, b) in &self.couplings {
            m += &kron(&a.mat, &b.mat);
        }
        Operator { dim: self.joint_dim(), mat: m }
    }

    /// Generator of the complete bipartite dynamics.
    pub fn full_liouvillian(&self) -> Superoperator {
        let ib = Operator::identity(self.dim_b);
        let ia = Operator::identity(self.dim_a);
        let mut h = tensor(&self.h_a, &ib).mat + tensor(&ia, &self.spec_b.h).mat;
        h.scaled_add(C64::new(self.g, 0.0), &self.interaction_hamiltonian().mat);
        let channels: Vec<(f64, Operator)> = self
            .spec_b
            .channels
            .iter()
            .map(|c| (c.rate, tensor(&ia, &c.jump)))
            .collect();
        let spec = LindbladSpec::new(Operator { dim: self.joint_dim(), mat: h }, channels)
            .expect("joint spec inherits validity from the model");
        lindbladian(&spec)
    }

    /// Free generator `-i (H_A (x) I)^x + I_A (x) L_B`; the left coefficient
    /// of every order's Sylvester equation.
    pub fn free_generator(&self) -> Superoperator {
        let ib = Operator::identity(self.dim_b);
        let ia = Operator::identity(self.dim_a);
        let h = tensor(&self.h_a, &ib).mat + tensor(&ia, &self.spec_b.h).mat;
        let channels: Vec<(f64, Operator)> = self
            .spec_b
            .channels
            .iter()
            .map(|c| (c.rate, tensor(&ia, &c.jump)))
            .collect();
        let spec = LindbladSpec::new(Operator { dim: self.joint_dim(), mat: h }, channels)
            .expect("joint spec inherits validity from the model");
        lindbladian(&spec)
    }

    /// Timescale-separation diagnostic `g / kappa_ref` where `kappa_ref` is
    /// the largest B-side channel rate. Purely informational.
    pub fn epsilon(&self) -> f64 {
        let kappa = self.spec_b.reference_rate();
        if kappa > 0.0 {
            self.g / kappa
        } else {
            f64::INFINITY
        }
    }

    /// Steady-state tail mass above level `dim_b - 3`; a warning string when
    /// it exceeds [`FOCK_TAIL_TOL`].
    pub fn fock_adequacy_warning(&self, rho_bar: &Operator) -> Option<String> {
        if self.dim_b < 4 {
            return None;
        }
        let from = self.dim_b - 3;
        let tail: f64 = (from..self.dim_b).map(|n| rho_bar.mat[(n, n)].re).sum();
        if tail > FOCK_TAIL_TOL {
            Some(format!(
                "Fock cutoff {} may be too small: steady-state mass {tail:.3e} above level {} exceeds {FOCK_TAIL_TOL:.1e}",
                self.dim_b,
                from
            ))
        } else {
            None
        }
    }
}

/// The damped-mode spec used by both worked examples:
/// `-i omega_b [n, .] + kappa(1+n_th) D[b] + kappa n_th D[b^†] + kappa_phi D[n]`.
pub fn damped_mode_spec(
    omega_b: f64,
    kappa: f64,
    kappa_phi: f64,
    n_th: f64,
    cutoff: usize,
) -> Result<LindbladSpec> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("damping rate kappa = {kappa} must be > 0")));
    }
    if !(kappa_phi >= 0.0) || !(n_th >= 0.0) {
        return Err(Error::InvalidArgument(
            "kappa_phi and n_th must be nonnegative".into(),
        ));
    }
    let (b, bd, num) = boson_ops(cutoff)?;
    let h = num.scale(C64::new(omega_b, 0.0));
    let mut channels = vec![(kappa * (1.0 + n_th), b)];
    if n_th > 0.0 {
        channels.push((kappa * n_th, bd));
    }
    if kappa_phi > 0.0 {
        channels.push((kappa_phi, num));
    }
    LindbladSpec::new(h, channels)
}

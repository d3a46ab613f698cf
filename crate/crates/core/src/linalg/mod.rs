// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra for operators and superoperators.
//!
//! Conventions used throughout the crate:
//!
//! * Vectorization is **column-stacking**: `vec(X)[j*d + i] = X[i, j]`.
//!   Consequently `vec(A X B) = (B^T ⊗ A) vec(X)`, which is the single
//!   identity all superoperator assembly relies on.
//! * Tensor products are A-major: the joint index is `a * dim_b + b`.

mod expm;
mod sylvester;

pub use expm::{conjugate_by_unitary, expm, Propagator};
pub use sylvester::{
    solve_sylvester_direct, solve_sylvester_quadrature, DeflatedShift, ShiftedDeflatedSolver,
};

use ndarray::prelude::*;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Dense complex square matrix with an attached Hilbert-space dimension.
///
/// Hermiticity, positivity and unit trace are not invariants of the type;
/// they are checked per role (density operators must satisfy all three).
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub dim: usize,
    pub mat: CMat,
}

impl Operator {
    pub fn new(mat: CMat) -> Result<Self> {
        let (r, c) = mat.dim();
        if r != c || r == 0 {
            return Err(Error::DimensionMismatch(format!(
                "operator matrix must be square and nonempty, got {r}x{c}"
            )));
        }
        Ok(Operator { dim: r, mat })
    }

    pub fn zeros(dim: usize) -> Self {
        Operator { dim, mat: CMat::zeros((dim, dim)) }
    }

    pub fn identity(dim: usize) -> Self {
        Operator { dim, mat: CMat::eye(dim) }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        Operator { dim, mat: CMat::from_shape_fn((dim, dim), |(i, j)| f(i, j)) }
    }

    pub fn dagger(&self) -> Self {
        Operator { dim: self.dim, mat: dagger(&self.mat) }
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }

    pub fn norm_fro(&self) -> f64 {
        fro_norm(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.norm_fro().max(1.0);
        fro_norm(&(&self.mat - &dagger(&self.mat))) <= tol * scale
    }

    pub fn matmul(&self, other: &Operator) -> Operator {
        Operator { dim: self.dim, mat: self.mat.dot(&other.mat) }
    }

    pub fn scale(&self, z: C64) -> Operator {
        Operator { dim: self.dim, mat: self.mat.mapv(|x| x * z) }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        Operator { dim: self.dim, mat: &self.mat + &other.mat }
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        Operator { dim: self.dim, mat: &self.mat - &other.mat }
    }
}

/// Dense complex matrix acting on vectorized operators of a `d`-dimensional
/// space, so the matrix is `d^2 x d^2` in the column-stacking convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    /// Operator-space side `d` (the matrix side is `d^2`).
    pub dim: usize,
    pub mat: CMat,
}

impl Superoperator {
    pub fn new(dim: usize, mat: CMat) -> Result<Self> {
        let d2 = dim * dim;
        if mat.dim() != (d2, d2) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator for dim {dim} must be {d2}x{d2}, got {:?}",
                mat.dim()
            )));
        }
        Ok(Superoperator { dim, mat })
    }

    pub fn zeros(dim: usize) -> Self {
        let d2 = dim * dim;
        Superoperator { dim, mat: CMat::zeros((d2, d2)) }
    }

    pub fn identity(dim: usize) -> Self {
        let d2 = dim * dim;
        Superoperator { dim, mat: CMat::eye(d2) }
    }

    /// Apply to an operator: `unvec(S vec(X))`.
    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        if x.dim != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperator dim {} applied to operator dim {}",
                self.dim, x.dim
            )));
        }
        Ok(Operator { dim: self.dim, mat: unvectorize(&self.mat.dot(&vectorize(&x.mat)), self.dim)? })
    }

    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator { dim: self.dim, mat: self.mat.dot(&other.mat) }
    }

    pub fn add(&self, other: &Superoperator) -> Superoperator {
        Superoperator { dim: self.dim, mat: &self.mat + &other.mat }
    }

    pub fn sub(&self, other: &Superoperator) -> Superoperator {
        Superoperator { dim: self.dim, mat: &self.mat - &other.mat }
    }

    pub fn scale(&self, z: C64) -> Superoperator {
        Superoperator { dim: self.dim, mat: self.mat.mapv(|x| x * z) }
    }

    pub fn norm_fro(&self) -> f64 {
        fro_norm(&self.mat)
    }
}

/// Linear map from operators on a `in_dim`-dimensional space to operators on
/// an `out_dim`-dimensional space; the matrix is `out_dim^2 x in_dim^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RectangularMap {
    pub out_dim: usize,
    pub in_dim: usize,
    pub mat: CMat,
}

impl RectangularMap {
    pub fn new(out_dim: usize, in_dim: usize, mat: CMat) -> Result<Self> {
        if mat.dim() != (out_dim * out_dim, in_dim * in_dim) {
            return Err(Error::DimensionMismatch(format!(
                "rectangular map must be {}x{}, got {:?}",
                out_dim * out_dim,
                in_dim * in_dim,
                mat.dim()
            )));
        }
        Ok(RectangularMap { out_dim, in_dim, mat })
    }

    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        RectangularMap { out_dim, in_dim, mat: CMat::zeros((out_dim * out_dim, in_dim * in_dim)) }
    }

    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        if x.dim != self.in_dim {
            return Err(Error::DimensionMismatch(format!(
                "map with input dim {} applied to operator dim {}",
                self.in_dim, x.dim
            )));
        }
        Ok(Operator {
            dim: self.out_dim,
            mat: unvectorize(&self.mat.dot(&vectorize(&x.mat)), self.out_dim)?,
        })
    }

    pub fn norm_fro(&self) -> f64 {
        fro_norm(&self.mat)
    }
}

// ---------------------------------------------------------------------------
// free functions on raw matrices
// ---------------------------------------------------------------------------

pub fn dagger(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

/// Hermitian eigendecomposition `M = V diag(w) V^†` with eigenvectors in the
/// columns of `V`.
///
/// The LAPACK backend sees row-major data as its transpose, so for complex
/// Hermitian input the raw routine hands back eigenvectors of `conj(M)`;
/// they are conjugated here so that `M v_j = w_j v_j` holds as stated.
pub fn eigh_hermitian(m: &CMat) -> Result<(Array1<f64>, CMat)> {
    use ndarray_linalg::{Eigh, UPLO};
    let (w, v) = m
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigendecomposition failed: {e}")))?;
    Ok((w, v.mapv(|z| z.conj())))
}

pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product with A-major ordering: index = a * b_dim + b.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    ndarray::linalg::kron(a, b)
}

/// Column-stacking vectorization: `vec(X)[j*d + i] = X[i, j]`.
pub fn vectorize(x: &CMat) -> CVec {
    let d = x.nrows();
    CVec::from_shape_fn(d * d, |k| x[(k % d, k / d)])
}

/// Inverse of [`vectorize`]. Errors when the length is not a perfect square
/// matching `dim`.
pub fn unvectorize(v: &CVec, dim: usize) -> Result<CMat> {
    if v.len() != dim * dim {
        return Err(Error::InvalidArgument(format!(
            "vector of length {} cannot be reshaped to {dim}x{dim}",
            v.len()
        )));
    }
    Ok(CMat::from_shape_fn((dim, dim), |(i, j)| v[j * dim + i]))
}

/// Tensor product of operators, A-major.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    Operator { dim: a.dim * b.dim, mat: kron(&a.mat, &b.mat) }
}

/// Partial trace over the B factor: `(Tr_B X)_{a,a'} = sum_b X_{(a,b),(a',b)}`.
pub fn partial_trace_b(x: &Operator, dim_a: usize, dim_b: usize) -> Result<Operator> {
    if x.dim != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of a dim-{} operator as {dim_a}x{dim_b}",
            x.dim
        )));
    }
    let mut out = CMat::zeros((dim_a, dim_a));
    for a in 0..dim_a {
        for a2 in 0..dim_a {
            let mut s = ZERO;
            for b in 0..dim_b {
                s += x.mat[(a * dim_b + b, a2 * dim_b + b)];
            }
            out[(a, a2)] = s;
        }
    }
    Ok(Operator { dim: dim_a, mat: out })
}

/// Matrix of the partial trace as a map `vec_joint -> vec_A`.
pub fn partial_trace_b_map(dim_a: usize, dim_b: usize) -> RectangularMap {
    let d = dim_a * dim_b;
    let mut m = CMat::zeros((dim_a * dim_a, d * d));
    for a in 0..dim_a {
        for a2 in 0..dim_a {
            for b in 0..dim_b {
                m[(a2 * dim_a + a, (a2 * dim_b + b) * d + (a * dim_b + b))] = ONE;
            }
        }
    }
    RectangularMap { out_dim: dim_a, in_dim: d, mat: m }
}

/// Superoperator of left multiplication, `X -> M X`.
pub fn left_mult(m: &CMat) -> CMat {
    kron(&CMat::eye(m.nrows()), m)
}

/// Superoperator of right multiplication, `X -> X M`.
pub fn right_mult(m: &CMat) -> CMat {
    kron(&m.t().to_owned(), &CMat::eye(m.nrows()))
}

/// Superoperator of the commutator, `X -> [H, X]`.
pub fn commutator_sop(h: &CMat) -> CMat {
    left_mult(h) - right_mult(h)
}

/// Superoperator of the dissipation channel
/// `X -> L X L^† - (L^†L X + X L^†L)/2`.
pub fn dissipator_sop(l: &CMat) -> CMat {
    let ldl = dagger(l).dot(l);
    let half = C64::new(0.5, 0.0);
    kron(&l.mapv(|z| z.conj()), l) - (left_mult(&ldl) + right_mult(&ldl)).mapv(|z| z * half)
}

/// Generalized two-operator channel `X -> P X Q^† - (Q^†P X + X Q^†P)/2`.
pub fn cross_dissipator_sop(p: &CMat, q: &CMat) -> CMat {
    let qdp = dagger(q).dot(p);
    let half = C64::new(0.5, 0.0);
    kron(&q.mapv(|z| z.conj()), p) - (left_mult(&qdp) + right_mult(&qdp)).mapv(|z| z * half)
}

/// Heisenberg-picture dissipation channel
/// `X -> L^† X L - (L^†L X + X L^†L)/2`.
pub fn adjoint_dissipator_sop(l: &CMat) -> CMat {
    let ldl = dagger(l).dot(l);
    let half = C64::new(0.5, 0.0);
    kron(&l.t().to_owned(), &dagger(l)) - (left_mult(&ldl) + right_mult(&ldl)).mapv(|z| z * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::ProptestConfig;
    use proptest::{prop_assert, proptest};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_cmat(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        CMat::from_shape_fn((n, n), |_| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
    }

    #[test]
    fn tensor_identities() {
        let i2 = Operator::identity(2);
        let i3 = Operator::identity(3);
        let i6 = tensor(&i2, &i3);
        assert_eq!(i6.mat, CMat::eye(6));

        let sz = Operator::new(ndarray::array![
            [ONE, ZERO],
            [ZERO, -ONE]
        ])
        .unwrap();
        let t = tensor(&sz, &i2);
        let expect = CMat::from_diag(&ndarray::arr1(&[ONE, ONE, -ONE, -ONE]));
        assert_eq!(t.mat, expect);
    }

    #[test]
    fn tensor_factors_multiply() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Operator::new(random_cmat(&mut rng, 2)).unwrap();
        let b = Operator::new(random_cmat(&mut rng, 3)).unwrap();
        let lhs = tensor(&a, &Operator::identity(3))
            .matmul(&tensor(&Operator::identity(2), &b));
        let rhs = tensor(&a, &b);
        assert_abs_diff_eq!(fro_norm(&(&lhs.mat - &rhs.mat)), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let a = random_cmat(&mut rng, 2);
            let b = random_cmat(&mut rng, 3);
            let c = random_cmat(&mut rng, 2);
            let d = random_cmat(&mut rng, 3);
            let lhs = kron(&a, &b).dot(&kron(&c, &d));
            let rhs = kron(&a.dot(&c), &b.dot(&d));
            let scale = fro_norm(&rhs).max(1.0);
            assert!(fro_norm(&(&lhs - &rhs)) <= 1e-13 * scale);
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho_s = Operator::new(random_cmat(&mut rng, 2)).unwrap();
        let mut rho_b = random_cmat(&mut rng, 3);
        let tr = rho_b.diag().sum();
        rho_b.mapv_inplace(|z| z / tr);
        let rho_b = Operator::new(rho_b).unwrap();
        let joint = tensor(&rho_s, &rho_b);
        let back = partial_trace_b(&joint, 2, 3).unwrap();
        assert_abs_diff_eq!(fro_norm(&(&back.mat - &rho_s.mat)), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn partial_trace_entangled_and_traceless() {
        // maximally entangled projector on 2x2 traces to I/2
        let mut bell = CMat::zeros((4, 4));
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(i, j)] = C64::new(0.5, 0.0);
        }
        let red = partial_trace_b(&Operator::new(bell).unwrap(), 2, 2).unwrap();
        let expect = CMat::eye(2).mapv(|z| z * C64::new(0.5, 0.0));
        assert_abs_diff_eq!(fro_norm(&(&red.mat - &expect)), 0.0, epsilon = 1e-14);

        // Tr_B(sx (x) sx) = 0 since sx is traceless
        let sx = ndarray::array![[ZERO, ONE], [ONE, ZERO]];
        let t = kron(&sx, &sx);
        let red = partial_trace_b(&Operator::new(t).unwrap(), 2, 2).unwrap();
        assert_abs_diff_eq!(fro_norm(&red.mat), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_dim_mismatch_rejected() {
        let x = Operator::identity(5);
        assert!(matches!(
            partial_trace_b(&x, 2, 3),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn vectorize_convention() {
        let i2 = CMat::eye(2);
        let v = vectorize(&i2);
        assert_eq!(v, ndarray::arr1(&[ONE, ZERO, ZERO, ONE]));
    }

    #[test]
    fn unvectorize_rejects_non_square_length() {
        let v = CVec::zeros(5);
        assert!(unvectorize(&v, 2).is_err());
    }

    fn cmat_from(entries: &[f64], d: usize) -> CMat {
        CMat::from_shape_fn((d, d), |(i, j)| {
            C64::new(entries[2 * (d * i + j)], entries[2 * (d * i + j) + 1])
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn vec_round_trip(entries in proptest::collection::vec(-1.0f64..1.0, 18)) {
            let x = cmat_from(&entries, 3);
            let back = unvectorize(&vectorize(&x), 3).unwrap();
            prop_assert!(fro_norm(&(&back - &x)) == 0.0);
        }

        #[test]
        fn vec_of_sandwich_is_kron_action(entries in proptest::collection::vec(-1.0f64..1.0, 24)) {
            // vec(A X B) = (B^T (x) A) vec(X)
            let a = cmat_from(&entries[0..8], 2);
            let x = cmat_from(&entries[8..16], 2);
            let b = cmat_from(&entries[16..24], 2);
            let lhs = vectorize(&a.dot(&x).dot(&b));
            let rhs = kron(&b.t().to_owned(), &a).dot(&vectorize(&x));
            let scale = vec_norm(&lhs).max(1.0);
            prop_assert!(vec_norm(&(&lhs - &rhs)) <= 1e-15 * scale);
        }
    }

    #[test]
    fn eigh_returns_true_column_eigenvectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_cmat(&mut rng, 4);
        let h = &a + &dagger(&a);
        let (w, v) = eigh_hermitian(&h).unwrap();
        for j in 0..4 {
            let col = v.column(j).to_owned();
            let resid = &h.dot(&col) - &col.mapv(|z| z * C64::new(w[j], 0.0));
            assert!(vec_norm(&resid) < 1e-12, "column {j} is not an eigenvector");
        }
        let unitary_defect = fro_norm(&(&v.dot(&dagger(&v)) - &CMat::eye(4)));
        assert!(unitary_defect < 1e-12);
    }

    #[test]
    fn partial_trace_of_tensor_scales_by_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let x = Operator::new(random_cmat(&mut rng, 3)).unwrap();
            let y = Operator::new(random_cmat(&mut rng, 4)).unwrap();
            let red = partial_trace_b(&tensor(&x, &y), 3, 4).unwrap();
            let expect = x.scale(y.trace());
            let scale = expect.norm_fro().max(1.0);
            assert!(red.sub(&expect).norm_fro() <= 1e-13 * scale);
        }
    }

    #[test]
    fn ptrace_map_matches_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = partial_trace_b_map(2, 3);
        let x = Operator::new(random_cmat(&mut rng, 6)).unwrap();
        let via_map = p.apply(&x).unwrap();
        let direct = partial_trace_b(&x, 2, 3).unwrap();
        assert_abs_diff_eq!(via_map.sub(&direct).norm_fro(), 0.0, epsilon = 1e-14);
    }
}

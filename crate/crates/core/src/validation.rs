// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force verification: integrate the full bipartite master equation,
//! compare against the reduced dynamics, fit coupling-strength scaling
//! exponents of the generator defect, and pair slow spectra.

use ndarray_linalg::{EigVals, SVD};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{reduce, ReducedModel, SylvesterMethod};
use crate::error::{Error, Result};
use crate::linalg::{dagger, partial_trace_b_map, vectorize, CMat, Operator, Propagator, C64};
use crate::model::BipartiteModel;
use crate::quad::QuadratureConfig;

/// Sum of singular values.
pub fn trace_norm(x: &CMat) -> f64 {
    match x.svd(false, false) {
        Ok((_, sv, _)) => sv.sum(),
        Err(_) => f64::NAN,
    }
}

/// Hermitian positive trace-one sample, built by normalizing `M M^†` for a
/// square random complex `M`.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
    let m = CMat::from_shape_fn((dim, dim), |_| {
        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let rho = m.dot(&dagger(&m));
    let tr = rho.diag().sum();
    Operator { dim, mat: rho.mapv(|z| z / tr) }
}

fn check_density(rho: &Operator) -> Result<()> {
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "initial state trace {tr} is off unity by more than 1e-10"
        )));
    }
    if !rho.is_hermitian(1e-10) {
        return Err(Error::InvalidArgument("initial state is not Hermitian".into()));
    }
    let (w, _) = crate::linalg::eigh_hermitian(&rho.mat)?;
    if let Some(min) = w.iter().cloned().reduce(f64::min) {
        if min < -1e-10 {
            return Err(Error::InvalidArgument(format!(
                "initial state has negative eigenvalue {min:.3e}"
            )));
        }
    }
    Ok(())
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times[0] < 0.0 {
        return Err(Error::InvalidArgument("time grid must be nonnegative and increasing".into()));
    }
    Ok(())
}

/// Reference solution of the full master equation through the exact
/// propagator (no step error).
///
/// The generator conserves the trace identically; eigenvector round-off can
/// still leak ~1e-10 of it at desk dimensions, so the conserved quantity is
/// renormalized back and Hermiticity restored. Drifts beyond 1e-8 indicate a
/// genuine propagation failure and abort. The returned states satisfy the
/// 1e-10 trace contract.
pub fn integrate_full(
    model: &BipartiteModel,
    rho0: &Operator,
    times: &[f64],
) -> Result<Vec<Operator>> {
    if rho0.dim != model.joint_dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial state dim {} vs joint dim {}",
            rho0.dim,
            model.joint_dim()
        )));
    }
    check_density(rho0)?;
    check_grid(times)?;
    let gen = model.full_liouvillian();
    let mut prop = Propagator::new(&gen.mat)?;
    prop.snap_kernel(1e-12);
    let v0 = vectorize(&rho0.mat);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let v = prop.apply(t, &v0)?;
        let rho = crate::linalg::unvectorize(&v, rho0.dim)?;
        let tr = rho.diag().sum();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-8 {
            return Err(Error::Numerical(format!(
                "propagated trace drifted to {tr} at t = {t}"
            )));
        }
        let herm = (&rho + &dagger(&rho)).mapv(|z| z * 0.5);
        let tr_h = herm.diag().sum().re;
        out.push(Operator { dim: rho0.dim, mat: herm.mapv(|z| z / tr_h) });
    }
    Ok(out)
}

/// How the joint initial state is built from the retained-system state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointInit {
    /// On the invariant manifold: `K(rho_s)` summed to the reduced order.
    Corrected,
    /// Bare product with the fast steady state.
    Product,
}

/// One point of a trajectory comparison.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyPoint {
    pub t: f64,
    /// Trace-norm distance between `Tr_B rho_full(t)` and the reduced state.
    pub discrepancy: f64,
}

/// Evolve `rho_s` under the truncated reduced generator and the embedded
/// joint state under the full generator; report the trace-norm discrepancy
/// of the partial trace over the grid.
pub fn compare_reduced(
    reduced: &ReducedModel,
    rho_s0: &Operator,
    times: &[f64],
    init: JointInit,
) -> Result<Vec<DiscrepancyPoint>> {
    check_grid(times)?;
    let model = &reduced.model;
    if rho_s0.dim != model.dim_a {
        return Err(Error::DimensionMismatch("rho_s dimension mismatch".into()));
    }
    let order = reduced.max_order();
    let joint0 = match init {
        JointInit::Corrected => reduced.correction_up_to(order).apply(rho_s0)?,
        JointInit::Product => {
            crate::linalg::tensor(rho_s0, &reduced.rho_bar)
        }
    };
    let mut full_prop = Propagator::new(&model.full_liouvillian().mat)?;
    full_prop.snap_kernel(1e-12);
    let mut red_prop = Propagator::new(&reduced.generator_up_to(order).mat)?;
    red_prop.snap_kernel(1e-12);
    let ptrace = partial_trace_b_map(model.dim_a, model.dim_b);
    let vj = vectorize(&joint0.mat);
    let vs = vectorize(&rho_s0.mat);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let full_t = full_prop.apply(t, &vj)?;
        let red_t = red_prop.apply(t, &vs)?;
        let traced = ptrace.mat.dot(&full_t);
        let diff = crate::linalg::unvectorize(&(&traced - &red_t), model.dim_a)?;
        out.push(DiscrepancyPoint { t, discrepancy: trace_norm(&diff) });
    }
    Ok(out)
}

/// Pairing of the slow block of the full spectrum with the reduced spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralPairing {
    pub slow_full: Vec<[f64; 2]>,
    pub reduced: Vec<[f64; 2]>,
    /// `(full index, reduced index, distance)` per greedy match.
    pub pairs: Vec<(usize, usize, f64)>,
    pub max_distance: f64,
    /// Ratio of the slowest fast decay to the fastest slow decay.
    pub separation: f64,
}

/// Pair the `dim_a^2` eigenvalues of the full generator closest to the
/// imaginary axis with the eigenvalues of the truncated reduced generator.
/// Greedy matching on the global minimum distance with conflict resolution
/// by exclusion.
pub fn slow_spectrum_compare(
    model: &BipartiteModel,
    reduced: &ReducedModel,
    order: usize,
) -> Result<SpectralPairing> {
    let full = model.full_liouvillian();
    let vals = full.mat.eigvals()?;
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].re.abs().partial_cmp(&vals[b].re.abs()).unwrap());
    let n_slow = model.dim_a * model.dim_a;
    if vals.len() < 2 * n_slow {
        return Err(Error::NoSeparation("joint space too small to split".into()));
    }
    let slow: Vec<C64> = idx[..n_slow].iter().map(|&i| vals[i]).collect();
    let max_slow_re = slow.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let min_fast_re = idx[n_slow..]
        .iter()
        .map(|&i| vals[i].re.abs())
        .fold(f64::INFINITY, f64::min);
    let separation = if max_slow_re > 0.0 { min_fast_re / max_slow_re } else { f64::INFINITY };
    if separation < 5.0 {
        return Err(Error::NoSeparation(format!(
            "slowest fast rate {min_fast_re:.3e} is only {separation:.2}x the largest slow rate {max_slow_re:.3e}"
        )));
    }
    let red_gen = reduced.generator_up_to(order);
    let red_vals = red_gen.mat.eigvals()?;
    let red: Vec<C64> = red_vals.to_vec();

    let mut pairs = Vec::with_capacity(n_slow);
    let mut used_f = vec![false; slow.len()];
    let mut used_r = vec![false; red.len()];
    let mut max_distance = 0.0f64;
    for _ in 0..n_slow {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..slow.len() {
            if used_f[i] {
                continue;
            }
            for j in 0..red.len() {
                if used_r[j] {
                    continue;
                }
                let d = (slow[i] - red[j]).norm();
                if best.map_or(true, |(_, _, bd)| d < bd) {
                    best = Some((i, j, d));
                }
            }
        }
        let (i, j, d) = best.expect("pairing candidates remain");
        used_f[i] = true;
        used_r[j] = true;
        max_distance = max_distance.max(d);
        pairs.push((i, j, d));
    }
    Ok(SpectralPairing {
        slow_full: slow.iter().map(|z| [z.re, z.im]).collect(),
        reduced: red.iter().map(|z| [z.re, z.im]).collect(),
        pairs,
        max_distance,
        separation,
    })
}

/// Log-log fit of the generator defect against the coupling strength.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the fitted slope.
    pub slope_stderr: f64,
    /// `(g, defect)` pairs that entered the fit.
    pub points: Vec<(f64, f64)>,
    pub warning: Option<String>,
}

/// Sweep the coupling strength over a model family, measure the slow-block
/// generator defect through matched eigenvalues at the given truncation
/// order, and fit the scaling exponent. Zero or negative couplings are
/// excluded from the logarithmic fit.
pub fn scaling_study(
    family: &(dyn Fn(f64) -> Result<BipartiteModel> + Sync),
    g_values: &[f64],
    order: usize,
    method: SylvesterMethod,
    q: &QuadratureConfig,
) -> Result<ScalingFit> {
    let usable: Vec<f64> = g_values.iter().cloned().filter(|&g| g > 0.0).collect();
    if usable.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "scaling fit needs at least 5 positive couplings, got {}",
            usable.len()
        )));
    }
    let (lo, hi) = usable
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &g| (lo.min(g), hi.max(g)));
    if hi / lo < 10.0 - 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "scaling fit needs couplings spanning at least a decade, got {lo:.3e}..{hi:.3e}"
        )));
    }
    let points: Vec<(f64, f64)> = usable
        .par_iter()
        .map(|&g| -> Result<(f64, f64)> {
            let model = family(g)?;
            let red = reduce(&model, order, method, q)?;
            let pairing = slow_spectrum_compare(&model, &red, order)?;
            Ok((g, pairing.max_distance))
        })
        .collect::<Result<Vec<_>>>()?;

    // least squares on log-log coordinates
    let xs: Vec<f64> = points.iter().map(|(g, _)| g.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, d)| d.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let dof = (xs.len().max(3) - 2) as f64;
    let slope_stderr = (rss / dof / sxx).sqrt();
    let warning = (slope_stderr > 0.5).then(|| {
        format!("inconclusive fit: slope standard error {slope_stderr:.2} exceeds 0.5")
    });
    Ok(ScalingFit { slope, intercept, slope_stderr, points, warning })
}

/// Aggregated validation output, serialized by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub order: usize,
    pub epsilon: f64,
    pub trajectory: Vec<TrajectoryBlock>,
    pub scaling: Option<ScalingFit>,
    pub spectral: Vec<SpectralBlock>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryBlock {
    pub g: f64,
    pub points: Vec<DiscrepancyPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralBlock {
    pub g: f64,
    pub max_pairing_distance: f64,
    pub separation: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{reduce, SylvesterMethod};
    use crate::linalg::{fro_norm, tensor, Operator, ONE, ZERO};
    use crate::model::{boson_ops, damped_mode_spec, qubit_ops, steady_state, lindbladian, BipartiteModel};
    use approx::assert_abs_diff_eq;

    fn jc_model(delta: f64, n_th: f64, kphi: f64, g: f64, cutoff: usize) -> BipartiteModel {
        let q = qubit_ops();
        let spec = damped_mode_spec(delta, 1.0, kphi, n_th, cutoff).unwrap();
        let (b, bd, _) = boson_ops(cutoff).unwrap();
        BipartiteModel::new(Operator::zeros(2), spec, vec![(q.raise, b), (q.lower, bd)], g).unwrap()
    }

    fn labframe_model(omega_b: f64, omega_eg: f64, n_th: f64, kphi: f64, g: f64, cutoff: usize) -> BipartiteModel {
        let q = qubit_ops();
        let spec = damped_mode_spec(omega_b, 1.0, kphi, n_th, cutoff).unwrap();
        let (b, bd, _) = boson_ops(cutoff).unwrap();
        let h_a = q.z.scale(C64::new(-omega_eg / 2.0, 0.0));
        BipartiteModel::new(h_a, spec, vec![(q.x, b.add(&bd))], g).unwrap()
    }

    #[test]
    fn integrate_full_validates_inputs() {
        let model = jc_model(0.3, 0.0, 0.0, 0.05, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho0 = random_density(&mut rng, 12);
        assert!(integrate_full(&model, &rho0, &[0.0, 1.0, 0.5]).is_err());
        let bad = Operator::identity(12); // trace 12
        assert!(integrate_full(&model, &bad, &[0.0, 1.0]).is_err());
        let mut neg = rho0.mat.clone();
        neg[(0, 0)] -= C64::new(0.4, 0.0);
        neg[(1, 1)] += C64::new(0.4, 0.0);
        // still trace 1 and Hermitian but indefinite for this draw
        let cand = Operator { dim: 12, mat: neg };
        let (w, _) = crate::linalg::eigh_hermitian(&cand.mat).unwrap();
        if w.iter().cloned().fold(f64::INFINITY, f64::min) < -1e-6 {
            assert!(integrate_full(&model, &cand, &[0.0, 1.0]).is_err());
        }
    }

    #[test]
    fn integrate_full_decoupled_evolution() {
        // g = 0: the reduced state follows the bare rotation of H_A
        let model = labframe_model(2.0, 1.3, 0.2, 0.1, 0.0, 6);
        let rho_bar = steady_state(&lindbladian(&model.spec_b)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho_s = random_density(&mut rng, 2);
        let rho0 = tensor(&rho_s, &rho_bar);
        let times = [0.0, 0.4, 1.1, 2.7];
        let traj = integrate_full(&model, &rho0, &times).unwrap();
        for (k, &t) in times.iter().enumerate() {
            let red = crate::linalg::partial_trace_b(&traj[k], 2, 6).unwrap();
            let expect = crate::linalg::conjugate_by_unitary(&model.h_a.mat, &rho_s.mat, t).unwrap();
            assert!(fro_norm(&(&red.mat - &expect)) < 1e-10);
            assert!((traj[k].trace() - ONE).norm() < 1e-10);
        }
    }

    #[test]
    fn compare_reduced_zero_coupling_and_band() {
        let q = QuadratureConfig::default();
        // g = 0: zero discrepancy to round-off
        let model = jc_model(0.3, 0.2, 0.1, 0.0, 8);
        let red = reduce(&model, 2, SylvesterMethod::Direct, &q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho_s0 = random_density(&mut rng, 2);
        let times: Vec<f64> = (0..6).map(|i| i as f64 * 2.0).collect();
        let pts = compare_reduced(&red, &rho_s0, &times, JointInit::Corrected).unwrap();
        for p in &pts {
            assert!(p.discrepancy < 1e-11, "t = {}: {}", p.t, p.discrepancy);
        }

        // order-2 band at g = 0.05: the long-run discrepancy stays below
        // 10 (g/kappa)^3 (constant calibrated once against this oracle)
        let model = jc_model(0.3, 0.2, 0.1, 0.05, 12);
        let red = reduce(&model, 2, SylvesterMethod::Direct, &q).unwrap();
        let times: Vec<f64> = (0..=25).map(|i| i as f64 * 2.0).collect();
        let pts = compare_reduced(&red, &rho_s0, &times, JointInit::Corrected).unwrap();
        let max_d = pts.iter().map(|p| p.discrepancy).fold(0.0, f64::max);
        assert!(max_d < 10.0 * 0.05f64.powi(3), "max discrepancy {max_d:.3e}");

        // manifold initialization beats the bare product at matched order
        let pts_prod = compare_reduced(&red, &rho_s0, &times, JointInit::Product).unwrap();
        let max_p = pts_prod.iter().map(|p| p.discrepancy).fold(0.0, f64::max);
        assert!(max_d < max_p, "manifold {max_d:.3e} vs product {max_p:.3e}");
    }

    #[test]
    fn slow_spectrum_decoupled_is_exact_bohr_set() {
        let model = labframe_model(2.0, 1.1, 0.0, 0.0, 0.0, 6);
        let q = QuadratureConfig::default();
        let red = reduce(&model, 2, SylvesterMethod::Direct, &q).unwrap();
        let pairing = slow_spectrum_compare(&model, &red, 2).unwrap();
        // slow eigenvalues are exactly i(w_n - w_m) of H_A: {0, 0, ±i w_eg}
        let mut imag: Vec<f64> = pairing.slow_full.iter().map(|z| z[1]).collect();
        imag.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [-1.1, 0.0, 0.0, 1.1];
        for (a, b) in imag.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
        for z in &pairing.slow_full {
            assert!(z[0].abs() < 1e-10);
        }
        assert!(pairing.max_distance < 1e-9);
    }

    #[test]
    fn slow_spectrum_no_separation_detected() {
        // coupling as large as the damping destroys the split
        let model = jc_model(0.3, 0.0, 0.0, 1.0, 6);
        let q = QuadratureConfig::default();
        let red = reduce(&model, 0, SylvesterMethod::Direct, &q).unwrap();
        match slow_spectrum_compare(&model, &red, 0) {
            Err(Error::NoSeparation(_)) => {}
            other => panic!("expected separation failure, got {other:?}"),
        }
    }

    #[test]
    fn labframe_flat_qubit_keeps_one_extra_zero() {
        // omega_eg = 0: the x coordinate is conserved, so the slow block has
        // a second exactly-zero eigenvalue beyond the trace direction
        let model = labframe_model(2.0, 0.0, 0.3, 0.1, 0.04, 10);
        let q = QuadratureConfig::default();
        let red = reduce(&model, 2, SylvesterMethod::Direct, &q).unwrap();
        let gen = red.generator_up_to(2);
        let vals = gen.mat.eigvals().unwrap();
        let zeros = vals.iter().filter(|z| z.norm() < 1e-12).count();
        assert!(zeros >= 2, "reduced spectrum {vals:?}");
    }

    #[test]
    fn excited_population_decay_rate() {
        // vacuum bath: fitted decay of the excited population matches the
        // closed-form rate 4 g^2 kappa / |gamma|^2 within 5 percent
        let (delta, g) = (0.4, 0.02);
        let model = jc_model(delta, 0.0, 0.0, g, 10);
        let rho_bar = steady_state(&lindbladian(&model.spec_b)).unwrap();
        let ee = Operator::new(ndarray::array![[ZERO, ZERO], [ZERO, ONE]]).unwrap();
        let rho0 = tensor(&ee, &rho_bar);
        let rate = 4.0 * g * g / C64::new(1.0, 2.0 * delta).norm_sqr();
        let times: Vec<f64> = (1..=30).map(|i| i as f64 * 0.1 / rate).collect();
        let traj = integrate_full(&model, &rho0, &times).unwrap();
        let pops: Vec<f64> = traj
            .iter()
            .map(|r| crate::linalg::partial_trace_b(r, 2, 10).unwrap().mat[(1, 1)].re)
            .collect();
        let n = times.len() as f64;
        let sx: f64 = times.iter().sum();
        let sy: f64 = pops.iter().map(|p| p.ln()).sum();
        let sxx: f64 = times.iter().map(|t| t * t).sum();
        let sxy: f64 = times.iter().zip(&pops).map(|(t, p)| t * p.ln()).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let fitted = -slope;
        assert!(
            (fitted - rate).abs() <= 0.05 * rate,
            "fitted {fitted:.4e} vs predicted {rate:.4e}"
        );
    }

    #[test]
    fn scaling_study_validates_inputs_and_reproducibility() {
        let q = QuadratureConfig::default();
        let family = |g: f64| -> Result<BipartiteModel> { Ok(jc_model(0.5, 0.2, 0.1, g, 8)) };
        // too few values
        assert!(scaling_study(&family, &[0.01, 0.02, 0.0, -0.1], 0, SylvesterMethod::Direct, &q).is_err());
        // too narrow a span
        assert!(scaling_study(&family, &[0.01, 0.012, 0.014, 0.016, 0.018], 0, SylvesterMethod::Direct, &q).is_err());
        // zero values are dropped from the fit
        let gs = [0.0, 0.01, 0.02, 0.04, 0.07, 0.1];
        let fit = scaling_study(&family, &gs, 0, SylvesterMethod::Direct, &q).unwrap();
        assert_eq!(fit.points.len(), 5);
        let fit2 = scaling_study(&family, &gs, 0, SylvesterMethod::Direct, &q).unwrap();
        assert_eq!(
            fit.points.iter().map(|p| p.1.to_bits()).collect::<Vec<_>>(),
            fit2.points.iter().map(|p| p.1.to_bits()).collect::<Vec<_>>(),
            "defect curve must be bit-for-bit reproducible"
        );
    }

    #[test]
    fn full_propagation_preserves_positivity() {
        let model = labframe_model(3.0, 2.0, 0.3, 0.2, 0.05, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let rho_s = random_density(&mut rng, 2);
        let rho_bar = steady_state(&lindbladian(&model.spec_b)).unwrap();
        let rho0 = tensor(&rho_s, &rho_bar);
        let traj = integrate_full(&model, &rho0, &[0.5, 5.0, 50.0]).unwrap();
        for r in &traj {
            let (w, _) = crate::linalg::eigh_hermitian(&r.mat).unwrap();
            let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-9, "negative population {min:.3e}");
        }
    }
}

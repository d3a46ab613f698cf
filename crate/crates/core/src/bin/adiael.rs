// Copyright 2026 Adiael Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line interface: model reduction, brute-force validation, and the
//! closed-form reference models.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use adiael_core::config::ModelConfig;
use adiael_core::engine::reduce;
use adiael_core::error::{Error, Result};
use adiael_core::linalg::C64;
use adiael_core::oracles::{bloch_form, jc_reduced, labframe_reduced, JcParams, LabFrameParams};
use adiael_core::report::{
    to_json_string, write_csv, MatrixDoc, ReduceDoc, ValidateDoc, ORACLE_SCHEMA, VALIDATE_SCHEMA,
};
use adiael_core::validation::{
    compare_reduced, random_density, scaling_study, slow_spectrum_compare, JointInit,
    SpectralBlock, TrajectoryBlock, ValidationReport,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "adiael",
    version,
    about = "Adiabatic elimination of fast-decaying quantum subsystems"
)]
struct Cli {
    /// Worker-thread cap; overrides the ADIAEL_THREADS environment variable.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the reduced model from a config file and write it as JSON.
    Reduce {
        /// Model configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output document path.
        #[arg(long)]
        out: PathBuf,
        /// Override the expansion order from the config.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Compare reduced dynamics against the full master equation.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Output base path: writes `<out>.csv` and `<out>.json`.
        #[arg(long)]
        out: PathBuf,
        /// Coupling sweep `start:stop:count` (log-spaced); enables the
        /// scaling fit and per-coupling spectral comparison.
        #[arg(long = "g-sweep")]
        g_sweep: Option<String>,
        /// Time grid `start:stop:count` in units of 1/kappa (default 0:50:26).
        #[arg(long)]
        times: Option<String>,
        /// Seed for the random initial retained-system state.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Print a closed-form reduced model.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Resonant exchange coupling in the rotating frame.
    Jc(JcArgs),
    /// Dipolar coupling in the lab frame, with the Bloch form.
    Labframe(LabframeArgs),
}

#[derive(Args)]
struct JcArgs {
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 0.0)]
    kappa_phi: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.0)]
    n_th: f64,
    #[arg(long)]
    g: f64,
}

#[derive(Args)]
struct LabframeArgs {
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 0.0)]
    kappa_phi: f64,
    #[arg(long)]
    omega_b: f64,
    #[arg(long)]
    omega_eg: f64,
    #[arg(long, default_value_t = 0.0)]
    n_th: f64,
    #[arg(long)]
    g: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = setup_threads(cli.threads) {
        eprintln!("adiael: {e}");
        return ExitCode::from(2);
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("adiael: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn setup_threads(flag: Option<usize>) -> Result<()> {
    let from_env = std::env::var("ADIAEL_THREADS")
        .ok()
        .map(|v| {
            v.parse::<usize>().map_err(|_| {
                Error::InvalidArgument(format!("ADIAEL_THREADS = {v:?} is not a thread count"))
            })
        })
        .transpose()?;
    // LAPACK drivers want several MB of stack per worker
    let mut builder = rayon::ThreadPoolBuilder::new().stack_size(32 * 1024 * 1024);
    if let Some(n) = flag.or(from_env) {
        if n == 0 {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool setup failed: {e}")))
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Reduce { config, out, order } => cmd_reduce(&config, &out, order),
        Cmd::Validate { config, out, g_sweep, times, seed, order } => {
            cmd_validate(&config, &out, g_sweep.as_deref(), times.as_deref(), seed, order)
        }
        Cmd::Oracle { which } => cmd_oracle(which),
    }
}

fn load_config(path: &PathBuf) -> Result<ModelConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ModelConfig::from_json(&text)
}

fn cmd_reduce(config: &PathBuf, out: &PathBuf, order_flag: Option<usize>) -> Result<()> {
    let cfg = load_config(config)?;
    let resolved = cfg.resolve()?;
    let order = order_flag.unwrap_or(resolved.order);
    let red = reduce(&resolved.model, order, resolved.method, &resolved.quad)?;
    let doc = ReduceDoc::from_reduced(&red);
    std::fs::write(out, to_json_string(&doc)?)?;
    for w in &red.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

/// Parse `start:stop:count` into a grid; log-spaced when `log` is set.
fn parse_grid(text: &str, log: bool) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "grid {text:?} must have the form start:stop:count"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad grid start {:?}", parts[0])))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad grid stop {:?}", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad grid count {:?}", parts[2])))?;
    if count < 2 || stop <= start {
        return Err(Error::InvalidArgument(format!("degenerate grid {text:?}")));
    }
    if log && start <= 0.0 {
        return Err(Error::InvalidArgument("log grid needs a positive start".into()));
    }
    let mut grid = Vec::with_capacity(count);
    for i in 0..count {
        let f = i as f64 / (count - 1) as f64;
        grid.push(if log {
            (start.ln() + f * (stop.ln() - start.ln())).exp()
        } else {
            start + f * (stop - start)
        });
    }
    Ok(grid)
}

fn cmd_validate(
    config: &PathBuf,
    out: &PathBuf,
    g_sweep: Option<&str>,
    times: Option<&str>,
    seed: u64,
    order_flag: Option<usize>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let resolved = cfg.resolve()?;
    let order = order_flag.unwrap_or(resolved.order);
    let kappa_ref = resolved.model.spec_b.reference_rate().max(f64::MIN_POSITIVE);
    let time_grid: Vec<f64> = match times {
        Some(t) => parse_grid(t, false)?,
        None => parse_grid("0.0:50.0:26", false)?,
    }
    .into_iter()
    .map(|t| t / kappa_ref)
    .collect();
    let gs = match g_sweep {
        Some(s) => parse_grid(s, true)?,
        None => vec![resolved.model.g],
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho_s0 = random_density(&mut rng, resolved.model.dim_a);

    let mut trajectory = Vec::new();
    let mut spectral = Vec::new();
    let mut warnings = Vec::new();
    for &g in &gs {
        let mut model = resolved.model.clone();
        model.g = g;
        let red = reduce(&model, order, resolved.method, &resolved.quad)?;
        warnings.extend(red.warnings.iter().cloned());
        let points = compare_reduced(&red, &rho_s0, &time_grid, JointInit::Corrected)?;
        trajectory.push(TrajectoryBlock { g, points });
        if g > 0.0 {
            match slow_spectrum_compare(&model, &red, order) {
                Ok(p) => spectral.push(SpectralBlock {
                    g,
                    max_pairing_distance: p.max_distance,
                    separation: p.separation,
                }),
                Err(Error::NoSeparation(msg)) => {
                    warnings.push(format!("g = {g}: no spectral separation: {msg}"))
                }
                Err(e) => return Err(e),
            }
        }
    }

    let scaling = if gs.len() >= 5 {
        let base = resolved.model.clone();
        let family = move |g: f64| -> Result<adiael_core::model::BipartiteModel> {
            let mut m = base.clone();
            m.g = g;
            Ok(m)
        };
        match scaling_study(&family, &gs, order, resolved.method, &resolved.quad) {
            Ok(fit) => {
                if let Some(w) = &fit.warning {
                    warnings.push(w.clone());
                }
                Some(fit)
            }
            Err(Error::InvalidArgument(msg)) => {
                warnings.push(format!("scaling fit skipped: {msg}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    warnings.dedup();
    let report = ValidationReport {
        seed,
        order,
        epsilon: resolved.model.epsilon(),
        trajectory,
        scaling,
        spectral,
        warnings,
    };

    // CSV: one row per (g, t)
    let mut rows = Vec::new();
    for block in &report.trajectory {
        for p in &block.points {
            rows.push(vec![
                format!("{}", block.g),
                format!("{}", p.t),
                format!("{}", p.discrepancy),
            ]);
        }
    }
    let csv = write_csv(&["g", "t", "trace_norm_discrepancy"], &rows);
    std::fs::write(out.with_extension("csv"), csv)?;
    let doc = ValidateDoc { schema: VALIDATE_SCHEMA.to_string(), report };
    std::fs::write(out.with_extension("json"), to_json_string(&doc)?)?;
    Ok(())
}

fn cmd_oracle(which: OracleCmd) -> Result<()> {
    match which {
        OracleCmd::Jc(a) => {
            let p = JcParams {
                kappa: a.kappa,
                kappa_phi: a.kappa_phi,
                delta: a.delta,
                n_th: a.n_th,
                g: a.g,
            };
            let gen = jc_reduced(&p, None)?;
            let gamma = p.gamma();
            let weight = 4.0 * p.g * p.g / gamma.norm_sqr();
            let doc = serde_json::json!({
                "schema": ORACLE_SCHEMA,
                "model": "jc",
                "gamma": [gamma.re, gamma.im],
                "decay_rate": (1.0 + p.n_th) * (p.kappa + p.kappa_phi) * weight,
                "excitation_rate": p.n_th * (p.kappa + p.kappa_phi) * weight,
                "sigma_z_half_coefficient": (1.0 + 2.0 * p.n_th) * p.delta * weight,
                "generator": MatrixDoc::from_cmat(&gen.mat),
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        OracleCmd::Labframe(a) => {
            let p = LabFrameParams {
                kappa: a.kappa,
                kappa_phi: a.kappa_phi,
                omega_b: a.omega_b,
                omega_eg: a.omega_eg,
                n_th: a.n_th,
                g: a.g,
            };
            let lf = labframe_reduced(&p)?;
            let bloch = bloch_form(&p)?;
            let (gp, gm) = p.gamma_pm();
            let det = lf.x[0][0] * lf.x[1][1] - lf.x[0][1] * lf.x[1][0];
            let trace = lf.x[0][0] + lf.x[1][1];
            let x_mat = adiael_core::linalg::CMat::from_shape_fn((2, 2), |(i, j)| lf.x[i][j]);
            let s = singular_values_2x2(&lf.x);
            let rank = s.iter().filter(|&&v| v > 1e-12 * s[0].max(1e-300)).count();
            let doc = serde_json::json!({
                "schema": ORACLE_SCHEMA,
                "model": "labframe",
                "gamma_plus": [gp.re, gp.im],
                "gamma_minus": [gm.re, gm.im],
                "x": MatrixDoc::from_cmat(&x_mat),
                "y": lf.y,
                "det_x": det.re,
                "trace_x": trace.re,
                "rank_x": rank,
                "bloch": bloch,
                "generator": MatrixDoc::from_cmat(&lf.generator.mat),
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }
    Ok(())
}

/// Singular values of a 2x2 complex matrix from its Gram spectrum.
fn singular_values_2x2(x: &[[C64; 2]; 2]) -> [f64; 2] {
    let g00 = x[0][0].norm_sqr() + x[1][0].norm_sqr();
    let g11 = x[0][1].norm_sqr() + x[1][1].norm_sqr();
    let g01 = x[0][0].conj() * x[0][1] + x[1][0].conj() * x[1][1];
    let tr = g00 + g11;
    let disc = ((g00 - g11) * (g00 - g11) + 4.0 * g01.norm_sqr()).sqrt();
    [
        (0.5 * (tr + disc)).max(0.0).sqrt(),
        (0.5 * (tr - disc)).max(0.0).sqrt(),
    ]
}

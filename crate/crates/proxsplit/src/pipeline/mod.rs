//! End-to-end restoration pipeline behind the command-line surface.
//!
//! `simulate` degrades a ground-truth image (blur plus noise) and writes the
//! observation; `restore` assembles the penalized data-fit objective over
//! frame coefficients and runs one of the two nested solvers; `validate`
//! executes the whole invariant suite at desk scale; `prox` is a scalar
//! proximity-operator calculator for debugging.
//!
//! The observation travels in two files: a full-precision `.f64` matrix (the
//! values the solver consumes) and an 8/16-bit PGM preview. A sidecar
//! key-value file records the degradation provenance (family, alpha, seed,
//! blur) so `restore` rebuilds the exact likelihood it was simulated under.

pub mod config;
pub mod validate;

use crate::imaging::{
    degrade, opnorm_estimate, pgm, snr, BlurOp, FrameBoxConstraint, FrameOp, ImageGrid,
    ImagingError, NoiseKind, Subband,
};
use crate::nested::{solve_dr_outer, solve_fb_outer, CompositeProblem, OuterConfig, RunReport, SolverError};
use crate::noise::{DataTerm, LinearChain, NoiseError, NoiseModel, Observation};
use crate::ops::{BoxConstraint, QuadraticDistance};
use crate::prox::{ClosedInterval, Power, ProxError, ScalarPotential, SeparableSpec};
use config::{Algorithm, ConfigError, PotentialConfig, ProblemKind, RunConfig};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Io(#[from] pgm::IoError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Prox(#[from] ProxError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("metadata file {path}: {reason}")]
    Meta { path: String, reason: String },
    #[error("input image {path}: sample {value} outside [0, 255] at pixel {index}")]
    OutOfRangeInput {
        path: String,
        index: usize,
        value: f64,
    },
    #[error("cannot create output directory {path}: {source}")]
    OutDir {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    /// Process exit code: solver failures are 1, usage/validation errors 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Solver(_) => 1,
            _ => 2,
        }
    }
}

/// Blur-of-synthesis chain `T F*` with adjoint `F T*`.
pub struct ImagingChain {
    pub blur: BlurOp,
    pub frame: FrameOp,
}

impl LinearChain for ImagingChain {
    fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.blur.apply(&self.frame.synthesis(x)).data
    }

    fn adjoint(&self, u: &[f64]) -> Vec<f64> {
        let (w, h) = self.frame.image_size();
        self.frame
            .analysis(&self.blur.adjoint(&ImageGrid::new(w, h, u.to_vec())))
    }
}

/// Operator-norm estimate of the blur-of-synthesis chain, deterministic and
/// tight enough to drive step sizes and the Lipschitz audit.
pub fn chain_opnorm(blur: &BlurOp, frame: &FrameOp, iters: usize) -> f64 {
    let chain = ImagingChain {
        blur: *blur,
        frame: frame.clone(),
    };
    opnorm_estimate(
        |x| chain.forward(x),
        |u| chain.adjoint(u),
        frame.coeff_len(),
        iters,
        0x9e37,
    )
}

/// Per-coefficient potentials from the config: detail subbands take the main
/// weights (with optional per-level overrides), the coarse approximation band
/// its own optional override.
pub fn build_potentials(
    frame: &FrameOp,
    detail: PotentialConfig,
    approx: Option<PotentialConfig>,
    levels: &[Option<PotentialConfig>],
) -> Result<Vec<ScalarPotential>, ProxError> {
    let approx = approx.unwrap_or(detail);
    frame
        .subband_map()
        .iter()
        .map(|band| {
            let p = match band {
                Subband::Approx => approx,
                Subband::Detail { level, .. } => levels
                    .get(level - 1)
                    .copied()
                    .flatten()
                    .unwrap_or(detail),
            };
            ScalarPotential::new(p.chi, p.omega, p.p)
        })
        .collect()
}

fn ensure_dir(out: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(out).map_err(|e| PipelineError::OutDir {
        path: out.display().to_string(),
        source: e,
    })
}

fn write_kv(path: &Path, pairs: &[(&str, String)]) -> Result<(), PipelineError> {
    let mut text = String::new();
    for (k, v) in pairs {
        writeln!(text, "{k} = {v}").expect("string write");
    }
    pgm::write_atomic(path, text.as_bytes())?;
    Ok(())
}

fn read_kv(path: &Path) -> Result<Vec<(String, String)>, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Meta {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let mut pairs = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(PipelineError::Meta {
                path: path.display().to_string(),
                reason: format!("expected 'key = value', got: {line}"),
            });
        };
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Files written by [`cmd_simulate`].
#[derive(Clone, Debug)]
pub struct SimulatePaths {
    pub observation_data: PathBuf,
    pub observation_preview: PathBuf,
    pub observation_meta: PathBuf,
}

/// Degrade the configured input image and write observation, preview and
/// provenance sidecar into `out_dir`.
pub fn cmd_simulate(cfg: &RunConfig, out_dir: &Path) -> Result<SimulatePaths, PipelineError> {
    ensure_dir(out_dir)?;
    let input_path = cfg.require_image_input()?;
    let truth = pgm::read_pgm(input_path)?;
    if let Some((i, &v)) = truth
        .data
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=255.0).contains(*v))
    {
        return Err(PipelineError::OutOfRangeInput {
            path: input_path.display().to_string(),
            index: i,
            value: v,
        });
    }
    let blur = BlurOp::new(cfg.blur_q)?;
    let alpha = vec![cfg.noise_alpha; truth.len()];
    let z = degrade(&truth, &blur, cfg.noise_kind, &alpha, cfg.seed)?;

    let data_path = out_dir.join("observation.f64");
    let preview_path = out_dir.join("observation.pgm");
    let meta_path = out_dir.join("observation.meta");
    pgm::write_matrix(&data_path, &z)?;
    let max = z.data.iter().cloned().fold(0.0f64, f64::max);
    let fmt = if max > 255.0 {
        pgm::PgmFormat::Binary16
    } else {
        pgm::PgmFormat::Binary8
    };
    pgm::write_pgm(&preview_path, &z, fmt)?;
    write_kv(
        &meta_path,
        &[
            ("family", cfg.noise_kind.name().to_string()),
            ("alpha", format!("{:.17e}", cfg.noise_alpha)),
            ("seed", cfg.seed.to_string()),
            ("blur.q", cfg.blur_q.to_string()),
            ("width", z.width.to_string()),
            ("height", z.height.to_string()),
            ("data", "observation.f64".to_string()),
        ],
    )?;
    Ok(SimulatePaths {
        observation_data: data_path,
        observation_preview: preview_path,
        observation_meta: meta_path,
    })
}

/// Degradation provenance parsed back from the sidecar.
#[derive(Clone, Debug)]
pub struct ObservationMeta {
    pub kind: NoiseKind,
    pub alpha: f64,
    pub seed: u64,
    pub blur_q: usize,
    pub data_path: PathBuf,
}

pub fn read_meta(meta_path: &Path) -> Result<ObservationMeta, PipelineError> {
    let pairs = read_kv(meta_path)?;
    let get = |key: &str| -> Result<&str, PipelineError> {
        pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| PipelineError::Meta {
                path: meta_path.display().to_string(),
                reason: format!("missing key '{key}'"),
            })
    };
    let badmeta = |reason: String| PipelineError::Meta {
        path: meta_path.display().to_string(),
        reason,
    };
    let kind = NoiseKind::parse(get("family")?)
        .ok_or_else(|| badmeta("unknown noise family".to_string()))?;
    let alpha: f64 = get("alpha")?
        .parse()
        .map_err(|_| badmeta("alpha is not a number".to_string()))?;
    let seed: u64 = get("seed")?
        .parse()
        .map_err(|_| badmeta("seed is not an integer".to_string()))?;
    let blur_q: usize = get("blur.q")?
        .parse()
        .map_err(|_| badmeta("blur.q is not an integer".to_string()))?;
    let rel = get("data")?;
    let data_path = meta_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(rel);
    Ok(ObservationMeta {
        kind,
        alpha,
        seed,
        blur_q,
        data_path,
    })
}

/// Summary of a restoration run, mirrored into `report.txt`.
#[derive(Clone, Debug)]
pub struct RestoreSummary {
    pub algorithm: Algorithm,
    pub theta: f64,
    pub objective_final: f64,
    pub outer_iterations: usize,
    pub wall_seconds: f64,
    pub snr_degraded: Option<f64>,
    pub snr_restored: Option<f64>,
    pub report: RunReport,
    pub restored: Option<ImageGrid>,
}

/// Assemble the configured objective and run the selected nested solver.
///
/// Imaging runs read the observation written by [`cmd_simulate`]; the toy
/// problem kind solves its small separable instance directly. Outputs land
/// in `out_dir`: `restored.pgm`, `restored.f64`, `trace.csv`, `report.txt`.
pub fn cmd_restore(cfg: &RunConfig, out_dir: &Path) -> Result<RestoreSummary, PipelineError> {
    ensure_dir(out_dir)?;
    match cfg.problem {
        ProblemKind::Toy => restore_toy(cfg, out_dir),
        ProblemKind::Imaging => restore_imaging(cfg, out_dir),
    }
}

fn solve_selected(
    algorithm: Algorithm,
    problem: &CompositeProblem<'_>,
    outer: &OuterConfig,
    start: &[f64],
) -> Result<RunReport, SolverError> {
    match algorithm {
        Algorithm::DrOuter => solve_dr_outer(problem, outer, start),
        Algorithm::FbOuter => solve_fb_outer(problem, outer, start),
    }
}

fn restore_toy(cfg: &RunConfig, out_dir: &Path) -> Result<RestoreSummary, PipelineError> {
    let dim = cfg.toy_target.len();
    let f = SeparableSpec::new(
        vec![ScalarPotential::l1(cfg.toy_chi); dim],
        vec![ClosedInterval::free(); dim],
    )?;
    let g = QuadraticDistance::new(cfg.toy_target.clone());
    let c = BoxConstraint::uniform(dim, cfg.toy_lo, cfg.toy_hi);
    let problem = CompositeProblem::new(&f, &g, &c);
    let outer = OuterConfig {
        kappa: cfg.kappa,
        eta: cfg.eta,
        inner_cap: cfg.inner_cap,
        outer_cap: cfg.outer_cap,
        outer_tol: cfg.outer_tol,
        lambda: cfg.lambda,
        tau: cfg.tau,
        ..OuterConfig::default()
    };
    let start = vec![0.0f64.clamp(cfg.toy_lo, cfg.toy_hi); dim];
    let report = solve_selected(cfg.algorithm, &problem, &outer, &start)?;

    let mut trace_csv = Vec::new();
    report
        .trace
        .write_csv(&mut trace_csv)
        .expect("in-memory write");
    pgm::write_atomic(&out_dir.join("trace.csv"), &trace_csv)?;
    let solution_text = report
        .solution
        .iter()
        .map(|v| format!("{v:.12e}"))
        .collect::<Vec<_>>()
        .join(",");
    let wall = report
        .trace
        .rows()
        .last()
        .map(|r| r.wall_seconds)
        .unwrap_or(0.0);
    write_kv(
        &out_dir.join("report.txt"),
        &[
            ("problem", "toy".to_string()),
            ("algorithm", cfg.algorithm.name().to_string()),
            ("solution", solution_text),
            ("objective_final", format!("{:.17e}", report.objective_final)),
            ("outer_iterations", report.outer_iterations.to_string()),
            ("wall_seconds", format!("{wall:.6}")),
        ],
    )?;
    Ok(RestoreSummary {
        algorithm: cfg.algorithm,
        theta: cfg.theta,
        objective_final: report.objective_final,
        outer_iterations: report.outer_iterations,
        wall_seconds: wall,
        snr_degraded: None,
        snr_restored: None,
        report,
        restored: None,
    })
}

fn restore_imaging(cfg: &RunConfig, out_dir: &Path) -> Result<RestoreSummary, PipelineError> {
    let meta_path = cfg
        .observation_meta
        .clone()
        .unwrap_or_else(|| out_dir.join("observation.meta"));
    let meta = read_meta(&meta_path)?;
    let data_path = cfg
        .observation_data
        .clone()
        .unwrap_or(meta.data_path.clone());
    let z = pgm::read_matrix(&data_path)?;
    let (w, h) = (z.width, z.height);

    let blur = BlurOp::new(meta.blur_q)?;
    let frame = FrameOp::new(cfg.frame_kind, cfg.frame_levels, w, h)?;
    let model = NoiseModel::uniform(meta.kind, meta.alpha, w * h)?;
    let obs = Observation::new(z.data.clone(), &model)?;

    let opnorm = chain_opnorm(&blur, &frame, 400);
    let chain = ImagingChain {
        blur,
        frame: frame.clone(),
    };
    let data_term = DataTerm::new(
        model,
        obs,
        cfg.theta,
        cfg.epsilon.to_rule(),
        chain,
        opnorm,
    )?;
    let potentials = build_potentials(
        &frame,
        cfg.potentials,
        cfg.potentials_approx,
        &cfg.potentials_levels,
    )?;
    let f = SeparableSpec::unconstrained(potentials);
    let constraint = FrameBoxConstraint::pixel_range(frame.clone());

    // start from the projected coefficients of the observed image
    let start = constraint.project_coeffs(&frame.analysis(&z));

    let problem = CompositeProblem::new(&f, &data_term, &constraint);
    let outer = OuterConfig {
        kappa: cfg.kappa,
        eta: cfg.eta,
        inner_cap: cfg.inner_cap,
        outer_cap: cfg.outer_cap,
        outer_tol: cfg.outer_tol,
        lambda: cfg.lambda,
        tau: cfg.tau,
        ..OuterConfig::default()
    };
    let report = solve_selected(cfg.algorithm, &problem, &outer, &start)?;

    // synthesize and clamp the restored image
    let synth = frame.synthesis(&report.solution);
    let restored = ImageGrid::new(
        w,
        h,
        synth.data.iter().map(|v| v.clamp(0.0, 255.0)).collect(),
    );
    pgm::write_pgm(&out_dir.join("restored.pgm"), &restored, pgm::PgmFormat::Binary8)?;
    pgm::write_matrix(&out_dir.join("restored.f64"), &restored)?;
    let mut trace_csv = Vec::new();
    report
        .trace
        .write_csv(&mut trace_csv)
        .expect("in-memory write");
    pgm::write_atomic(&out_dir.join("trace.csv"), &trace_csv)?;

    // SNR against ground truth when supplied; the degraded baseline uses the
    // intensity-scaled observation for count data
    let (mut snr_degraded, mut snr_restored) = (None, None);
    if let Some(truth_path) = &cfg.ground_truth {
        let truth = pgm::read_pgm(truth_path)?;
        let degraded_img = match meta.kind {
            NoiseKind::Poisson => ImageGrid::new(
                w,
                h,
                z.data.iter().map(|v| v / meta.alpha).collect(),
            ),
            NoiseKind::SignalDepGaussian => z.clone(),
        };
        snr_degraded = Some(snr(&degraded_img, &truth)?);
        snr_restored = Some(snr(&restored, &truth)?);
    }

    let wall = report
        .trace
        .rows()
        .last()
        .map(|r| r.wall_seconds)
        .unwrap_or(0.0);
    let mut pairs = vec![
        ("problem", "imaging".to_string()),
        ("algorithm", cfg.algorithm.name().to_string()),
        ("family", meta.kind.name().to_string()),
        ("alpha", format!("{:.17e}", meta.alpha)),
        ("theta", format!("{:.17e}", cfg.theta)),
        ("kappa", format!("{:.17e}", cfg.kappa)),
        ("eta", format!("{:.17e}", cfg.eta)),
        ("opnorm_chain", format!("{opnorm:.12e}")),
        ("beta_theta", format!("{:.12e}", cfg.theta * opnorm * opnorm)),
        ("objective_final", format!("{:.17e}", report.objective_final)),
        ("outer_iterations", report.outer_iterations.to_string()),
        ("wall_seconds", format!("{wall:.6}")),
    ];
    if let Some(d) = snr_degraded {
        pairs.push(("snr_degraded_db", format!("{d:.6}")));
    }
    if let Some(r) = snr_restored {
        pairs.push(("snr_restored_db", format!("{r:.6}")));
    }
    write_kv(&out_dir.join("report.txt"), &pairs)?;

    Ok(RestoreSummary {
        algorithm: cfg.algorithm,
        theta: cfg.theta,
        objective_final: report.objective_final,
        outer_iterations: report.outer_iterations,
        wall_seconds: wall,
        snr_degraded,
        snr_restored,
        report,
        restored: Some(restored),
    })
}

/// Scalar proximity-operator calculation for the `prox` subcommand.
pub fn cmd_prox(
    chi: f64,
    omega: f64,
    p: Power,
    gamma: f64,
    t: f64,
    interval: Option<(f64, f64)>,
) -> Result<f64, PipelineError> {
    let phi = ScalarPotential::new(chi, omega, p)?;
    let value = match interval {
        Some((lo, hi)) => {
            let iv = ClosedInterval::new(lo, hi)?;
            crate::prox::prox_scalar_constrained(&phi, gamma, &iv, t)
        }
        None => phi.prox(gamma, t),
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::pgm::{read_pgm, write_pgm, PgmFormat};

    fn write_phantom(dir: &Path, name: &str, w: usize, h: usize) -> PathBuf {
        let img = ImageGrid::phantom(w, h);
        let p = dir.join(name);
        write_pgm(&p, &img, PgmFormat::Binary8).unwrap();
        p
    }

    fn base_config(input: &Path) -> String {
        format!(
            "image.input = {}\n\
             blur.q = 3\n\
             noise.family = poisson\n\
             noise.alpha = 0.5\n\
             frame.levels = 2\n\
             extension.theta = 0.1\n\
             potentials.chi = 0.1\n\
             potentials.omega = 0.001\n\
             potentials.approx.chi = 0\n\
             solver.outer_cap = 60\n\
             solver.inner_cap = 50\n\
             seed = 7\n",
            input.display()
        )
    }

    #[test]
    fn simulate_is_checksum_stable() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_phantom(dir.path(), "in.pgm", 32, 32);
        let cfg = RunConfig::from_str(&base_config(&input)).unwrap();
        let out1 = dir.path().join("a");
        let out2 = dir.path().join("b");
        let p1 = cmd_simulate(&cfg, &out1).unwrap();
        let p2 = cmd_simulate(&cfg, &out2).unwrap();
        let b1 = std::fs::read(&p1.observation_data).unwrap();
        let b2 = std::fs::read(&p2.observation_data).unwrap();
        assert_eq!(b1, b2);
        let m1 = std::fs::read(&p1.observation_preview).unwrap();
        let m2 = std::fs::read(&p2.observation_preview).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn simulate_gaussian_high_alpha_matches_blur() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_phantom(dir.path(), "in.pgm", 64, 64);
        let text = format!(
            "image.input = {}\nblur.q = 5\nnoise.family = gaussian\nnoise.alpha = 1e6\nseed = 3\n",
            input.display()
        );
        let cfg = RunConfig::from_str(&text).unwrap();
        let out = dir.path().join("o");
        let paths = cmd_simulate(&cfg, &out).unwrap();
        let z = pgm::read_matrix(&paths.observation_data).unwrap();
        let truth = read_pgm(&input).unwrap();
        let blurred = BlurOp::new(5).unwrap().apply(&truth);
        let s = snr(&z, &blurred).unwrap();
        assert!(s >= 60.0, "snr {s}");
    }

    #[test]
    fn simulate_rejects_missing_input() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::from_str("image.input = /nope/missing.pgm\n").unwrap();
        let err = cmd_simulate(&cfg, dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("/nope/missing.pgm"));
    }

    #[test]
    fn restore_toy_reaches_the_known_solution() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::from_str(
            "problem.kind = toy\n\
             toy.target = 2,-1\n\
             toy.chi = 1\n\
             toy.lo = 0\n\
             toy.hi = 1\n\
             solver.kappa = 1\n\
             solver.eta = 1e-9\n\
             solver.inner_cap = 400\n\
             solver.outer_cap = 500\n\
             solver.outer_tol = 1e-11\n",
        )
        .unwrap();
        for algorithm in [Algorithm::DrOuter, Algorithm::FbOuter] {
            let mut cfg = cfg.clone();
            cfg.algorithm = algorithm;
            let out = dir.path().join(algorithm.name());
            let summary = cmd_restore(&cfg, &out).unwrap();
            assert!(
                (summary.report.solution[0] - 1.0).abs() < 1e-6
                    && summary.report.solution[1].abs() < 1e-6,
                "{algorithm:?}: {:?}",
                summary.report.solution
            );
            assert!(out.join("report.txt").exists());
            assert!(out.join("trace.csv").exists());
        }
    }

    #[test]
    fn simulate_then_restore_improves_snr() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_phantom(dir.path(), "in.pgm", 32, 32);
        let mut text = base_config(&input);
        text.push_str(&format!("image.ground_truth = {}\n", input.display()));
        let cfg = RunConfig::from_str(&text).unwrap();
        let out = dir.path().join("run");
        cmd_simulate(&cfg, &out).unwrap();
        let summary = cmd_restore(&cfg, &out).unwrap();
        let (deg, res) = (summary.snr_degraded.unwrap(), summary.snr_restored.unwrap());
        assert!(res > deg, "restored {res} dB vs degraded {deg} dB");
        assert!(out.join("restored.pgm").exists());
        // normalized objective runs from 1 to 0
        let rows = summary.report.trace.rows();
        assert_eq!(rows.first().unwrap().normalized_objective, 1.0);
        assert_eq!(rows.last().unwrap().normalized_objective, 0.0);
    }

    #[test]
    fn restore_trace_is_deterministic_modulo_wall_time() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_phantom(dir.path(), "in.pgm", 16, 16);
        let mut text = base_config(&input);
        text = text.replace("frame.levels = 2", "frame.levels = 1");
        text = text.replace("solver.outer_cap = 60", "solver.outer_cap = 15");
        let cfg = RunConfig::from_str(&text).unwrap();
        let out = dir.path().join("r");
        cmd_simulate(&cfg, &out).unwrap();
        let a = cmd_restore(&cfg, &out).unwrap();
        let b = cmd_restore(&cfg, &out).unwrap();
        let rows_a = a.report.trace.rows();
        let rows_b = b.report.trace.rows();
        assert_eq!(rows_a.len(), rows_b.len());
        for (ra, rb) in rows_a.iter().zip(rows_b) {
            assert_eq!(ra.objective, rb.objective);
            assert_eq!(ra.inner_iters, rb.inner_iters);
            assert_eq!(ra.outer_step_norm, rb.outer_step_norm);
        }
    }

    #[test]
    fn prox_command_values() {
        let v = cmd_prox(1.0, 0.0, Power::Two, 1.0, 3.0, None).unwrap();
        assert_eq!(v, 2.0);
        let v = cmd_prox(1.0, 0.0, Power::Two, 1.0, 3.0, Some((0.0, 1.0))).unwrap();
        assert_eq!(v, 1.0);
        let v = cmd_prox(1.0, 1.0, Power::FourThirds, 1.0, 2.0, None).unwrap();
        assert!((v - 0.2088837635282042).abs() < 1e-10);
    }
}

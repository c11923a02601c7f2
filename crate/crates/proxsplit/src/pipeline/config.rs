//! Flat key-value run configuration with dotted sections.
//!
//! Grammar: one `key = value` per line, `#` starts a comment, blank lines
//! ignored. Keys are dotted paths (`noise.alpha`). Unknown keys are rejected
//! so a typo cannot silently fall back to a default. Numeric ranges are
//! validated at parse time.

use crate::imaging::{FrameKind, NoiseKind};
use crate::prox::Power;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected 'key = value', got: {text}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: duplicate key '{key}'")]
    Duplicate { line: usize, key: String },
    #[error("unknown key '{key}' (strict mode rejects unrecognized keys)")]
    UnknownKey { key: String },
    #[error("key '{key}': {reason}")]
    BadValue { key: String, reason: String },
    #[error("missing required key '{key}' for this command")]
    Missing { key: String },
}

/// Which objective the restore command assembles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    /// Wavelet-domain image restoration (the default).
    Imaging,
    /// Tiny separable instance with identity operators; exercises the
    /// solver wiring without any imaging machinery.
    Toy,
}

/// Outer algorithm selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    DrOuter,
    FbOuter,
}

impl Algorithm {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "dr-outer" => Some(Algorithm::DrOuter),
            "fb-outer" => Some(Algorithm::FbOuter),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::DrOuter => "dr-outer",
            Algorithm::FbOuter => "fb-outer",
        }
    }
}

/// Per-subband potential weights.
#[derive(Clone, Copy, Debug)]
pub struct PotentialConfig {
    pub chi: f64,
    pub omega: f64,
    pub p: Power,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        // weights are run-dependent; these defaults apply when a config
        // leaves them out
        Self {
            chi: 1.0,
            omega: 0.1,
            p: Power::Two,
        }
    }
}

/// Epsilon rule selection for the quadratic extension.
#[derive(Clone, Copy, Debug)]
pub enum EpsilonConfig {
    Constant(f64),
    OverTheta(f64),
}

impl EpsilonConfig {
    pub fn to_rule(self) -> crate::noise::EpsilonRule {
        match self {
            EpsilonConfig::Constant(e) => crate::noise::EpsilonRule::Constant(e),
            EpsilonConfig::OverTheta(c) => crate::noise::EpsilonRule::OverTheta(c),
        }
    }
}

/// Deepest decomposition level addressable by `potentials.level<N>.*` keys.
pub const MAX_LEVELS: usize = 12;

/// Parsed and validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub image_input: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    pub observation_data: Option<PathBuf>,
    pub observation_meta: Option<PathBuf>,
    pub blur_q: usize,
    pub noise_kind: NoiseKind,
    pub noise_alpha: f64,
    pub frame_kind: FrameKind,
    pub frame_levels: usize,
    pub potentials: PotentialConfig,
    pub potentials_approx: Option<PotentialConfig>,
    /// Per-decomposition-level overrides for detail subbands (index 0 is the
    /// finest level).
    pub potentials_levels: Vec<Option<PotentialConfig>>,
    pub theta: f64,
    pub epsilon: EpsilonConfig,
    pub algorithm: Algorithm,
    pub kappa: f64,
    pub eta: f64,
    pub inner_cap: usize,
    pub outer_cap: usize,
    pub outer_tol: f64,
    pub lambda: f64,
    pub tau: f64,
    pub seed: u64,
    pub toy_target: Vec<f64>,
    pub toy_chi: f64,
    pub toy_lo: f64,
    pub toy_hi: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Imaging,
            image_input: None,
            ground_truth: None,
            observation_data: None,
            observation_meta: None,
            blur_q: 5,
            noise_kind: NoiseKind::Poisson,
            noise_alpha: 0.1,
            frame_kind: FrameKind::OrthonormalSymlet6,
            frame_levels: 3,
            potentials: PotentialConfig::default(),
            potentials_approx: None,
            potentials_levels: vec![None; MAX_LEVELS],
            theta: 0.1,
            epsilon: EpsilonConfig::Constant(1e-16),
            algorithm: Algorithm::DrOuter,
            kappa: 60.0,
            eta: 1e-4,
            inner_cap: 200,
            outer_cap: 500,
            outer_tol: 1e-6,
            lambda: 1.0,
            tau: 1.0,
            seed: 0,
            toy_target: vec![2.0, -1.0],
            toy_chi: 1.0,
            toy_lo: 0.0,
            toy_hi: 1.0,
        }
    }
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, (usize, String)>, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: stripped.to_string(),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: stripped.to_string(),
            });
        }
        if map.insert(key.clone(), (line, value)).is_some() {
            return Err(ConfigError::Duplicate { line, key });
        }
    }
    Ok(map)
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

struct Taker {
    map: BTreeMap<String, (usize, String)>,
}

impl Taker {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key).map(|(_, v)| v)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.take(key)
            .map(|v| v.parse::<f64>().map_err(|_| bad(key, format!("not a number: {v}"))))
            .transpose()
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.take(key)
            .map(|v| v.parse::<usize>().map_err(|_| bad(key, format!("not an integer: {v}"))))
            .transpose()
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.take(key)
            .map(|v| v.parse::<u64>().map_err(|_| bad(key, format!("not an integer: {v}"))))
            .transpose()
    }

    fn finish(self) -> Result<(), ConfigError> {
        if let Some(key) = self.map.into_keys().next() {
            return Err(ConfigError::UnknownKey { key });
        }
        Ok(())
    }
}

fn take_potential(
    t: &mut Taker,
    prefix: &str,
    base: PotentialConfig,
) -> Result<(PotentialConfig, bool), ConfigError> {
    let mut p = base;
    let mut any = false;
    if let Some(chi) = t.take_f64(&format!("{prefix}.chi"))? {
        if !(chi >= 0.0) {
            return Err(bad(&format!("{prefix}.chi"), "must be >= 0"));
        }
        p.chi = chi;
        any = true;
    }
    if let Some(omega) = t.take_f64(&format!("{prefix}.omega"))? {
        if !(omega >= 0.0) {
            return Err(bad(&format!("{prefix}.omega"), "must be >= 0"));
        }
        p.omega = omega;
        any = true;
    }
    if let Some(ps) = t.take(&format!("{prefix}.p")) {
        p.p = Power::parse(&ps)
            .ok_or_else(|| bad(&format!("{prefix}.p"), "allowed values: 4/3, 3/2, 2"))?;
        any = true;
    }
    Ok((p, any))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_str(&text)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut t = Taker {
            map: parse_pairs(text)?,
        };
        let mut cfg = RunConfig::default();

        if let Some(v) = t.take("problem.kind") {
            cfg.problem = match v.as_str() {
                "imaging" => ProblemKind::Imaging,
                "toy" => ProblemKind::Toy,
                _ => return Err(bad("problem.kind", "allowed values: imaging, toy")),
            };
        }
        cfg.image_input = t.take("image.input").map(PathBuf::from);
        cfg.ground_truth = t.take("image.ground_truth").map(PathBuf::from);
        cfg.observation_data = t.take("observation.data").map(PathBuf::from);
        cfg.observation_meta = t.take("observation.meta").map(PathBuf::from);

        if let Some(q) = t.take_usize("blur.q")? {
            if q == 0 || q % 2 == 0 {
                return Err(bad("blur.q", "kernel size must be odd and positive"));
            }
            cfg.blur_q = q;
        }
        if let Some(v) = t.take("noise.family") {
            cfg.noise_kind = NoiseKind::parse(&v)
                .ok_or_else(|| bad("noise.family", "allowed values: gaussian, poisson"))?;
        }
        if let Some(a) = t.take_f64("noise.alpha")? {
            if !(a > 0.0) {
                return Err(bad("noise.alpha", "must be > 0"));
            }
            cfg.noise_alpha = a;
        }
        if let Some(v) = t.take("frame.kind") {
            cfg.frame_kind = match v.as_str() {
                "orthonormal-symlet6" => FrameKind::OrthonormalSymlet6,
                "two-basis-tight" => FrameKind::TwoBasisTight,
                _ => {
                    return Err(bad(
                        "frame.kind",
                        "allowed values: orthonormal-symlet6, two-basis-tight",
                    ))
                }
            };
        }
        if let Some(l) = t.take_usize("frame.levels")? {
            if l == 0 {
                return Err(bad("frame.levels", "must be >= 1"));
            }
            cfg.frame_levels = l;
        }

        let (pot, _) = take_potential(&mut t, "potentials", cfg.potentials)?;
        cfg.potentials = pot;
        let (approx, any) = take_potential(&mut t, "potentials.approx", cfg.potentials)?;
        if any {
            cfg.potentials_approx = Some(approx);
        }
        for level in 1..=MAX_LEVELS {
            let (p, any) =
                take_potential(&mut t, &format!("potentials.level{level}"), cfg.potentials)?;
            if any {
                cfg.potentials_levels[level - 1] = Some(p);
            }
        }

        if let Some(th) = t.take_f64("extension.theta")? {
            if !(th > 0.0) {
                return Err(bad("extension.theta", "must be > 0"));
            }
            cfg.theta = th;
        }
        match (
            t.take_f64("extension.epsilon")?,
            t.take_f64("extension.epsilon_c")?,
        ) {
            (Some(_), Some(_)) => {
                return Err(bad(
                    "extension.epsilon",
                    "give either extension.epsilon or extension.epsilon_c, not both",
                ))
            }
            (Some(e), None) => {
                if !(e > 0.0) {
                    return Err(bad("extension.epsilon", "must be > 0"));
                }
                cfg.epsilon = EpsilonConfig::Constant(e);
            }
            (None, Some(c)) => {
                if !(c > 0.0) {
                    return Err(bad("extension.epsilon_c", "must be > 0"));
                }
                cfg.epsilon = EpsilonConfig::OverTheta(c);
            }
            (None, None) => {}
        }

        if let Some(v) = t.take("solver.algorithm") {
            cfg.algorithm = Algorithm::parse(&v)
                .ok_or_else(|| bad("solver.algorithm", "allowed values: dr-outer, fb-outer"))?;
        }
        if let Some(k) = t.take_f64("solver.kappa")? {
            if !(k > 0.0) {
                return Err(bad("solver.kappa", "must be > 0"));
            }
            cfg.kappa = k;
        }
        if let Some(e) = t.take_f64("solver.eta")? {
            if !(e > 0.0) {
                return Err(bad("solver.eta", "must be > 0"));
            }
            cfg.eta = e;
        }
        if let Some(c) = t.take_usize("solver.inner_cap")? {
            if c == 0 {
                return Err(bad("solver.inner_cap", "must be >= 1"));
            }
            cfg.inner_cap = c;
        }
        if let Some(c) = t.take_usize("solver.outer_cap")? {
            if c == 0 {
                return Err(bad("solver.outer_cap", "must be >= 1"));
            }
            cfg.outer_cap = c;
        }
        if let Some(tol) = t.take_f64("solver.outer_tol")? {
            if !(tol >= 0.0) {
                return Err(bad("solver.outer_tol", "must be >= 0"));
            }
            cfg.outer_tol = tol;
        }
        if let Some(l) = t.take_f64("solver.lambda")? {
            if !(l > 0.0 && l <= 1.0) {
                return Err(bad("solver.lambda", "must lie in (0, 1]"));
            }
            cfg.lambda = l;
        }
        if let Some(tau) = t.take_f64("solver.tau")? {
            if !(tau > 0.0 && tau <= 2.0) {
                return Err(bad("solver.tau", "must lie in (0, 2]"));
            }
            cfg.tau = tau;
        }
        if let Some(s) = t.take_u64("seed")? {
            cfg.seed = s;
        }

        if let Some(v) = t.take("toy.target") {
            let parsed: Result<Vec<f64>, _> = v.split(',').map(|s| s.trim().parse()).collect();
            cfg.toy_target =
                parsed.map_err(|_| bad("toy.target", "comma-separated numbers expected"))?;
            if cfg.toy_target.is_empty() {
                return Err(bad("toy.target", "needs at least one coordinate"));
            }
        }
        if let Some(c) = t.take_f64("toy.chi")? {
            if !(c >= 0.0) {
                return Err(bad("toy.chi", "must be >= 0"));
            }
            cfg.toy_chi = c;
        }
        if let Some(l) = t.take_f64("toy.lo")? {
            cfg.toy_lo = l;
        }
        if let Some(h) = t.take_f64("toy.hi")? {
            cfg.toy_hi = h;
        }
        if cfg.toy_lo > cfg.toy_hi {
            return Err(bad("toy.lo", "toy.lo must not exceed toy.hi"));
        }

        t.finish()?;
        Ok(cfg)
    }

    pub fn require_image_input(&self) -> Result<&Path, ConfigError> {
        self.image_input.as_deref().ok_or(ConfigError::Missing {
            key: "image.input".to_string(),
        })
    }
}

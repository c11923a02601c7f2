//! Anti-log-likelihood data terms for signal-dependent Gaussian and Poisson
//! noise, and their quadratic extensions.
//!
//! Both likelihood families have per-pixel potentials whose curvature blows
//! up at the left edge of their domain, so the plain data term has no
//! Lipschitz gradient. Below the junction point where the curvature reaches
//! `theta`, each potential is replaced by the matched quadratic
//! `theta/2 v^2 + c1 v + c0` (continuously differentiable at the junction),
//! and the domain is padded by `epsilon(theta)`. The extended sum then has a
//! gradient that is `theta * ||T F*||^2`-Lipschitz, never exceeds the original
//! term, and shares its minimizer once `theta` is large enough.
//!
//! Pixels with a zero observation keep their linear potential `alpha * v`.

use crate::imaging::NoiseKind;
use crate::ops::SmoothTerm;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("alpha must be positive at pixel {index}: {value}")]
    NonPositiveAlpha { index: usize, value: f64 },
    #[error("Poisson observation must hold nonnegative integers, pixel {index} = {value}")]
    NotACount { index: usize, value: f64 },
    #[error("observation is identically zero: no pixel constrains the fit")]
    AllZero,
    #[error("observation length {zlen} does not match model length {alen}")]
    LengthMismatch { zlen: usize, alen: usize },
    #[error("pixel {0} has a zero observation; no curvature junction exists there")]
    NotInActiveSet(usize),
    #[error("theta must be positive, got {0}")]
    NonPositiveTheta(f64),
    #[error("quadratic extension is discontinuous at pixel {index}: residual {residual:.3e}")]
    BrokenJunction { index: usize, residual: f64 },
    #[error("gradient requested outside the extended domain at pixel {index}: value {value}")]
    OutOfDomain { index: usize, value: f64 },
}

/// Per-pixel likelihood family with its scaling parameters. The domain
/// threshold `delta` is zero for both families; it is carried explicitly so
/// further families can reuse the extension machinery.
#[derive(Clone, Debug)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub alpha: Vec<f64>,
    pub delta: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, alpha: Vec<f64>) -> Result<Self, NoiseError> {
        if let Some((i, &a)) = alpha.iter().enumerate().find(|(_, a)| !(**a > 0.0)) {
            return Err(NoiseError::NonPositiveAlpha { index: i, value: a });
        }
        Ok(Self {
            kind,
            alpha,
            delta: 0.0,
        })
    }

    pub fn uniform(kind: NoiseKind, alpha: f64, len: usize) -> Result<Self, NoiseError> {
        Self::new(kind, vec![alpha; len])
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// Observed pixel values plus the active set (pixels with a nonzero
/// observation, where the likelihood potential is nonlinear).
#[derive(Clone, Debug)]
pub struct Observation {
    pub z: Vec<f64>,
    active: Vec<bool>,
}

impl Observation {
    pub fn new(z: Vec<f64>, model: &NoiseModel) -> Result<Self, NoiseError> {
        if z.len() != model.len() {
            return Err(NoiseError::LengthMismatch {
                zlen: z.len(),
                alen: model.len(),
            });
        }
        if model.kind == NoiseKind::Poisson {
            if let Some((i, &v)) = z
                .iter()
                .enumerate()
                .find(|(_, v)| **v < 0.0 || v.fract() != 0.0)
            {
                return Err(NoiseError::NotACount { index: i, value: v });
            }
        }
        let active: Vec<bool> = z.iter().map(|&v| v != 0.0).collect();
        if !active.iter().any(|&a| a) {
            return Err(NoiseError::AllZero);
        }
        Ok(Self { z, active })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// True when pixel `i` has a nonzero observation.
    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }
}

/// Value of the per-pixel anti-log-likelihood potential.
///
/// Active pixels follow the family formula on `(delta, inf)` and are `+inf`
/// elsewhere; inactive pixels are `alpha * v` on `[delta, inf)`.
pub fn nll_value(model: &NoiseModel, obs: &Observation, i: usize, v: f64) -> f64 {
    let (a, z, d) = (model.alpha[i], obs.z[i], model.delta);
    if !obs.is_active(i) {
        return if v >= d { a * v } else { f64::INFINITY };
    }
    if v <= d {
        return f64::INFINITY;
    }
    match model.kind {
        NoiseKind::SignalDepGaussian => a * (v - z) * (v - z) / v,
        NoiseKind::Poisson => a * v - z + z * (z / (a * v)).ln(),
    }
}

/// First derivative of the potential on the interior of its domain.
pub fn nll_deriv(model: &NoiseModel, obs: &Observation, i: usize, v: f64) -> f64 {
    let (a, z) = (model.alpha[i], obs.z[i]);
    if !obs.is_active(i) {
        return a;
    }
    match model.kind {
        NoiseKind::SignalDepGaussian => a * (v * v - z * z) / (v * v),
        NoiseKind::Poisson => a - z / v,
    }
}

/// Second derivative of the potential on the interior of its domain.
pub fn nll_curvature(model: &NoiseModel, obs: &Observation, i: usize, v: f64) -> f64 {
    let (a, z) = (model.alpha[i], obs.z[i]);
    if !obs.is_active(i) {
        return 0.0;
    }
    match model.kind {
        NoiseKind::SignalDepGaussian => 2.0 * a * z * z / (v * v * v),
        NoiseKind::Poisson => z / (v * v),
    }
}

/// Junction point `v` where the potential's curvature falls to `theta`:
/// curvature is at most `theta` exactly on `[junction, inf)`.
pub fn curvature_junction(
    model: &NoiseModel,
    obs: &Observation,
    i: usize,
    theta: f64,
) -> Result<f64, NoiseError> {
    if !(theta > 0.0) {
        return Err(NoiseError::NonPositiveTheta(theta));
    }
    if !obs.is_active(i) {
        return Err(NoiseError::NotInActiveSet(i));
    }
    let (a, z) = (model.alpha[i], obs.z[i]);
    Ok(match model.kind {
        NoiseKind::SignalDepGaussian => (2.0 * a * z * z / theta).cbrt(),
        NoiseKind::Poisson => (z / theta).sqrt(),
    })
}

/// Coefficients `(c0, c1)` of the quadratic branch
/// `theta/2 v^2 + c1 v + c0`, matched so value and slope are continuous at
/// the junction.
pub fn extension_coeffs(
    model: &NoiseModel,
    obs: &Observation,
    i: usize,
    theta: f64,
) -> Result<(f64, f64), NoiseError> {
    let vstar = curvature_junction(model, obs, i, theta)?;
    let value = nll_value(model, obs, i, vstar);
    let slope = nll_deriv(model, obs, i, vstar);
    let c1 = slope - theta * vstar;
    let c0 = value - vstar * slope + 0.5 * theta * vstar * vstar;
    Ok((c0, c1))
}

/// Domain padding rule `epsilon(theta)`.
#[derive(Clone, Copy, Debug)]
pub enum EpsilonRule {
    /// A fixed padding (default `1e-16`).
    Constant(f64),
    /// `epsilon(theta) = c / theta`, which vanishes as `theta` grows.
    OverTheta(f64),
}

impl Default for EpsilonRule {
    fn default() -> Self {
        EpsilonRule::Constant(1e-16)
    }
}

impl EpsilonRule {
    pub fn epsilon(&self, theta: f64) -> f64 {
        match *self {
            EpsilonRule::Constant(e) => e,
            EpsilonRule::OverTheta(c) => c / theta,
        }
    }
}

/// Precomputed per-pixel extension data for a given `theta`.
#[derive(Clone, Debug)]
pub struct ExtensionParams {
    pub theta: f64,
    pub epsilon: f64,
    junction: Vec<f64>,
    c0: Vec<f64>,
    c1: Vec<f64>,
}

impl ExtensionParams {
    pub fn new(
        model: &NoiseModel,
        obs: &Observation,
        theta: f64,
        rule: EpsilonRule,
    ) -> Result<Self, NoiseError> {
        if !(theta > 0.0) {
            return Err(NoiseError::NonPositiveTheta(theta));
        }
        let n = model.len();
        let mut junction = vec![0.0; n];
        let mut c0 = vec![0.0; n];
        let mut c1 = vec![0.0; n];
        for i in 0..n {
            if !obs.is_active(i) {
                continue;
            }
            let vstar = curvature_junction(model, obs, i, theta)?;
            let (a0, a1) = extension_coeffs(model, obs, i, theta)?;
            junction[i] = vstar;
            c0[i] = a0;
            c1[i] = a1;
            // continuity of value and slope at the junction
            let quad = 0.5 * theta * vstar * vstar + a1 * vstar + a0;
            let orig = nll_value(model, obs, i, vstar);
            let vres = (quad - orig).abs() / (1.0 + orig.abs());
            let sres = ((theta * vstar + a1) - nll_deriv(model, obs, i, vstar)).abs()
                / (1.0 + nll_deriv(model, obs, i, vstar).abs());
            let residual = vres.max(sres);
            if residual > 1e-8 {
                return Err(NoiseError::BrokenJunction { index: i, residual });
            }
        }
        Ok(Self {
            theta,
            epsilon: rule.epsilon(theta),
            junction,
            c0,
            c1,
        })
    }

    pub fn junction(&self, i: usize) -> f64 {
        self.junction[i]
    }

    pub fn coeffs(&self, i: usize) -> (f64, f64) {
        (self.c0[i], self.c1[i])
    }
}

/// Absolute slack below the padded domain floor that still evaluates through
/// the active branch formula instead of erroring. The frame-domain projection
/// is only exact to roundoff, so feasible iterates can synthesize to pixel
/// values a few 1e-13 below zero; this matches the 1e-9 feasibility tolerance
/// used by the nested solvers. Points further below are genuine violations.
pub const DOMAIN_SLACK: f64 = 1e-9;

/// Value of the extended potential at pixel `i`.
pub fn extended_value(
    model: &NoiseModel,
    obs: &Observation,
    ext: &ExtensionParams,
    i: usize,
    v: f64,
) -> f64 {
    let d = model.delta;
    let floor = d - ext.epsilon - DOMAIN_SLACK;
    if v < floor {
        return f64::INFINITY;
    }
    if obs.is_active(i) {
        if v < ext.junction[i] {
            0.5 * ext.theta * v * v + ext.c1[i] * v + ext.c0[i]
        } else {
            nll_value(model, obs, i, v)
        }
    } else {
        // linear branch continues below delta down to the padded floor
        model.alpha[i] * v
    }
}

/// Derivative of the extended potential at pixel `i`; errors at or below the
/// padded domain floor.
pub fn extended_deriv(
    model: &NoiseModel,
    obs: &Observation,
    ext: &ExtensionParams,
    i: usize,
    v: f64,
) -> Result<f64, NoiseError> {
    let floor = model.delta - ext.epsilon - DOMAIN_SLACK;
    if v < floor {
        return Err(NoiseError::OutOfDomain { index: i, value: v });
    }
    Ok(if obs.is_active(i) {
        if v < ext.junction[i] {
            ext.theta * v + ext.c1[i]
        } else {
            nll_deriv(model, obs, i, v)
        }
    } else {
        model.alpha[i]
    })
}

/// Anti-log-likelihood of the comparison baseline built on the square-root
/// variance-stabilizing transform: `0.5 (2 sqrt(alpha v + 3/8) - z)^2` on
/// `[0, inf)`.
pub fn anscombe_value(alpha: f64, z: f64, v: f64) -> f64 {
    if v < 0.0 {
        return f64::INFINITY;
    }
    let t = 2.0 * (alpha * v + 0.375).sqrt() - z;
    0.5 * t * t
}

/// `beta_theta = theta * ||T F*||^2` from an operator-norm estimate.
pub fn lipschitz_beta_theta(theta: f64, opnorm_chain: f64) -> f64 {
    theta * opnorm_chain * opnorm_chain
}

/// Linear map from coefficients to pixel values with its adjoint; the
/// restoration pipeline plugs in blur-of-synthesis here.
pub trait LinearChain {
    fn forward(&self, x: &[f64]) -> Vec<f64>;
    fn adjoint(&self, u: &[f64]) -> Vec<f64>;
}

/// Identity chain (coefficient space = pixel space); handy for tests.
pub struct IdentityChain;

impl LinearChain for IdentityChain {
    fn forward(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
    fn adjoint(&self, u: &[f64]) -> Vec<f64> {
        u.to_vec()
    }
}

/// Closure-backed chain.
pub struct FnChain<F, A>
where
    F: Fn(&[f64]) -> Vec<f64>,
    A: Fn(&[f64]) -> Vec<f64>,
{
    pub forward: F,
    pub adjoint: A,
}

impl<F, A> LinearChain for FnChain<F, A>
where
    F: Fn(&[f64]) -> Vec<f64>,
    A: Fn(&[f64]) -> Vec<f64>,
{
    fn forward(&self, x: &[f64]) -> Vec<f64> {
        (self.forward)(x)
    }
    fn adjoint(&self, u: &[f64]) -> Vec<f64> {
        (self.adjoint)(u)
    }
}

/// The smooth data term `g_theta(x) = sum_i psi_theta_i((T F* x)_i)` with its
/// gradient `F T* grad Psi_theta(T F* x)` and Lipschitz constant
/// `theta * ||T F*||^2`.
pub struct DataTerm<C: LinearChain> {
    pub model: NoiseModel,
    pub obs: Observation,
    pub ext: ExtensionParams,
    pub chain: C,
    beta: f64,
}

impl<C: LinearChain> DataTerm<C> {
    pub fn new(
        model: NoiseModel,
        obs: Observation,
        theta: f64,
        rule: EpsilonRule,
        chain: C,
        opnorm_chain: f64,
    ) -> Result<Self, NoiseError> {
        let ext = ExtensionParams::new(&model, &obs, theta, rule)?;
        let beta = lipschitz_beta_theta(theta, opnorm_chain);
        Ok(Self {
            model,
            obs,
            ext,
            chain,
            beta,
        })
    }

    pub fn theta(&self) -> f64 {
        self.ext.theta
    }

    /// Extended data term value; `+inf` outside the padded domain.
    pub fn eval_extended(&self, x: &[f64]) -> f64 {
        let u = self.chain.forward(x);
        let mut total = 0.0;
        for (i, &v) in u.iter().enumerate() {
            let t = extended_value(&self.model, &self.obs, &self.ext, i, v);
            if !t.is_finite() {
                return f64::INFINITY;
            }
            total += t;
        }
        total
    }

    /// Original (unextended) data term value.
    pub fn eval_original(&self, x: &[f64]) -> f64 {
        let u = self.chain.forward(x);
        let mut total = 0.0;
        for (i, &v) in u.iter().enumerate() {
            let t = nll_value(&self.model, &self.obs, i, v);
            if !t.is_finite() {
                return f64::INFINITY;
            }
            total += t;
        }
        total
    }

    /// Gradient with domain checking; reports the offending pixel when the
    /// chain output leaves the extended domain.
    pub fn grad_checked(&self, x: &[f64]) -> Result<Vec<f64>, NoiseError> {
        let u = self.chain.forward(x);
        let mut slopes = Vec::with_capacity(u.len());
        for (i, &v) in u.iter().enumerate() {
            slopes.push(extended_deriv(&self.model, &self.obs, &self.ext, i, v)?);
        }
        Ok(self.chain.adjoint(&slopes))
    }

    /// Analytic lower bound on the extended data term over its domain,
    /// summed per pixel. Used by the theoretical inner-iteration diagnostic.
    pub fn lower_bound(&self) -> f64 {
        let (theta, eps) = (self.ext.theta, self.ext.epsilon);
        let floor = self.model.delta - eps;
        let mut total = 0.0;
        for i in 0..self.model.len() {
            if !self.obs.is_active(i) {
                total += self.model.alpha[i] * floor;
                continue;
            }
            let (a, z) = (self.model.alpha[i], self.obs.z[i]);
            let stat = match self.model.kind {
                NoiseKind::SignalDepGaussian => z.abs(),
                NoiseKind::Poisson => z / a,
            };
            let vstar = self.ext.junction[i];
            if stat >= vstar {
                total += nll_value(&self.model, &self.obs, i, stat);
            } else {
                let vertex = (-self.ext.c1[i] / theta).clamp(floor, vstar);
                total += 0.5 * theta * vertex * vertex + self.ext.c1[i] * vertex + self.ext.c0[i];
            }
        }
        total
    }
}

impl<C: LinearChain> SmoothTerm for DataTerm<C> {
    fn eval(&self, x: &[f64]) -> f64 {
        self.eval_extended(x)
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        match self.grad_checked(x) {
            Ok(g) => g,
            Err(e) => panic!("gradient outside the feasible region: {e}"),
        }
    }

    fn lipschitz(&self) -> f64 {
        self.beta
    }
}

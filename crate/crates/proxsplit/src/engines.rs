//! Forward-backward and Douglas-Rachford iteration engines, plus the two
//! specialized inner solvers for the constrained proximity operators
//! `prox_{i_C + kappa*g}` (smooth `g`) and `prox_{i_C + gamma*f}` (prox-able
//! `f`).
//!
//! Engines are problem-agnostic: prox maps, gradients and projections come in
//! as callables with their constants (`beta`, `kappa`, `nu`) declared by the
//! caller. Every iteration checks for non-finite components and aborts with a
//! diagnostic instead of silently spinning on NaNs.

use crate::util::{all_finite, dist};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("non-finite iterate at iteration {iter}")]
    NonFinite { iter: usize },
    #[error("step size bound violated: gamma_hi={gamma_hi} must be < {limit} (= 2/(kappa*beta))")]
    StepSizeTooLarge { gamma_hi: f64, limit: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("contraction factor must lie in (0,1), got {0}")]
    InvalidContraction(f64),
}

/// A step-size or relaxation sequence. `Cycle` repeats its entries.
#[derive(Clone, Debug)]
pub enum Sequence {
    Constant(f64),
    Cycle(Vec<f64>),
}

impl Sequence {
    pub fn at(&self, n: usize) -> f64 {
        match self {
            Sequence::Constant(v) => *v,
            Sequence::Cycle(vs) => vs[n % vs.len()],
        }
    }

    fn min(&self) -> f64 {
        match self {
            Sequence::Constant(v) => *v,
            Sequence::Cycle(vs) => vs.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    fn max(&self) -> f64 {
        match self {
            Sequence::Constant(v) => *v,
            Sequence::Cycle(vs) => vs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Forward-backward schedule: step sizes `gamma_n` within declared bounds
/// `[gamma_lo, gamma_hi]` and relaxations `lambda_n` in `[lambda_lo, 1]`.
///
/// The declared `gamma_lo`/`lambda_lo` feed the linear-rate bounds, so they
/// may be strictly below the actual sequence infimum (the bound only gets
/// looser).
#[derive(Clone, Debug)]
pub struct FbSchedule {
    pub gamma: Sequence,
    pub lambda: Sequence,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub lambda_lo: f64,
}

impl FbSchedule {
    pub fn new(
        gamma: Sequence,
        lambda: Sequence,
        gamma_lo: f64,
        lambda_lo: f64,
    ) -> Result<Self, EngineError> {
        let gamma_hi = gamma.max();
        if !(gamma_lo > 0.0) || gamma.min() < gamma_lo {
            return Err(EngineError::InvalidSchedule(format!(
                "need 0 < gamma_lo <= gamma_n, got gamma_lo={gamma_lo}, min gamma={}",
                gamma.min()
            )));
        }
        if !(lambda_lo > 0.0) || lambda.min() < lambda_lo || lambda.max() > 1.0 {
            return Err(EngineError::InvalidSchedule(format!(
                "need 0 < lambda_lo <= lambda_n <= 1, got lambda_lo={lambda_lo}, range [{}, {}]",
                lambda.min(),
                lambda.max()
            )));
        }
        Ok(Self {
            gamma,
            lambda,
            gamma_lo,
            gamma_hi,
            lambda_lo,
        })
    }

    /// Constant step and relaxation, with bounds equal to the values.
    pub fn constant(gamma: f64, lambda: f64) -> Self {
        Self::new(Sequence::Constant(gamma), Sequence::Constant(lambda), gamma, lambda)
            .expect("constant schedule is valid")
    }

    /// Default schedule for a target Lipschitz constant: `gamma = 0.995/beta`,
    /// `lambda = 1`.
    pub fn for_lipschitz(beta: f64) -> Self {
        Self::constant(0.995 / beta, 1.0)
    }

    /// Check `gamma_hi < 2/(kappa*beta)` for the effective constant.
    pub fn check_against(&self, kappa_beta: f64) -> Result<(), EngineError> {
        let limit = 2.0 / kappa_beta;
        if self.gamma_hi < limit {
            Ok(())
        } else {
            Err(EngineError::StepSizeTooLarge {
                gamma_hi: self.gamma_hi,
                limit,
            })
        }
    }
}

/// Convergence regime declared for a Douglas-Rachford run.
///
/// Weak convergence needs `sum tau_m (2 - tau_m) = inf`, enforced here by
/// keeping `tau_m <= 2 - DELTA_TAU`; when the second function is strongly
/// convex the half-iterates converge strongly for any `tau_m <= 2`, including
/// the Peaceman-Rachford limit `tau_m = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DrMode {
    WeakConvergence,
    StronglyConvex,
}

const DELTA_TAU: f64 = 1e-6;

/// Douglas-Rachford schedule: relaxations `tau_m` and prox scale `kappa`.
#[derive(Clone, Debug)]
pub struct DrSchedule {
    pub tau: Sequence,
    pub kappa: f64,
    pub mode: DrMode,
}

impl DrSchedule {
    pub fn new(tau: Sequence, kappa: f64, mode: DrMode) -> Result<Self, EngineError> {
        if !(kappa > 0.0) {
            return Err(EngineError::InvalidSchedule(format!(
                "kappa must be positive, got {kappa}"
            )));
        }
        if !(tau.min() > 0.0) {
            return Err(EngineError::InvalidSchedule(
                "tau_m must be bounded away from 0".into(),
            ));
        }
        let tau_cap = match mode {
            DrMode::WeakConvergence => 2.0 - DELTA_TAU,
            DrMode::StronglyConvex => 2.0,
        };
        if tau.max() > tau_cap {
            return Err(EngineError::InvalidSchedule(format!(
                "tau_m <= {tau_cap} required in {mode:?} mode, got {}",
                tau.max()
            )));
        }
        Ok(Self { tau, kappa, mode })
    }

    pub fn constant(tau: f64, kappa: f64) -> Result<Self, EngineError> {
        Self::new(Sequence::Constant(tau), kappa, DrMode::WeakConvergence)
    }
}

/// Summable perturbation sequences injected into an iteration, standing for
/// inexact prox or gradient evaluations.
pub struct ErrorInjection {
    a: Option<Box<dyn Fn(usize) -> Vec<f64>>>,
    b: Option<Box<dyn Fn(usize) -> Vec<f64>>>,
}

impl ErrorInjection {
    pub fn none() -> Self {
        Self { a: None, b: None }
    }

    pub fn new(
        a: impl Fn(usize) -> Vec<f64> + 'static,
        b: impl Fn(usize) -> Vec<f64> + 'static,
    ) -> Self {
        Self {
            a: Some(Box::new(a)),
            b: Some(Box::new(b)),
        }
    }

    /// Geometric decay `ratio^n * base` on the first (prox-side) sequence.
    pub fn geometric_a(base: Vec<f64>, ratio: f64) -> Self {
        Self {
            a: Some(Box::new(move |n| {
                base.iter().map(|v| v * ratio.powi(n as i32)).collect()
            })),
            b: None,
        }
    }

    fn a_at(&self, n: usize, dim: usize) -> Vec<f64> {
        match &self.a {
            Some(f) => f(n),
            None => vec![0.0; dim],
        }
    }

    fn b_at(&self, n: usize, dim: usize) -> Vec<f64> {
        match &self.b {
            Some(f) => f(n),
            None => vec![0.0; dim],
        }
    }

    fn is_none(&self) -> bool {
        self.a.is_none() && self.b.is_none()
    }
}

/// Linear-rate factor `rho` together with the result that produced it.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceBound {
    pub rho: f64,
    pub source: BoundSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSource {
    /// Forward-backward on a strongly convex first term.
    StronglyConvexFb,
    /// The inner solver for `prox_{i_C + kappa*g}`, whose first term is the
    /// strongly convex `0.5*||.-x||^2 + i_C` (modulus 1).
    ConstrainedProxFb,
}

impl ConvergenceBound {
    /// `rho = 1 - lambda_lo*gamma_lo*vartheta / (1 + gamma_lo*vartheta)` for a
    /// strongly convex first term with modulus `vartheta`.
    pub fn strongly_convex_fb(
        lambda_lo: f64,
        gamma_lo: f64,
        vartheta: f64,
    ) -> Result<Self, EngineError> {
        let rho = 1.0 - lambda_lo * gamma_lo * vartheta / (1.0 + gamma_lo * vartheta);
        if rho <= 0.0 || rho >= 1.0 {
            return Err(EngineError::InvalidContraction(rho));
        }
        Ok(Self {
            rho,
            source: BoundSource::StronglyConvexFb,
        })
    }

    /// `rho = 1 - lambda_lo*gamma_lo / (1 + gamma_lo)`: the modulus-1 case
    /// governing the constrained-prox inner iteration.
    pub fn constrained_prox_fb(schedule: &FbSchedule) -> Result<Self, EngineError> {
        let rho = 1.0 - schedule.lambda_lo * schedule.gamma_lo / (1.0 + schedule.gamma_lo);
        if rho <= 0.0 || rho >= 1.0 {
            return Err(EngineError::InvalidContraction(rho));
        }
        Ok(Self {
            rho,
            source: BoundSource::ConstrainedProxFb,
        })
    }
}

/// Stopping control shared by all engines: iteration budget and step-norm
/// tolerance, whichever fires first.
#[derive(Clone, Copy, Debug)]
pub struct StopRule {
    pub max_iters: usize,
    pub step_tol: f64,
}

impl StopRule {
    pub fn new(max_iters: usize, step_tol: f64) -> Self {
        Self { max_iters, step_tol }
    }
}

/// Record of a single engine run.
#[derive(Clone, Debug)]
pub struct EngineRun {
    pub iterations: usize,
    pub step_norms: Vec<f64>,
}

impl EngineRun {
    pub fn last_step_norm(&self) -> f64 {
        self.step_norms.last().copied().unwrap_or(0.0)
    }
}

/// Relaxed forward-backward iteration
/// `x_{n+1} = x_n + lambda_n (prox_{gamma_n f1}(x_n - gamma_n grad_f2(x_n) + b_n) + a_n - x_n)`.
///
/// `prox_f1(y, s)` must return `prox_{s*f1}(y)`. `beta` is the Lipschitz
/// constant of `grad_f2`; the schedule must satisfy `gamma_hi < 2/beta`.
pub fn fb_solve(
    prox_f1: impl Fn(&[f64], f64) -> Vec<f64>,
    grad_f2: impl Fn(&[f64]) -> Vec<f64>,
    beta: f64,
    schedule: &FbSchedule,
    errors: &ErrorInjection,
    x0: &[f64],
    stop: StopRule,
) -> Result<(Vec<f64>, EngineRun), EngineError> {
    schedule.check_against(beta)?;
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut step_norms = Vec::new();
    for n in 0..stop.max_iters {
        let gamma = schedule.gamma.at(n);
        let lambda = schedule.lambda.at(n);
        let grad = grad_f2(&x);
        let mut arg: Vec<f64> = x
            .iter()
            .zip(&grad)
            .map(|(xi, gi)| xi - gamma * gi)
            .collect();
        if !errors.is_none() {
            let b = errors.b_at(n, dim);
            for (ai, bi) in arg.iter_mut().zip(&b) {
                *ai += bi;
            }
        }
        let mut proxed = prox_f1(&arg, gamma);
        if !errors.is_none() {
            let a = errors.a_at(n, dim);
            for (pi, ai) in proxed.iter_mut().zip(&a) {
                *pi += ai;
            }
        }
        let next: Vec<f64> = x
            .iter()
            .zip(&proxed)
            .map(|(xi, pi)| xi + lambda * (pi - xi))
            .collect();
        if !all_finite(&next) {
            return Err(EngineError::NonFinite { iter: n });
        }
        let step = dist(&next, &x);
        step_norms.push(step);
        x = next;
        if step <= stop.step_tol {
            break;
        }
    }
    let iterations = step_norms.len();
    Ok((x, EngineRun { iterations, step_norms }))
}

/// Output of a Douglas-Rachford run: the governing sequence `z`, the solution
/// `prox_{kappa g2}(z)`, and the run record.
#[derive(Clone, Debug)]
pub struct DrOutput {
    pub z: Vec<f64>,
    pub solution: Vec<f64>,
    pub run: EngineRun,
}

/// Douglas-Rachford iteration
/// `z_{m+1/2} = prox_{kappa g2} z_m + b_m`;
/// `z_{m+1} = z_m + tau_m (prox_{kappa g1}(2 z_{m+1/2} - z_m) + a_m - z_{m+1/2})`.
///
/// Returns the final `z` together with `prox_{kappa g2}(z)`, which is the
/// minimizer of `g1 + g2` in the limit.
pub fn dr_solve(
    prox_g1: impl Fn(&[f64], f64) -> Vec<f64>,
    prox_g2: impl Fn(&[f64], f64) -> Vec<f64>,
    schedule: &DrSchedule,
    errors: &ErrorInjection,
    z0: &[f64],
    stop: StopRule,
) -> Result<DrOutput, EngineError> {
    let dim = z0.len();
    let kappa = schedule.kappa;
    let mut z = z0.to_vec();
    let mut step_norms = Vec::new();
    for m in 0..stop.max_iters {
        let tau = schedule.tau.at(m);
        let mut half = prox_g2(&z, kappa);
        if !errors.is_none() {
            let b = errors.b_at(m, dim);
            for (hi, bi) in half.iter_mut().zip(&b) {
                *hi += bi;
            }
        }
        let reflected: Vec<f64> = half.iter().zip(&z).map(|(h, zi)| 2.0 * h - zi).collect();
        let mut proxed = prox_g1(&reflected, kappa);
        if !errors.is_none() {
            let a = errors.a_at(m, dim);
            for (pi, ai) in proxed.iter_mut().zip(&a) {
                *pi += ai;
            }
        }
        let next: Vec<f64> = z
            .iter()
            .zip(proxed.iter().zip(&half))
            .map(|(zi, (pi, hi))| zi + tau * (pi - hi))
            .collect();
        if !all_finite(&next) {
            return Err(EngineError::NonFinite { iter: m });
        }
        let step = dist(&next, &z);
        step_norms.push(step);
        z = next;
        if step <= stop.step_tol {
            break;
        }
    }
    let solution = prox_g2(&z, kappa);
    let iterations = step_norms.len();
    Ok(DrOutput {
        z,
        solution,
        run: EngineRun { iterations, step_norms },
    })
}

/// Approximate `prox_{i_C + kappa*g}(x)` for smooth `g` by forward-backward
/// iterations
/// `x_{n+1} = x_n + lambda_n (P_C((x_n - gamma_n (kappa grad_g(x_n) - x)) / (1 + gamma_n)) - x_n)`.
///
/// Requires `gamma_hi < 2/(kappa*beta)`. Every iterate after the first update
/// lies in `C`; the error after `n` iterations is bounded by
/// `rho^n * ||x_init - prox||` with `rho` from
/// [`ConvergenceBound::constrained_prox_fb`]. Warm starts are allowed: the
/// nested Douglas-Rachford solver passes its previous half-iterate.
pub fn prox_constrained_smooth(
    x: &[f64],
    kappa: f64,
    grad_g: impl Fn(&[f64]) -> Vec<f64>,
    beta: f64,
    project_c: impl Fn(&[f64]) -> Vec<f64>,
    schedule: &FbSchedule,
    x_init: &[f64],
    stop: StopRule,
) -> Result<(Vec<f64>, EngineRun), EngineError> {
    schedule.check_against(kappa * beta)?;
    let mut xn = x_init.to_vec();
    let mut step_norms = Vec::new();
    for n in 0..stop.max_iters {
        let gamma = schedule.gamma.at(n);
        let lambda = schedule.lambda.at(n);
        let grad = grad_g(&xn);
        let arg: Vec<f64> = xn
            .iter()
            .zip(grad.iter().zip(x))
            .map(|(xi, (gi, xx))| (xi - gamma * (kappa * gi - xx)) / (1.0 + gamma))
            .collect();
        let projected = project_c(&arg);
        let next: Vec<f64> = xn
            .iter()
            .zip(&projected)
            .map(|(xi, pi)| xi + lambda * (pi - xi))
            .collect();
        if !all_finite(&next) {
            return Err(EngineError::NonFinite { iter: n });
        }
        let step = dist(&next, &xn);
        step_norms.push(step);
        xn = next;
        if step <= stop.step_tol {
            break;
        }
    }
    let iterations = step_norms.len();
    Ok((xn, EngineRun { iterations, step_norms }))
}

/// Approximate `prox_{i_C + gamma*f}(x)` by Douglas-Rachford iterations with
/// `kappa = 1` and the reflected initialization `z_0 = 2 prox_{gamma f}(x) - x`:
/// `z_{m+1/2} = P_C((z_m + x)/2)`;
/// `z_{m+1} = z_m + tau_m (prox_{gamma f}(2 z_{m+1/2} - z_m) - z_{m+1/2})`.
///
/// The half-iterates converge strongly to the constrained prox and all lie in
/// `C`; the returned point is the last half-iterate. A bitwise fixed point
/// `z_{m+1} == z_m` exits immediately, which makes the one-step property
/// exact when `prox_{gamma f}(x)` is already feasible.
pub fn prox_constrained_nonsmooth(
    x: &[f64],
    gamma: f64,
    prox_f: impl Fn(&[f64], f64) -> Vec<f64>,
    project_c: impl Fn(&[f64]) -> Vec<f64>,
    tau: &Sequence,
    stop: StopRule,
) -> Result<(Vec<f64>, EngineRun), EngineError> {
    assert!(tau.min() > 0.0 && tau.max() <= 2.0, "tau_m must lie in (0, 2]");
    let p = prox_f(x, gamma);
    let mut z: Vec<f64> = p.iter().zip(x).map(|(pi, xi)| 2.0 * pi - xi).collect();
    let mut half = p;
    let mut step_norms = Vec::new();
    for m in 0..stop.max_iters {
        let tau_m = tau.at(m);
        let mid: Vec<f64> = z.iter().zip(x).map(|(zi, xi)| 0.5 * (zi + xi)).collect();
        half = project_c(&mid);
        let reflected: Vec<f64> = half.iter().zip(&z).map(|(h, zi)| 2.0 * h - zi).collect();
        let proxed = prox_f(&reflected, gamma);
        let next: Vec<f64> = z
            .iter()
            .zip(proxed.iter().zip(&half))
            .map(|(zi, (pi, hi))| zi + tau_m * (pi - hi))
            .collect();
        if !all_finite(&next) {
            return Err(EngineError::NonFinite { iter: m });
        }
        if next == z {
            // exact fixed point: the half-iterate is the constrained prox
            step_norms.push(0.0);
            break;
        }
        let step = dist(&next, &z);
        step_norms.push(step);
        z = next;
        if step <= stop.step_tol {
            break;
        }
    }
    let iterations = step_norms.len();
    Ok((half, EngineRun { iterations, step_norms }))
}

/// Projected-gradient computation of `prox_{i_C + kappa*g}(x)`:
/// `x_{n+1} = x_n + lambda_n (P_C(x_n - gamma_n (kappa grad_g(x_n) + x_n - x)) - x_n)`.
///
/// Slower than [`prox_constrained_smooth`] (its prox factor is no longer
/// strictly contractive); kept as an independent cross-check. Requires
/// `gamma_hi < 2/(kappa*beta + 1)`.
pub fn projected_gradient_prox(
    x: &[f64],
    kappa: f64,
    grad_g: impl Fn(&[f64]) -> Vec<f64>,
    beta: f64,
    project_c: impl Fn(&[f64]) -> Vec<f64>,
    schedule: &FbSchedule,
    stop: StopRule,
) -> Result<(Vec<f64>, EngineRun), EngineError> {
    schedule.check_against(kappa * beta + 1.0)?;
    let mut xn = x.to_vec();
    let mut step_norms = Vec::new();
    for n in 0..stop.max_iters {
        let gamma = schedule.gamma.at(n);
        let lambda = schedule.lambda.at(n);
        let grad = grad_g(&xn);
        let arg: Vec<f64> = xn
            .iter()
            .zip(grad.iter().zip(x))
            .map(|(xi, (gi, xx))| xi - gamma * (kappa * gi + xi - xx))
            .collect();
        let projected = project_c(&arg);
        let next: Vec<f64> = xn
            .iter()
            .zip(&projected)
            .map(|(xi, pi)| xi + lambda * (pi - xi))
            .collect();
        if !all_finite(&next) {
            return Err(EngineError::NonFinite { iter: n });
        }
        let step = dist(&next, &xn);
        step_norms.push(step);
        xn = next;
        if step <= stop.step_tol {
            break;
        }
    }
    let iterations = step_norms.len();
    Ok((xn, EngineRun { iterations, step_norms }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_prox;
    use crate::util::dist;

    fn soft_vec(v: &[f64], c: f64) -> Vec<f64> {
        v.iter()
            .map(|&t| t.signum() * (t.abs() - c).max(0.0))
            .collect()
    }

    #[test]
    fn fb_reaches_soft_threshold_minimizer() {
        // f1 = |.|, f2 = 0.5*(.-2)^2: minimizer soft(2,1) = 1
        let (x, _) = fb_solve(
            |v, s| soft_vec(v, s),
            |v| vec![v[0] - 2.0],
            1.0,
            &FbSchedule::constant(1.0, 1.0),
            &ErrorInjection::none(),
            &[0.0],
            StopRule::new(500, 1e-12),
        )
        .unwrap();
        assert!((x[0] - 1.0).abs() < 1e-9, "{x:?}");
    }

    #[test]
    fn fb_tolerates_summable_errors() {
        let errors = ErrorInjection::geometric_a(vec![0.5], 0.5);
        let (x, _) = fb_solve(
            |v, s| soft_vec(v, s),
            |v| vec![v[0] - 2.0],
            1.0,
            &FbSchedule::constant(1.0, 1.0),
            &errors,
            &[0.0],
            StopRule::new(4000, 0.0),
        )
        .unwrap();
        assert!((x[0] - 1.0).abs() < 1e-6, "{x:?}");
    }

    #[test]
    fn fb_linear_rate_for_strongly_convex_term() {
        // f1 = 0.5*||. - c||^2 (modulus 1), f2 = 0.5*(.-2)^2.
        // Unique minimizer of the sum: (c + 2)/2.
        let c = -4.0;
        let solution = (c + 2.0) / 2.0;
        let schedule = FbSchedule::constant(0.5, 1.0);
        let bound = ConvergenceBound::strongly_convex_fb(1.0, 0.5, 1.0).unwrap();
        let prox = |v: &[f64], s: f64| vec![(v[0] + s * c) / (1.0 + s)];
        let mut x = vec![10.0];
        let e0 = (x[0] - solution).abs();
        for n in 1..=60 {
            let (next, _) = fb_solve(
                &prox,
                |v| vec![v[0] - 2.0],
                1.0,
                &schedule,
                &ErrorInjection::none(),
                &x,
                StopRule::new(1, 0.0),
            )
            .unwrap();
            x = next;
            let en = (x[0] - solution).abs();
            assert!(
                en <= bound.rho.powi(n) * e0 + 1e-14,
                "iteration {n}: {en} vs {}",
                bound.rho.powi(n) * e0
            );
        }
    }

    #[test]
    fn fb_rejects_oversized_steps() {
        let r = fb_solve(
            |v, _| v.to_vec(),
            |v| v.to_vec(),
            1.0,
            &FbSchedule::constant(2.5, 1.0),
            &ErrorInjection::none(),
            &[0.0],
            StopRule::new(10, 0.0),
        );
        assert!(matches!(r, Err(EngineError::StepSizeTooLarge { .. })));
    }

    #[test]
    fn fb_aborts_on_nonfinite() {
        let r = fb_solve(
            |v, _| v.to_vec(),
            |_| vec![f64::NAN],
            1.0,
            &FbSchedule::constant(1.0, 1.0),
            &ErrorInjection::none(),
            &[0.0],
            StopRule::new(10, 0.0),
        );
        assert!(matches!(r, Err(EngineError::NonFinite { iter: 0 })));
    }

    #[test]
    fn dr_reaches_soft_threshold_minimizer() {
        // g1 = |.|, g2 = 0.5*(.-2)^2; prox_{k g2}(z) = (z + 2k)/(1+k)
        let out = dr_solve(
            |v, s| soft_vec(v, s),
            |v, s| vec![(v[0] + 2.0 * s) / (1.0 + s)],
            &DrSchedule::constant(1.0, 1.0).unwrap(),
            &ErrorInjection::none(),
            &[0.0],
            StopRule::new(500, 1e-13),
        )
        .unwrap();
        assert!((out.solution[0] - 1.0).abs() < 1e-9, "{:?}", out.solution);
    }

    #[test]
    fn dr_projects_onto_interval() {
        // g1 = indicator of [2,3], g2 = 0.5*||.||^2: nearest feasible point to 0
        let out = dr_solve(
            |v, _| vec![v[0].clamp(2.0, 3.0)],
            |v, s| vec![v[0] / (1.0 + s)],
            &DrSchedule::constant(1.0, 1.0).unwrap(),
            &ErrorInjection::none(),
            &[0.0],
            StopRule::new(2000, 1e-13),
        )
        .unwrap();
        assert!((out.solution[0] - 2.0).abs() < 1e-8, "{:?}", out.solution);
    }

    #[test]
    fn peaceman_rachford_limit_converges_under_strong_convexity() {
        // tau = 2 with strongly convex g2: half-iterates still converge.
        let schedule = DrSchedule::new(Sequence::Constant(2.0), 1.0, DrMode::StronglyConvex).unwrap();
        let out = dr_solve(
            |v, s| soft_vec(v, s),
            |v, s| vec![(v[0] + 2.0 * s) / (1.0 + s)],
            &schedule,
            &ErrorInjection::none(),
            &[5.0],
            StopRule::new(4000, 0.0),
        )
        .unwrap();
        assert!((out.solution[0] - 1.0).abs() < 1e-8, "{:?}", out.solution);
    }

    #[test]
    fn weak_mode_rejects_tau_two() {
        assert!(DrSchedule::new(Sequence::Constant(2.0), 1.0, DrMode::WeakConvergence).is_err());
        assert!(DrSchedule::new(Sequence::Constant(2.0), 1.0, DrMode::StronglyConvex).is_ok());
    }

    #[test]
    fn constrained_smooth_prox_1d() {
        // g = 0.5*||.||^2, C = [1,2], x = 0: answer 1
        let (p, _) = prox_constrained_smooth(
            &[0.0],
            1.0,
            |v| v.to_vec(),
            1.0,
            |v| vec![v[0].clamp(1.0, 2.0)],
            &FbSchedule::for_lipschitz(1.0),
            &[1.5],
            StopRule::new(2000, 1e-13),
        )
        .unwrap();
        assert!((p[0] - 1.0).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn constrained_smooth_one_step_property() {
        // x_init = prox_{kappa g}(x) in C keeps every iterate there exactly.
        // g = 0.5*||. - c||^2: prox_{k g}(x) = (x + k c)/(1 + k).
        let c = [1.0, 0.5];
        let x = [2.0, 1.5];
        let kappa = 1.0;
        let p0: Vec<f64> = x.iter().zip(&c).map(|(xi, ci)| (xi + kappa * ci) / (1.0 + kappa)).collect();
        // C = [0,2]^2 contains p0 = (1.5, 1.0)
        let project = |v: &[f64]| v.iter().map(|t| t.clamp(0.0, 2.0)).collect::<Vec<_>>();
        let grad = |v: &[f64]| v.iter().zip(&c).map(|(vi, ci)| vi - ci).collect::<Vec<_>>();
        let mut xi = p0.clone();
        for _ in 0..25 {
            let (next, _) = prox_constrained_smooth(
                &x,
                kappa,
                grad,
                1.0,
                project,
                &FbSchedule::constant(0.9, 1.0),
                &xi,
                StopRule::new(1, 0.0),
            )
            .unwrap();
            assert!(dist(&next, &p0) <= 1e-12, "{next:?} vs {p0:?}");
            xi = next;
        }
    }

    #[test]
    fn constrained_smooth_matches_coupled_quadratic_case() {
        // 0.5*y'Ly with L = [[1,1],[1,1]], x = (2,4), C = [-1,1]^2 -> (0.5, 1)
        let grad = |v: &[f64]| vec![v[0] + v[1], v[0] + v[1]];
        let (p, _) = prox_constrained_smooth(
            &[2.0, 4.0],
            1.0,
            grad,
            2.0,
            |v| v.iter().map(|t| t.clamp(-1.0, 1.0)).collect::<Vec<_>>(),
            &FbSchedule::for_lipschitz(2.0),
            &[0.0, 0.0],
            StopRule::new(5000, 1e-13),
        )
        .unwrap();
        assert!((p[0] - 0.5).abs() < 1e-6 && (p[1] - 1.0).abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn constrained_nonsmooth_one_step_property() {
        // prox_{gamma f}(x) already in C: every half-iterate equals it, bitwise.
        let prox_f = |v: &[f64], s: f64| soft_vec(v, s);
        let project = |v: &[f64]| v.iter().map(|t| t.clamp(0.0, 5.0)).collect::<Vec<_>>();
        let x = [3.0];
        let (p, run) = prox_constrained_nonsmooth(
            &x,
            1.0,
            prox_f,
            project,
            &Sequence::Constant(1.0),
            StopRule::new(50, 0.0),
        )
        .unwrap();
        assert_eq!(p, vec![2.0]);
        assert_eq!(run.iterations, 1); // fixed point detected during m = 0
    }

    #[test]
    fn constrained_nonsmooth_clamps_to_interval() {
        // f = |.|, gamma = 1, C = [0.2, 1], x = 3: separable answer clamp(soft(3,1)) = 1
        let (p, _) = prox_constrained_nonsmooth(
            &[3.0],
            1.0,
            |v, s| soft_vec(v, s),
            |v| vec![v[0].clamp(0.2, 1.0)],
            &Sequence::Constant(1.0),
            StopRule::new(3000, 1e-13),
        )
        .unwrap();
        assert!((p[0] - 1.0).abs() < 1e-8, "{p:?}");
    }

    #[test]
    fn constrained_nonsmooth_pure_projection() {
        let (p, _) = prox_constrained_nonsmooth(
            &[7.0, -3.0],
            1.0,
            |v, _| v.to_vec(),
            |v| v.iter().map(|t| t.clamp(-1.0, 1.0)).collect::<Vec<_>>(),
            &Sequence::Constant(1.0),
            StopRule::new(2000, 1e-13),
        )
        .unwrap();
        assert!((p[0] - 1.0).abs() < 1e-8 && (p[1] + 1.0).abs() < 1e-8, "{p:?}");
    }

    #[test]
    fn projected_gradient_agrees_with_fb_inner() {
        let grad = |v: &[f64]| vec![v[0] + v[1], v[0] + v[1]];
        let x = [2.0, 4.0];
        let project = |v: &[f64]| v.iter().map(|t| t.clamp(-1.0, 1.0)).collect::<Vec<_>>();
        let (a, _) = prox_constrained_smooth(
            &x, 1.0, grad, 2.0, project,
            &FbSchedule::for_lipschitz(2.0),
            &[0.0, 0.0],
            StopRule::new(5000, 1e-13),
        )
        .unwrap();
        let grad = |v: &[f64]| vec![v[0] + v[1], v[0] + v[1]];
        let project = |v: &[f64]| v.iter().map(|t| t.clamp(-1.0, 1.0)).collect::<Vec<_>>();
        let (b, _) = projected_gradient_prox(
            &x, 1.0, grad, 2.0, project,
            &FbSchedule::for_lipschitz(3.0), // 2/(kappa*beta+1) = 2/3
            StopRule::new(20000, 1e-13),
        )
        .unwrap();
        assert!(dist(&a, &b) < 1e-6, "{a:?} vs {b:?}");
        // kappa = 0 reduces to plain projection
        let grad = |v: &[f64]| vec![v[0] + v[1], v[0] + v[1]];
        let project = |v: &[f64]| v.iter().map(|t| t.clamp(-1.0, 1.0)).collect::<Vec<_>>();
        let (c, _) = projected_gradient_prox(
            &x, 0.0, grad, 2.0, project,
            &FbSchedule::constant(0.9, 1.0),
            StopRule::new(2000, 1e-13),
        )
        .unwrap();
        assert!(dist(&c, &[1.0, 1.0]) < 1e-9, "{c:?}");
    }

    #[test]
    fn converged_point_is_a_fixed_point() {
        let grad = |v: &[f64]| vec![v[0] + v[1], v[0] + v[1]];
        let project = |v: &[f64]| v.iter().map(|t| t.clamp(-1.0, 1.0)).collect::<Vec<_>>();
        let (p, _) = prox_constrained_smooth(
            &[2.0, 4.0], 1.0, grad, 2.0, project,
            &FbSchedule::for_lipschitz(2.0),
            &[0.0, 0.0],
            StopRule::new(20000, 0.0),
        )
        .unwrap();
        let grad = |v: &[f64]| vec![v[0] + v[1], v[0] + v[1]];
        let project = |v: &[f64]| v.iter().map(|t| t.clamp(-1.0, 1.0)).collect::<Vec<_>>();
        let (_, run) = prox_constrained_smooth(
            &[2.0, 4.0], 1.0, grad, 2.0, project,
            &FbSchedule::for_lipschitz(2.0),
            &p,
            StopRule::new(1, 0.0),
        )
        .unwrap();
        assert!(run.last_step_norm() <= 1e-10, "{}", run.last_step_norm());
    }

    #[test]
    fn inner_solvers_agree_with_brute_force() {
        // prox_{i_C + g} for g = 0.5*y'Qy + l1 handled across both engines
        // on a 2-D instance, against the grid oracle.
        let x = [1.3, -0.4];
        let q = [[1.5, 0.3], [0.3, 0.8]];
        let beta = 1.7; // > max eigenvalue of q
        let grad = |v: &[f64]| {
            vec![
                q[0][0] * v[0] + q[0][1] * v[1],
                q[1][0] * v[0] + q[1][1] * v[1],
            ]
        };
        let project = |v: &[f64]| v.iter().map(|t| t.clamp(-0.5, 0.5)).collect::<Vec<_>>();
        let (fb, _) = prox_constrained_smooth(
            &x, 1.0, grad, beta, project,
            &FbSchedule::for_lipschitz(beta),
            &[0.0, 0.0],
            StopRule::new(20000, 1e-13),
        )
        .unwrap();
        let oracle = brute_force_prox(
            |y| {
                if y.iter().any(|t| t.abs() > 0.5) {
                    return f64::INFINITY;
                }
                0.5 * (q[0][0] * y[0] * y[0]
                    + 2.0 * q[0][1] * y[0] * y[1]
                    + q[1][1] * y[1] * y[1])
            },
            &x,
            &[(-0.6, 0.6), (-0.6, 0.6)],
        )
        .unwrap();
        assert!(dist(&fb, &oracle) < 1e-5, "{fb:?} vs {oracle:?}");
    }
}

//! Problem-building traits consumed by the splitting engines.
//!
//! The engines stay agnostic of where a term comes from: a term is whatever
//! can evaluate itself, apply its proximity operator at a requested scale, or
//! project onto itself. Declared constants (Lipschitz bound, frame constant)
//! travel with the implementing type.

/// A convex term accessed through its proximity operator.
///
/// `prox(x, gamma)` must return `argmin_y 0.5*||y - x||^2 + gamma * f(y)`.
pub trait ProxTerm {
    fn eval(&self, x: &[f64]) -> f64;
    fn prox(&self, x: &[f64], gamma: f64) -> Vec<f64>;
}

/// A convex term accessed through its gradient.
///
/// Implementations may be differentiable only on the feasible set of the
/// problem they belong to; the nested solvers guarantee that `grad` is only
/// ever called at feasible points.
pub trait SmoothTerm {
    fn eval(&self, x: &[f64]) -> f64;
    fn grad(&self, x: &[f64]) -> Vec<f64>;
    /// Lipschitz constant of the gradient on the feasible set.
    fn lipschitz(&self) -> f64;
}

/// A closed convex set accessed through its (exact) projection.
pub trait Constraint {
    fn project(&self, x: &[f64]) -> Vec<f64>;
}

/// Quadratic data term `0.5 * ||x - target||^2`, scaled by `weight`.
///
/// The workhorse smooth term of the toy problems and of several tests.
#[derive(Clone, Debug)]
pub struct QuadraticDistance {
    pub target: Vec<f64>,
    pub weight: f64,
}

impl QuadraticDistance {
    pub fn new(target: Vec<f64>) -> Self {
        Self { target, weight: 1.0 }
    }
}

impl SmoothTerm for QuadraticDistance {
    fn eval(&self, x: &[f64]) -> f64 {
        0.5 * self.weight
            * x.iter()
                .zip(&self.target)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.target)
            .map(|(a, b)| self.weight * (a - b))
            .collect()
    }

    fn lipschitz(&self) -> f64 {
        self.weight
    }
}

/// Axis-aligned box `[lo_k, hi_k]` per coordinate; infinite bounds allowed.
#[derive(Clone, Debug)]
pub struct BoxConstraint {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxConstraint {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bound length mismatch");
        assert!(
            lo.iter().zip(&hi).all(|(l, h)| l <= h),
            "box has an empty coordinate interval"
        );
        Self { lo, hi }
    }

    /// Whole space: every coordinate unconstrained.
    pub fn free(dim: usize) -> Self {
        Self {
            lo: vec![f64::NEG_INFINITY; dim],
            hi: vec![f64::INFINITY; dim],
        }
    }

    /// The same interval for every coordinate.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Self {
        Self::new(vec![lo; dim], vec![hi; dim])
    }
}

impl Constraint for BoxConstraint {
    fn project(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.lo.len(), "dimension mismatch");
        x.iter()
            .enumerate()
            .map(|(k, &t)| t.max(self.lo[k]).min(self.hi[k]))
            .collect()
    }
}

//! Constrained proximal-splitting optimization and image restoration.
//!
//! This crate solves problems of the form
//!
//! ```text
//!     minimize  f(x) + g(x)   subject to  x in C
//! ```
//!
//! where `f` is a convex, possibly non-smooth separable potential, `g` is a
//! convex data term that is smooth on `C`, and `C` is a closed convex set.
//! The constrained proximity operator `prox_{i_C + h}` generally has no closed
//! form, so the solvers here compute it iteratively and nest that computation
//! inside an outer splitting loop:
//!
//! * [`nested::solve_dr_outer`] — Douglas-Rachford outer loop whose second
//!   prox is approximated by an inner forward-backward iteration,
//! * [`nested::solve_fb_outer`] — forward-backward outer loop whose prox step
//!   is approximated by an inner Douglas-Rachford iteration.
//!
//! For data terms whose gradient is not Lipschitz near the domain boundary
//! (signal-dependent Gaussian and Poisson likelihoods), the [`noise`] module
//! builds a quadratic extension with curvature capped at a chosen `theta`,
//! which restores the Lipschitz property without moving the minimizer once
//! `theta` is large enough.
//!
//! The [`imaging`] module provides the periodic uniform blur, orthonormal
//! symlet-6 wavelet transform, two-basis tight frame, and the frame-domain
//! box constraint used by the restoration pipeline in [`pipeline`]; the thin
//! `proxsplit` binary exposes that pipeline as the `simulate`, `restore`,
//! `validate` and `prox` subcommands.
//!
//! Each major capability has a runnable demonstration under `examples/`.

pub mod counterexample;
pub mod engines;
pub mod imaging;
pub mod nested;
pub mod noise;
pub mod ops;
pub mod oracle;
pub mod pipeline;
pub mod prox;
pub mod trace;
pub mod util;

//! Brute-force grid minimizers used as ground truth.
//!
//! These are deliberately slow and independent of every solver in the crate:
//! nested grid refinement over a box, nothing else. They are the arbiter the
//! tests and the validation suite compare iterative results against.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid oracle supports at most 3 dimensions, got {0}")]
    DimensionTooLarge(usize),
    #[error("search box is empty in coordinate {0}")]
    EmptyBox(usize),
    #[error("no finite objective value found on the search grid")]
    NoFiniteValue,
}

const POINTS_PER_AXIS: usize = 33;
const REFINEMENT_ROUNDS: usize = 14;

/// Minimize `objective` over the given box by nested grid search.
///
/// The objective may return `+inf` to encode constraints; the search keeps
/// the best finite grid point and re-grids a shrinking window around it.
/// With the default 14 rounds the final grid step is far below 1e-6 per
/// coordinate for boxes of moderate extent.
pub fn grid_minimize(
    objective: impl Fn(&[f64]) -> f64,
    box_bounds: &[(f64, f64)],
    rounds: usize,
) -> Result<Vec<f64>, OracleError> {
    let dim = box_bounds.len();
    if dim > 3 {
        return Err(OracleError::DimensionTooLarge(dim));
    }
    for (k, &(lo, hi)) in box_bounds.iter().enumerate() {
        if !(lo <= hi) {
            return Err(OracleError::EmptyBox(k));
        }
    }

    let mut window: Vec<(f64, f64)> = box_bounds.to_vec();
    let mut best_point = vec![0.0; dim];
    let mut best_value = f64::INFINITY;

    for _ in 0..rounds {
        let steps: Vec<f64> = window
            .iter()
            .map(|&(lo, hi)| (hi - lo) / (POINTS_PER_AXIS - 1) as f64)
            .collect();
        let mut idx = vec![0usize; dim];
        let mut point = vec![0.0; dim];
        loop {
            for k in 0..dim {
                point[k] = window[k].0 + steps[k] * idx[k] as f64;
            }
            let v = objective(&point);
            if v < best_value {
                best_value = v;
                best_point.copy_from_slice(&point);
            }
            // odometer increment
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] < POINTS_PER_AXIS {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == dim {
                    break;
                }
            }
            if k == dim {
                break;
            }
        }
        // shrink the window around the incumbent, clipped to the original box
        for k in 0..dim {
            let half = 3.0 * steps[k];
            let lo = (best_point[k] - half).max(box_bounds[k].0);
            let hi = (best_point[k] + half).min(box_bounds[k].1);
            window[k] = (lo, hi);
        }
    }

    if !best_value.is_finite() {
        return Err(OracleError::NoFiniteValue);
    }
    Ok(best_point)
}

/// Brute-force proximity oracle: minimizer of `0.5*||y - x||^2 + objective(y)`
/// over the box, for problems of dimension at most 3.
pub fn brute_force_prox(
    objective: impl Fn(&[f64]) -> f64,
    x: &[f64],
    box_bounds: &[(f64, f64)],
) -> Result<Vec<f64>, OracleError> {
    assert_eq!(x.len(), box_bounds.len(), "dimension mismatch");
    grid_minimize(
        |y| {
            let sq: f64 = y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            0.5 * sq + objective(y)
        },
        box_bounds,
        REFINEMENT_ROUNDS,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_objective_returns_the_point() {
        let got = brute_force_prox(|_| 0.0, &[1.0, 2.0], &[(-10.0, 10.0), (-10.0, 10.0)]).unwrap();
        assert!((got[0] - 1.0).abs() < 1e-6 && (got[1] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn soft_threshold_in_one_dimension() {
        let got = brute_force_prox(|y| y[0].abs(), &[3.0], &[(-10.0, 10.0)]).unwrap();
        assert!((got[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn coupled_quadratic_on_a_box() {
        // 0.5*y'Ly with L = [[1,1],[1,1]] at x = (2,4) over [-1,1]^2 has
        // constrained prox (0.5, 1).
        let got = brute_force_prox(
            |y| 0.5 * (y[0] * y[0] + 2.0 * y[0] * y[1] + y[1] * y[1]),
            &[2.0, 4.0],
            &[(-1.0, 1.0), (-1.0, 1.0)],
        )
        .unwrap();
        assert!((got[0] - 0.5).abs() < 1e-6, "{got:?}");
        assert!((got[1] - 1.0).abs() < 1e-6, "{got:?}");
    }

    #[test]
    fn rejects_dimension_above_three() {
        let b = [(0.0, 1.0); 4];
        assert!(brute_force_prox(|_| 0.0, &[0.0; 4], &b).is_err());
    }

    #[test]
    fn infinite_objective_regions_are_skipped() {
        // indicator of a diagonal band; feasible minimum well inside the box
        let got = grid_minimize(
            |y| {
                if (y[0] - y[1]).abs() > 0.5 {
                    f64::INFINITY
                } else {
                    (y[0] - 2.0) * (y[0] - 2.0) + y[1] * y[1]
                }
            },
            &[(-3.0, 3.0), (-3.0, 3.0)],
            14,
        )
        .unwrap();
        // stationarity of (a-2)^2 + b^2 on b = a - 0.5: a = 1.25, b = 0.75
        assert!((got[0] - 1.25).abs() < 1e-5, "{got:?}");
        assert!((got[1] - 0.75).abs() < 1e-5, "{got:?}");
    }
}

//! Per-outer-iteration run traces and their CSV serialization.

use std::io::Write;

/// Trace CSV schema version; bump when columns change.
pub const TRACE_SCHEMA_VERSION: u32 = 1;

/// One outer iteration of a nested solve.
#[derive(Clone, Copy, Debug)]
pub struct TraceRow {
    pub outer_iter: usize,
    pub wall_seconds: f64,
    pub objective: f64,
    /// `(objective - final) / (initial - final)`: 1 at the start, 0 at the
    /// end. Filled in by [`RunTrace::finalize`].
    pub normalized_objective: f64,
    pub inner_iters: usize,
    pub outer_step_norm: f64,
}

/// Ordered trace rows; wall times are nondecreasing by construction.
#[derive(Clone, Debug, Default)]
pub struct RunTrace {
    rows: Vec<TraceRow>,
}

impl RunTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        outer_iter: usize,
        wall_seconds: f64,
        objective: f64,
        inner_iters: usize,
        outer_step_norm: f64,
    ) {
        self.rows.push(TraceRow {
            outer_iter,
            wall_seconds,
            objective,
            normalized_objective: f64::NAN,
            inner_iters,
            outer_step_norm,
        });
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Fill in normalized objectives. The run's last objective maps to 0 and
    /// the first to 1; a flat trace normalizes to all zeros.
    pub fn finalize(&mut self) {
        let (Some(first), Some(last)) = (self.rows.first(), self.rows.last()) else {
            return;
        };
        let span = first.objective - last.objective;
        let last_obj = last.objective;
        for row in &mut self.rows {
            row.normalized_objective = if span.abs() > 0.0 {
                ((row.objective - last_obj) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
    }

    /// First wall time at which the normalized objective drops to `level`,
    /// together with the outer iteration index.
    pub fn time_to_normalized(&self, level: f64) -> Option<(f64, usize)> {
        self.rows
            .iter()
            .find(|r| r.normalized_objective <= level)
            .map(|r| (r.wall_seconds, r.outer_iter))
    }

    /// Serialize as CSV with a versioned header row.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "# proxsplit trace schema {TRACE_SCHEMA_VERSION}")?;
        writeln!(
            out,
            "outer_iter,wall_seconds,objective,normalized_objective,inner_iters,outer_step_norm"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.6},{:.17e},{:.17e},{},{:.17e}",
                r.outer_iter,
                r.wall_seconds,
                r.objective,
                r.normalized_objective,
                r.inner_iters,
                r.outer_step_norm
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_spans_one_to_zero() {
        let mut t = RunTrace::new();
        t.push(0, 0.0, 10.0, 1, 1.0);
        t.push(1, 0.1, 6.0, 1, 0.5);
        t.push(2, 0.2, 2.0, 1, 0.1);
        t.finalize();
        let rows = t.rows();
        assert_eq!(rows[0].normalized_objective, 1.0);
        assert_eq!(rows[2].normalized_objective, 0.0);
        assert!((rows[1].normalized_objective - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wall_times_nondecreasing_and_csv_has_header() {
        let mut t = RunTrace::new();
        t.push(0, 0.0, 3.0, 2, 1.0);
        t.push(1, 0.5, 1.0, 3, 0.2);
        t.finalize();
        assert!(t.rows().windows(2).all(|w| w[0].wall_seconds <= w[1].wall_seconds));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("# proxsplit trace schema 1\nouter_iter,"));
        assert_eq!(s.lines().count(), 4);
    }

    #[test]
    fn flat_trace_normalizes_to_zero() {
        let mut t = RunTrace::new();
        t.push(0, 0.0, 5.0, 1, 0.0);
        t.push(1, 0.1, 5.0, 1, 0.0);
        t.finalize();
        assert!(t.rows().iter().all(|r| r.normalized_objective == 0.0));
    }
}

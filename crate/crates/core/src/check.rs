//! Residual bookkeeping shared by every identity check.

use crate::numerics::{Mat, Scalar, Tolerance};

/// Outcome of one identity check over all its sampled instances.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport<S> {
    pub name: String,
    pub passed: bool,
    /// Largest residual seen (max-norm).
    pub max_residual: S,
    /// Location of the largest residual.
    pub worst: Option<String>,
    /// Location of the first sample that failed the zero test.
    pub first_failure: Option<String>,
    pub samples: usize,
    pub failures: usize,
    pub notes: Vec<String>,
}

impl<S: Scalar> CheckReport<S> {
    /// Report for a check with nothing to test.
    pub fn vacuous(name: &str) -> Self {
        ResidualTracker::new(Tolerance::default()).finish(name)
    }
}

/// Accumulates residuals sample by sample, judging each against its own scale.
#[derive(Debug, Clone)]
pub struct ResidualTracker<S> {
    tol: Tolerance,
    max: S,
    worst: Option<String>,
    first_failure: Option<String>,
    samples: usize,
    failures: usize,
    notes: Vec<String>,
}

impl<S: Scalar> ResidualTracker<S> {
    pub fn new(tol: Tolerance) -> Self {
        ResidualTracker {
            tol,
            max: S::zero(),
            worst: None,
            first_failure: None,
            samples: 0,
            failures: 0,
            notes: Vec::new(),
        }
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// Records a scalar residual; `scale` is the magnitude of the operands.
    pub fn record(&mut self, residual: S, scale: &S, loc: impl FnOnce() -> String) {
        self.samples += 1;
        let failed = !residual.approx_zero(scale, &self.tol);
        let new_max = self.samples == 1 || residual > self.max;
        if failed || new_max {
            let at = loc();
            if failed {
                self.failures += 1;
                if self.first_failure.is_none() {
                    self.first_failure = Some(at.clone());
                }
            }
            if new_max {
                self.max = residual;
                self.worst = Some(at);
            }
        }
    }

    /// Records `‖lhs − rhs‖_max` with scale `max(‖lhs‖, ‖rhs‖)`.
    pub fn record_pair(&mut self, lhs: &Mat<S>, rhs: &Mat<S>, loc: impl FnOnce() -> String) {
        let residual = (lhs.clone() - rhs).max_norm();
        let (a, b) = (lhs.max_norm(), rhs.max_norm());
        let scale = if a > b { a } else { b };
        self.record(residual, &scale, loc);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Folds another tracker's samples into this one, in order.
    pub fn absorb(&mut self, other: ResidualTracker<S>) {
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
        if other.samples > 0 && (other.max > self.max || self.samples == 0) {
            self.max = other.max;
            self.worst = other.worst;
        }
        self.samples += other.samples;
        self.failures += other.failures;
        self.notes.extend(other.notes);
    }

    /// Folds a finished report (from a sub-check) into this tracker.
    pub fn merge(&mut self, r: CheckReport<S>) {
        if self.first_failure.is_none() {
            self.first_failure = r.first_failure;
        }
        if r.samples > 0 && (r.max_residual > self.max || self.samples == 0) {
            self.max = r.max_residual;
            self.worst = r.worst;
        }
        self.samples += r.samples;
        self.failures += r.failures;
        self.notes.extend(r.notes);
    }

    pub fn finish(self, name: &str) -> CheckReport<S> {
        CheckReport {
            name: name.to_string(),
            passed: self.failures == 0,
            max_residual: self.max,
            worst: self.worst,
            first_failure: self.first_failure,
            samples: self.samples,
            failures: self.failures,
            notes: self.notes,
        }
    }
}

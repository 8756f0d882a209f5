//! Serializable outcome of one numerical or exact check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::zeta_num::mc::MCEstimate;

/// How a check's discrepancy is judged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|lhs - rhs| <= tol · max(|lhs|, |rhs|)`.
    Relative(f64),
    /// `|lhs - rhs| <= k · sqrt(se_lhs² + se_rhs²)`, with a rounding floor of
    /// `1e-12 · max(|lhs|, |rhs|)`.
    Stderr(f64),
    /// `|lhs - rhs| <= tol`.
    Absolute(f64),
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// Name of the identity being tested.
    pub anchor: String,
    pub params: serde_json::Value,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub lhs_stderr: f64,
    pub rhs_stderr: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Side conditions added by [`CheckRecord::and`] that failed.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub failed_conditions: usize,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

fn judge(tolerance: Tolerance, abs_err: f64, rel_err: f64, se: f64, scale: f64) -> bool {
    abs_err.is_finite()
        && match tolerance {
            Tolerance::Relative(t) => rel_err <= t,
            Tolerance::Stderr(k) => abs_err <= k * se + 1e-12 * scale,
            Tolerance::Absolute(t) => abs_err <= t,
            Tolerance::Exact => abs_err == 0.0,
        }
}

impl CheckRecord {
    pub fn compare(
        id: impl Into<String>,
        anchor: impl Into<String>,
        params: serde_json::Value,
        lhs: &MCEstimate,
        rhs: &MCEstimate,
        tolerance: Tolerance,
    ) -> Self {
        let abs_err = (lhs.value - rhs.value).norm();
        let scale = lhs.value.norm().max(rhs.value.norm());
        let rel_err = if scale > 0.0 { abs_err / scale } else { abs_err };
        let se = (lhs.stderr * lhs.stderr + rhs.stderr * rhs.stderr).sqrt();
        let pass = judge(tolerance, abs_err, rel_err, se, scale);
        Self {
            id: id.into(),
            anchor: anchor.into(),
            params,
            lhs: lhs.value,
            rhs: rhs.value,
            lhs_stderr: lhs.stderr,
            rhs_stderr: rhs.stderr,
            abs_err,
            rel_err,
            tolerance,
            pass,
            notes: Vec::new(),
            failed_conditions: 0,
        }
    }

    /// Re-judges the comparison under a different tolerance, keeping failed
    /// side conditions.
    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        let se = (self.lhs_stderr * self.lhs_stderr + self.rhs_stderr * self.rhs_stderr).sqrt();
        let scale = self.lhs.norm().max(self.rhs.norm());
        self.tolerance = tolerance;
        self.pass = judge(tolerance, self.abs_err, self.rel_err, se, scale) && self.failed_conditions == 0;
        self
    }

    /// A boolean check without numeric sides.
    pub fn flag(id: impl Into<String>, anchor: impl Into<String>, params: serde_json::Value, pass: bool) -> Self {
        let one = MCEstimate::exact(Complex64::new(1.0, 0.0), "exact");
        let v = MCEstimate::exact(Complex64::new(if pass { 1.0 } else { 0.0 }, 0.0), "exact");
        Self::compare(id, anchor, params, &v, &one, Tolerance::Exact)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn and(mut self, ok: bool, note: impl Into<String>) -> Self {
        if !ok {
            self.pass = false;
            self.failed_conditions += 1;
            self.notes.push(note.into());
        }
        self
    }

    pub fn summary(&self) -> String {
        format!(
            "{} [{}] lhs={:.10e}{:+.10e}i rhs={:.10e}{:+.10e}i rel_err={:.3e} se=({:.2e},{:.2e}) {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.lhs.re,
            self.lhs.im,
            self.rhs.re,
            self.rhs.im,
            self.rel_err,
            self.lhs_stderr,
            self.rhs_stderr,
            self.notes.join("; ")
        )
    }
}

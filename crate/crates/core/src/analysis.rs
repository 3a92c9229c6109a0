//! Closed-form second-order statistics of the estimation error and of the
//! residual interference-plus-noise `V`.
//!
//! All functions are plain scalar formulas. They accept `P = 0`, where the
//! estimate vanishes and every error variance equals one.

use serde::{Deserialize, Serialize};

use crate::config::SchemeTag;

/// Neumaier-compensated sum. The closed forms add mixed-sign terms that can
/// exceed the result by several orders of magnitude at high power.
pub(crate) fn compensated_sum(terms: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// `σ²_H̃ = 1 - αPL/(PK + σ²)` for superimposed pilots.
pub fn error_variance_sp(alpha: f64, power: f64, users: usize, coherence: usize, sigma2: f64) -> f64 {
    let d = power * users as f64 + sigma2;
    1.0 - alpha * power * coherence as f64 / d
}

/// `σ²_H̃ = 1 - P·lp/(PK + σ²)` for regular pilots.
pub fn error_variance_rp(power: f64, users: usize, lp: usize, sigma2: f64) -> f64 {
    let d = power * users as f64 + sigma2;
    1.0 - power * lp as f64 / d
}

/// Traces of the six covariance blocks of `E[V V^H]` for superimposed pilots,
/// with the assembled per-entry variance.
///
/// `tr_r4`, `tr_r5` and `tr_r6` are the traces of one member of each
/// conjugate pair; the assembly counts each of them twice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBreakdown {
    pub scheme: SchemeTag,
    pub antennas: usize,
    pub coherence: usize,
    /// noise energy
    pub tr_r1: f64,
    /// estimation error times data
    pub tr_r2: f64,
    /// estimation error times pilots
    pub tr_r3: f64,
    /// pilot-error / noise cross term
    pub tr_r4: f64,
    /// data-error / noise cross term
    pub tr_r5: f64,
    /// pilot-error / data-error cross term
    pub tr_r6: f64,
    pub sigma_v2: f64,
}

impl VarianceBreakdown {
    /// `(r1 + r2 + r3 + 2 r4 + 2 r5 + 2 r6) / (N L)`.
    pub fn assemble(&self) -> f64 {
        compensated_sum(&[
            self.tr_r1,
            self.tr_r2,
            self.tr_r3,
            2.0 * self.tr_r4,
            2.0 * self.tr_r5,
            2.0 * self.tr_r6,
        ]) / (self.antennas * self.coherence) as f64
    }
}

pub fn trace_terms_sp(
    alpha: f64,
    power: f64,
    users: usize,
    coherence: usize,
    antennas: usize,
    sigma2: f64,
) -> VarianceBreakdown {
    let (k, l, n, p) = (users as f64, coherence as f64, antennas as f64, power);
    let d = p * k + sigma2;
    let kln = k * l * n;

    let tr_r1 = l * n * sigma2;
    let tr_r2 = (1.0 - alpha) * p * kln * (1.0 - alpha * p * l / d);
    let tr_r3 = alpha * p * kln * (1.0 - alpha * p * k / d);
    let tr_r4 = -(alpha * p / d) * kln * sigma2;
    let tr_r5 = 0.0;
    // R6 splits into three traces; the middle one has zero mean.
    let s = (alpha * (1.0 - alpha)).sqrt();
    let first = alpha * s * p * p / (d * d) * k * k * l * l * n;
    let third = s * p / d * k * k * l * n;
    let tr_r6 = s * p * (first - third);

    let mut out = VarianceBreakdown {
        scheme: SchemeTag::Sp,
        antennas,
        coherence,
        tr_r1,
        tr_r2,
        tr_r3,
        tr_r4,
        tr_r5,
        tr_r6,
        sigma_v2: 0.0,
    };
    out.sigma_v2 = out.assemble();
    out
}

/// Per-entry variance of `V` for superimposed pilots, as the six-term closed form.
pub fn sigma_v2_sp(alpha: f64, power: f64, users: usize, coherence: usize, sigma2: f64) -> f64 {
    let (k, l, p) = (users as f64, coherence as f64, power);
    let d = p * k + sigma2;
    let ap = alpha * p;
    compensated_sum(&[
        sigma2,
        (1.0 - alpha) * p * k * (1.0 - ap / d * l),
        ap * k * (1.0 - ap / d * k),
        -2.0 * ap / d * k * sigma2,
        2.0 * alpha * alpha * (1.0 - alpha) * p * p * p / (d * d) * k * k * l,
        -2.0 * alpha * (1.0 - alpha) * p * p / d * k * k,
    ])
}

/// Per-entry variance of `V_rp`: `PK σ²_H̃ + σ²`.
pub fn sigma_v2_rp(power: f64, users: usize, lp: usize, sigma2: f64) -> f64 {
    power * users as f64 * error_variance_rp(power, users, lp, sigma2) + sigma2
}

//! Confidence intervals from a bootstrap distribution: percentile and BCa.
//!
//! BCa conventions used here:
//! * bias correction `z0 = Φ⁻¹((#{θ* < θ̂} + ½·#{θ* = θ̂}) / B)`, with the
//!   proportion clamped into `[1/(B+1), B/(B+1)]`;
//! * acceleration from leave-one-pair-out jackknife values,
//!   `a = Σ(θ̄ − θᵢ)³ / (6·[Σ(θ̄ − θᵢ)²]^{3/2})`;
//! * adjusted cut points `Φ(z0 + (z0 + z)/(1 − a(z0 + z)))`, read off the
//!   distribution with the configured quantile rule (type 7 by default).
//!
//! When the acceleration is undefined (zero jackknife variance) or the
//! distribution is constant, the percentile interval is returned and the
//! diagnostics say so.

mod normal;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use normal::{normal_cdf, normal_quantile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    Percentile,
    #[default]
    Bca,
}

impl fmt::Display for IntervalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalMethod::Percentile => f.write_str("percentile"),
            IntervalMethod::Bca => f.write_str("bca"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantileRule {
    /// Hyndman–Fan type 7: `h = (n−1)q`, linear between neighbours.
    #[default]
    Linear,
    /// Hyndman–Fan type 1: smallest order statistic with `k/n >= q`.
    InvertedCdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub point_estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: IntervalMethod,
    pub replicates_used: usize,
}

impl IntervalEstimate {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackReason {
    ZeroJackknifeVariance,
    ConstantDistribution,
    TooFewInstances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcaDiagnostics {
    pub z0: f64,
    /// `None` when the jackknife variance is zero.
    pub acceleration: Option<f64>,
    pub clamped: bool,
    pub degenerate_replicates: usize,
    /// Adjusted cut points actually used.
    pub alpha_lower: f64,
    pub alpha_upper: f64,
    pub fallback: Option<FallbackReason>,
}

/// Quantile of an ascending-sorted, non-empty sample.
pub fn quantile(sorted: &[f64], q: f64, rule: QuantileRule) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("quantile level must lie in [0, 1], got {q}")));
    }
    if sorted.is_empty() {
        return Err(Error::InsufficientData("quantile of an empty distribution".into()));
    }
    let n = sorted.len();
    Ok(match rule {
        QuantileRule::Linear => {
            let h = (n - 1) as f64 * q;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            let frac = h - lo as f64;
            if lo == hi {
                sorted[lo]
            } else {
                sorted[lo] + frac * (sorted[hi] - sorted[lo])
            }
        }
        QuantileRule::InvertedCdf => {
            let k = (n as f64 * q).ceil() as usize;
            sorted[k.clamp(1, n) - 1]
        }
    })
}

fn sorted_copy(distribution: &[f64]) -> Result<Vec<f64>> {
    if distribution.is_empty() {
        return Err(Error::InsufficientData("empty bootstrap distribution".into()));
    }
    let mut v = distribution.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )))
    }
}

fn percentile_from_sorted(sorted: &[f64], theta_hat: f64, level: f64, rule: QuantileRule) -> Result<IntervalEstimate> {
    let alpha = 1.0 - level;
    Ok(IntervalEstimate {
        point_estimate: theta_hat,
        lower: quantile(sorted, alpha / 2.0, rule)?,
        upper: quantile(sorted, 1.0 - alpha / 2.0, rule)?,
        level,
        method: IntervalMethod::Percentile,
        replicates_used: sorted.len(),
    })
}

/// Percentile interval: the `α/2` and `1−α/2` quantiles of the distribution.
pub fn percentile_ci(distribution: &[f64], theta_hat: f64, level: f64, rule: QuantileRule) -> Result<IntervalEstimate> {
    check_level(level)?;
    let sorted = sorted_copy(distribution)?;
    percentile_from_sorted(&sorted, theta_hat, level, rule)
}

/// Jackknife acceleration; `None` when all jackknife values coincide.
pub fn acceleration(jackknife: &[f64]) -> Option<f64> {
    let n = jackknife.len() as f64;
    let mean = jackknife.iter().sum::<f64>() / n;
    let (mut s2, mut s3) = (0.0, 0.0);
    for &v in jackknife {
        let d = mean - v;
        s2 += d * d;
        s3 += d * d * d;
    }
    if s2 > 0.0 {
        Some(s3 / (6.0 * s2.powf(1.5)))
    } else {
        None
    }
}

/// Bias-corrected and accelerated interval.
pub fn bca_ci(
    distribution: &[f64],
    theta_hat: f64,
    jackknife: &[f64],
    level: f64,
    rule: QuantileRule,
) -> Result<(IntervalEstimate, BcaDiagnostics)> {
    check_level(level)?;
    if jackknife.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "BCa acceleration needs at least 2 jackknife values, got {}",
            jackknife.len()
        )));
    }
    let sorted = sorted_copy(distribution)?;
    let b = sorted.len();
    let below = sorted.partition_point(|&x| x < theta_hat);
    let not_above = sorted.partition_point(|&x| x <= theta_hat);
    let ties = not_above - below;
    let raw = (below as f64 + 0.5 * ties as f64) / b as f64;
    let (lo, hi) = (1.0 / (b as f64 + 1.0), b as f64 / (b as f64 + 1.0));
    let clamped = raw < lo || raw > hi;
    let z0 = normal_quantile(raw.clamp(lo, hi))?;
    let accel = acceleration(jackknife);
    let alpha = 1.0 - level;

    let fallback = if sorted[0] == sorted[b - 1] {
        Some(FallbackReason::ConstantDistribution)
    } else if accel.is_none() {
        Some(FallbackReason::ZeroJackknifeVariance)
    } else {
        None
    };
    if let Some(reason) = fallback {
        let interval = percentile_from_sorted(&sorted, theta_hat, level, rule)?;
        let diag = BcaDiagnostics {
            z0,
            acceleration: accel,
            clamped,
            degenerate_replicates: 0,
            alpha_lower: alpha / 2.0,
            alpha_upper: 1.0 - alpha / 2.0,
            fallback: Some(reason),
        };
        return Ok((interval, diag));
    }

    let a = accel.unwrap_or(0.0);
    let adjust = |z: f64| {
        let w = z0 + z;
        normal_cdf(z0 + w / (1.0 - a * w))
    };
    let alpha_lower = adjust(normal_quantile(alpha / 2.0)?);
    let alpha_upper = adjust(normal_quantile(1.0 - alpha / 2.0)?);
    let q1 = quantile(&sorted, alpha_lower, rule)?;
    let q2 = quantile(&sorted, alpha_upper, rule)?;
    let interval = IntervalEstimate {
        point_estimate: theta_hat,
        lower: q1.min(q2),
        upper: q1.max(q2),
        level,
        method: IntervalMethod::Bca,
        replicates_used: b,
    };
    let diag = BcaDiagnostics {
        z0,
        acceleration: accel,
        clamped,
        degenerate_replicates: 0,
        alpha_lower,
        alpha_upper,
        fallback: None,
    };
    Ok((interval, diag))
}

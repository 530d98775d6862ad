//! Aggregation over repeated cross-validation runs: per pair, the min/max
//! p-value, how many runs were significant, and min/max of the lower limit,
//! observed difference, and upper limit.

use serde::{Deserialize, Serialize};

use super::{compare_pair, ComparisonConfig, ComparisonResult};
use crate::dataset::PairedEvaluationSet;
use crate::error::{Error, Result};
use crate::metrics::MetricSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatedSummary {
    pub system_a: String,
    pub system_b: String,
    /// Full-set scores from the first run.
    pub score_a: f64,
    pub score_b: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_significant: usize,
    pub ci_lower_min: f64,
    pub ci_lower_max: f64,
    pub diff_min: f64,
    pub diff_max: f64,
    pub ci_upper_min: f64,
    pub ci_upper_max: f64,
    pub n_runs: usize,
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

impl RepeatedSummary {
    /// Column-wise aggregation of per-run results for one pair.
    pub fn aggregate(runs: &[ComparisonResult]) -> Result<Self> {
        let first = runs
            .first()
            .ok_or_else(|| Error::Arity("repeated comparison needs at least one run".into()))?;
        if let Some(other) = runs
            .iter()
            .find(|r| r.system_a != first.system_a || r.system_b != first.system_b)
        {
            return Err(Error::Consistency(format!(
                "run compares {} vs {}, expected {} vs {}",
                other.system_a, other.system_b, first.system_a, first.system_b
            )));
        }
        let (p_min, p_max) = min_max(runs.iter().map(|r| r.permutation.p_value));
        let (ci_lower_min, ci_lower_max) = min_max(runs.iter().map(|r| r.interval.lower));
        let (diff_min, diff_max) = min_max(runs.iter().map(|r| r.theta_hat));
        let (ci_upper_min, ci_upper_max) = min_max(runs.iter().map(|r| r.interval.upper));
        Ok(RepeatedSummary {
            system_a: first.system_a.clone(),
            system_b: first.system_b.clone(),
            score_a: first.score_a,
            score_b: first.score_b,
            p_min,
            p_max,
            n_significant: runs.iter().filter(|r| r.significant).count(),
            ci_lower_min,
            ci_lower_max,
            diff_min,
            diff_max,
            ci_upper_min,
            ci_upper_max,
            n_runs: runs.len(),
        })
    }
}

/// Runs [`compare_pair`] on each repetition and aggregates. Run `r` uses the
/// `r`-th child stream of the configured seed.
pub fn repeated_comparison(
    runs: &[PairedEvaluationSet],
    sys_a: &str,
    sys_b: &str,
    metric: &MetricSpec,
    cfg: &ComparisonConfig,
) -> Result<RepeatedSummary> {
    let results = per_run(runs, sys_a, sys_b, metric, cfg)?;
    RepeatedSummary::aggregate(&results)
}

fn per_run(
    runs: &[PairedEvaluationSet],
    sys_a: &str,
    sys_b: &str,
    metric: &MetricSpec,
    cfg: &ComparisonConfig,
) -> Result<Vec<ComparisonResult>> {
    if runs.is_empty() {
        return Err(Error::Arity("repeated comparison needs at least one run".into()));
    }
    let stream = cfg.resampling.stream();
    runs.iter()
        .enumerate()
        .map(|(r, eval)| {
            let mut run_cfg = *cfg;
            run_cfg.resampling.seed = stream.child(r as u64).master_seed();
            compare_pair(eval, sys_a, sys_b, metric, &run_cfg)
        })
        .collect()
}

/// Summaries for every pair `(systems[i], systems[j])`, `i < j`.
pub fn repeated_study(
    runs: &[PairedEvaluationSet],
    systems: &[String],
    metric: &MetricSpec,
    cfg: &ComparisonConfig,
) -> Result<Vec<RepeatedSummary>> {
    if systems.len() < 2 {
        return Err(Error::Arity(format!(
            "repeated comparison needs at least 2 systems, got {}",
            systems.len()
        )));
    }
    let mut out = Vec::new();
    for (i, a) in systems.iter().enumerate() {
        for b in &systems[i + 1..] {
            out.push(repeated_comparison(runs, a, b, metric, cfg)?);
        }
    }
    Ok(out)
}

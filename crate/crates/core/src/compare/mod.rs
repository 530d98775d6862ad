//! Pairwise and multi-system comparisons.

mod coverage;
mod letters;
mod repeated;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::PairedEvaluationSet;
use crate::error::{Error, Result};
use crate::interval::{bca_ci, percentile_ci, BcaDiagnostics, FallbackReason, IntervalEstimate, IntervalMethod};
use crate::metrics::MetricSpec;
use crate::resampling::{bootstrap_diff_distribution, jackknife_diff_values, lookup_pair, ResamplingConfig};
use crate::sigtest::{fisher_pitman_exact, monte_carlo_test, Alternative, PermutationResult};

pub use coverage::{coverage_simulation, coverage_study, CoverageReport, IntervalSpec, SyntheticPopulationSpec};
pub use letters::{letter_groups, letter_name, GroupedSystem, LetterGroup, LetterGrouping};
pub use repeated::{repeated_comparison, repeated_study, RepeatedSummary};

pub const DEFAULT_ALPHA: f64 = 0.05;
/// Below this many instances BCa results come with a small-sample warning.
pub const SMALL_SAMPLE_WARNING_N: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub resampling: ResamplingConfig,
    /// Significance level of the permutation test.
    pub alpha: f64,
    pub alternative: Alternative,
    /// Enumerate all 2^N exchanges instead of sampling.
    pub exact: bool,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        ComparisonConfig {
            resampling: ResamplingConfig::default(),
            alpha: DEFAULT_ALPHA,
            alternative: Alternative::TwoSided,
            exact: false,
        }
    }
}

impl ComparisonConfig {
    pub fn with_seed(seed: u64) -> Self {
        ComparisonConfig {
            resampling: ResamplingConfig::with_seed(seed),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.resampling.validate()?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Non-fatal conditions surfaced alongside results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Warning {
    SmallSample {
        n: usize,
        threshold: usize,
    },
    BcaClamped {
        system_a: String,
        system_b: String,
        z0: f64,
    },
    PercentileFallback {
        system_a: String,
        system_b: String,
        reason: FallbackReason,
    },
    DegenerateReplicates {
        system_a: String,
        system_b: String,
        count: usize,
        replicates: usize,
    },
    EstimateOutsideInterval {
        system_a: String,
        system_b: String,
        theta_hat: f64,
        lower: f64,
        upper: f64,
    },
    NonTransitiveGrouping {
        pairs: Vec<(String, String)>,
    },
    LowTrialCount {
        trials: usize,
        recommended: usize,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::SmallSample { n, threshold } => {
                write!(f, "evaluation set has {n} instances (< {threshold}); BCa may be inaccurate")
            }
            Warning::BcaClamped { system_a, system_b, z0 } => write!(
                f,
                "{system_a} vs {system_b}: all replicates on one side of the estimate, bias correction clamped (z0 = {z0:.6})"
            ),
            Warning::PercentileFallback { system_a, system_b, reason } => {
                write!(f, "{system_a} vs {system_b}: percentile interval used instead of BCa ({reason:?})")
            }
            Warning::DegenerateReplicates { system_a, system_b, count, replicates } => write!(
                f,
                "{system_a} vs {system_b}: {count} of {replicates} replicates hit a degenerate metric case"
            ),
            Warning::EstimateOutsideInterval { system_a, system_b, theta_hat, lower, upper } => write!(
                f,
                "{system_a} vs {system_b}: observed difference {theta_hat:.6} lies outside [{lower:.6}, {upper:.6}]"
            ),
            Warning::NonTransitiveGrouping { pairs } => {
                let list: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}~{b}")).collect();
                write!(
                    f,
                    "non-significant pairs without a shared letter (non-transitive pattern): {}",
                    list.join(", ")
                )
            }
            Warning::LowTrialCount { trials, recommended } => {
                write!(f, "only {trials} trials (< {recommended}); coverage estimate is noisy")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub system_a: String,
    pub system_b: String,
    pub metric: String,
    pub n_instances: usize,
    pub score_a: f64,
    pub score_b: f64,
    /// `score_a - score_b` on the full evaluation set.
    pub theta_hat: f64,
    pub interval: IntervalEstimate,
    pub bca_diag: Option<BcaDiagnostics>,
    pub permutation: PermutationResult,
    pub significant: bool,
    pub warnings: Vec<Warning>,
}

/// Bootstrap interval and permutation test for `score(A) - score(B)`.
pub fn compare_pair(
    eval: &PairedEvaluationSet,
    sys_a: &str,
    sys_b: &str,
    metric: &MetricSpec,
    cfg: &ComparisonConfig,
) -> Result<ComparisonResult> {
    cfg.validate()?;
    let (a, b) = lookup_pair(eval, sys_a, sys_b, metric)?;
    let gold = eval.gold();
    let n = eval.n_instances();
    let rs = &cfg.resampling;
    let score_a = metric.score(gold.as_ref(), a.as_ref())?.value;
    let score_b = metric.score(gold.as_ref(), b.as_ref())?.value;
    let theta_hat = score_a - score_b;

    let dist = bootstrap_diff_distribution(eval, sys_a, sys_b, metric, rs)?;
    let mut warnings = Vec::new();
    let pair = || (sys_a.to_owned(), sys_b.to_owned());

    let (interval, bca_diag) = match rs.method {
        IntervalMethod::Percentile => (
            percentile_ci(&dist.values, theta_hat, rs.confidence_level, rs.quantile_rule)?,
            None,
        ),
        IntervalMethod::Bca => {
            if n < SMALL_SAMPLE_WARNING_N {
                warnings.push(Warning::SmallSample {
                    n,
                    threshold: SMALL_SAMPLE_WARNING_N,
                });
            }
            let (interval, mut diag) = if n < 2 {
                let interval = percentile_ci(&dist.values, theta_hat, rs.confidence_level, rs.quantile_rule)?;
                let alpha = 1.0 - rs.confidence_level;
                let diag = BcaDiagnostics {
                    z0: 0.0,
                    acceleration: None,
                    clamped: false,
                    degenerate_replicates: 0,
                    alpha_lower: alpha / 2.0,
                    alpha_upper: 1.0 - alpha / 2.0,
                    fallback: Some(FallbackReason::TooFewInstances),
                };
                (interval, diag)
            } else {
                let jk = jackknife_diff_values(eval, sys_a, sys_b, metric)?;
                bca_ci(
                    &dist.values,
                    theta_hat,
                    &jk.values,
                    rs.confidence_level,
                    rs.quantile_rule,
                )?
            };
            diag.degenerate_replicates = dist.degenerate_replicates;
            if diag.clamped {
                let (system_a, system_b) = pair();
                warnings.push(Warning::BcaClamped {
                    system_a,
                    system_b,
                    z0: diag.z0,
                });
            }
            if let Some(reason) = diag.fallback {
                let (system_a, system_b) = pair();
                warnings.push(Warning::PercentileFallback {
                    system_a,
                    system_b,
                    reason,
                });
            }
            (interval, Some(diag))
        }
    };
    if dist.degenerate_replicates > 0 {
        let (system_a, system_b) = pair();
        warnings.push(Warning::DegenerateReplicates {
            system_a,
            system_b,
            count: dist.degenerate_replicates,
            replicates: rs.replicates,
        });
    }
    if !interval.contains(theta_hat) {
        let (system_a, system_b) = pair();
        warnings.push(Warning::EstimateOutsideInterval {
            system_a,
            system_b,
            theta_hat,
            lower: interval.lower,
            upper: interval.upper,
        });
    }

    let permutation = if cfg.exact {
        fisher_pitman_exact(eval, sys_a, sys_b, metric, cfg.alternative)?
    } else {
        monte_carlo_test(eval, sys_a, sys_b, metric, rs.replicates, rs.seed, cfg.alternative)?
    };

    Ok(ComparisonResult {
        system_a: sys_a.to_owned(),
        system_b: sys_b.to_owned(),
        metric: metric.name().to_owned(),
        n_instances: n,
        score_a,
        score_b,
        theta_hat,
        interval,
        bca_diag,
        significant: permutation.p_value < cfg.alpha,
        permutation,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub metric: String,
    pub n_instances: usize,
    /// Systems by descending full-set score, with their letters.
    pub grouping: LetterGrouping,
    /// One entry per (higher-ranked, lower-ranked) pair, in rank order.
    pub comparisons: Vec<ComparisonResult>,
    pub warnings: Vec<Warning>,
}

impl MatrixReport {
    pub fn comparison(&self, a: &str, b: &str) -> Option<&ComparisonResult> {
        self.comparisons.iter().find(|c| c.system_a == a && c.system_b == b)
    }
}

/// Systems ranked by descending full-set score; ties keep input order.
pub fn rank_systems(eval: &PairedEvaluationSet, metric: &MetricSpec) -> Result<Vec<(String, f64)>> {
    let gold = eval.gold().as_ref();
    let mut ranked = eval
        .system_names()
        .map(|name| Ok((name.to_owned(), metric.score(gold, eval.system_ref(name)?)?.value)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1));
    Ok(ranked)
}

/// Every system against every lower-ranked one, plus letter groups from the
/// permutation-test outcomes. P-values are not adjusted for multiplicity.
pub fn compare_all(eval: &PairedEvaluationSet, metric: &MetricSpec, cfg: &ComparisonConfig) -> Result<MatrixReport> {
    if eval.n_systems() < 2 {
        return Err(Error::Arity(format!(
            "comparing systems needs at least 2, got {}",
            eval.n_systems()
        )));
    }
    let ranked = rank_systems(eval, metric)?;
    let k = ranked.len();
    let mut significant = vec![vec![false; k]; k];
    let mut comparisons = Vec::with_capacity(k * (k - 1) / 2);
    let mut warnings = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let result = compare_pair(eval, &ranked[i].0, &ranked[j].0, metric, cfg)?;
            significant[i][j] = result.significant;
            significant[j][i] = result.significant;
            for w in &result.warnings {
                if !warnings.contains(w) {
                    warnings.push(w.clone());
                }
            }
            comparisons.push(result);
        }
    }
    let grouping = letter_groups(&ranked, &significant)?;
    if !grouping.non_transitive_pairs.is_empty() {
        warnings.push(Warning::NonTransitiveGrouping {
            pairs: grouping
                .non_transitive_pairs
                .iter()
                .map(|&(i, j)| (ranked[i].0.clone(), ranked[j].0.clone()))
                .collect(),
        });
    }
    Ok(MatrixReport {
        metric: metric.name().to_owned(),
        n_instances: eval.n_instances(),
        grouping,
        comparisons,
        warnings,
    })
}

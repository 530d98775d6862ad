//! Monte Carlo check of interval coverage against synthetic populations whose
//! true metric difference is known in closed form.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Warning;
use crate::dataset::PairedEvaluationSet;
use crate::error::{Error, Result};
use crate::interval::{bca_ci, percentile_ci, IntervalEstimate, IntervalMethod};
use crate::metrics::{LabelValue, MetricSpec};
use crate::resampling::{bootstrap_diff_distribution, jackknife_diff_values, ResamplingConfig};
use crate::rng::Purpose;

pub const RECOMMENDED_MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticPopulationSpec {
    /// Per-instance correctness of A and B as a correlated Bernoulli pair with
    /// marginal accuracies `p_a`, `p_b` and `agreement = P(both right or both
    /// wrong)`. The true accuracy difference is `p_a - p_b`.
    PairedBernoulli { p_a: f64, p_b: f64, agreement: f64 },
    /// Gold `g ~ N(0,1)`; system X predicts `r_x·g + sqrt(1−r_x²)·e_x` with
    /// unit-variance noises correlated by `noise_coupling`. The true Pearson
    /// difference is `r_a - r_b`.
    PairedGaussian { r_a: f64, r_b: f64, noise_coupling: f64 },
}

impl fmt::Display for SyntheticPopulationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PairedBernoulli { p_a, p_b, agreement } => write!(f, "paired-bernoulli:{p_a},{p_b},{agreement}"),
            Self::PairedGaussian {
                r_a,
                r_b,
                noise_coupling,
            } => {
                write!(f, "paired-gaussian:{r_a},{r_b},{noise_coupling}")
            }
        }
    }
}

impl FromStr for SyntheticPopulationSpec {
    type Err = Error;

    /// `paired-bernoulli:pA,pB,agreement` or `paired-gaussian:rA,rB,coupling`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("population {s:?} lacks ':' before its parameters")))?;
        let params = params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad population parameter {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let [x, y, z] = params[..] else {
            return Err(Error::Config(format!(
                "population needs 3 parameters, got {}",
                params.len()
            )));
        };
        let pop = match kind {
            "paired-bernoulli" => Self::PairedBernoulli {
                p_a: x,
                p_b: y,
                agreement: z,
            },
            "paired-gaussian" => Self::PairedGaussian {
                r_a: x,
                r_b: y,
                noise_coupling: z,
            },
            other => return Err(Error::Config(format!("unknown population kind {other:?}"))),
        };
        pop.validate()?;
        Ok(pop)
    }
}

impl SyntheticPopulationSpec {
    /// Joint probabilities `[both right, only A right, only B right, both wrong]`.
    pub fn bernoulli_cells(p_a: f64, p_b: f64, agreement: f64) -> [f64; 4] {
        let only_a = (1.0 - agreement + (p_a - p_b)) / 2.0;
        let only_b = (1.0 - agreement - (p_a - p_b)) / 2.0;
        let both = p_a - only_a;
        let neither = 1.0 - both - only_a - only_b;
        [both, only_a, only_b, neither]
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::PairedBernoulli { p_a, p_b, agreement } => {
                for (name, v) in [("p_a", p_a), ("p_b", p_b), ("agreement", agreement)] {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
                    }
                }
                let cells = Self::bernoulli_cells(p_a, p_b, agreement);
                if cells.iter().any(|&c| c < -1e-12) {
                    return Err(Error::Config(format!(
                        "agreement {agreement} is incompatible with marginals {p_a}, {p_b}"
                    )));
                }
            }
            Self::PairedGaussian {
                r_a,
                r_b,
                noise_coupling,
            } => {
                for (name, v) in [("r_a", r_a), ("r_b", r_b), ("noise_coupling", noise_coupling)] {
                    if !(-1.0..=1.0).contains(&v) {
                        return Err(Error::Config(format!("{name} must lie in [-1, 1], got {v}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn true_difference(&self) -> f64 {
        match *self {
            Self::PairedBernoulli { p_a, p_b, .. } => p_a - p_b,
            Self::PairedGaussian { r_a, r_b, .. } => r_a - r_b,
        }
    }

    pub fn metric(&self) -> MetricSpec {
        match self {
            Self::PairedBernoulli { .. } => MetricSpec::accuracy(),
            Self::PairedGaussian { .. } => MetricSpec::pearson(),
        }
    }

    /// Draws an evaluation set of `n` instances with systems `"A"` and `"B"`.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Result<PairedEvaluationSet> {
        let mut gold = Vec::with_capacity(n);
        let mut pred_a = Vec::with_capacity(n);
        let mut pred_b = Vec::with_capacity(n);
        match *self {
            Self::PairedBernoulli { p_a, p_b, agreement } => {
                let [both, only_a, only_b, _] = Self::bernoulli_cells(p_a, p_b, agreement);
                let label = |positive: bool| LabelValue::Label(if positive { "pos" } else { "neg" }.into());
                for _ in 0..n {
                    let truth: bool = rng.random();
                    let u: f64 = rng.random();
                    let (a_right, b_right) = if u < both {
                        (true, true)
                    } else if u < both + only_a {
                        (true, false)
                    } else if u < both + only_a + only_b {
                        (false, true)
                    } else {
                        (false, false)
                    };
                    gold.push(label(truth));
                    pred_a.push(label(truth == a_right));
                    pred_b.push(label(truth == b_right));
                }
            }
            Self::PairedGaussian {
                r_a,
                r_b,
                noise_coupling,
            } => {
                let c = noise_coupling;
                for _ in 0..n {
                    let g: f64 = rng.sample(StandardNormal);
                    let z1: f64 = rng.sample(StandardNormal);
                    let z2: f64 = rng.sample(StandardNormal);
                    let e_a = z1;
                    let e_b = c * z1 + (1.0 - c * c).sqrt() * z2;
                    gold.push(LabelValue::Real(g));
                    pred_a.push(LabelValue::Real(r_a * g + (1.0 - r_a * r_a).sqrt() * e_a));
                    pred_b.push(LabelValue::Real(r_b * g + (1.0 - r_b * r_b).sqrt() * e_b));
                }
            }
        }
        PairedEvaluationSet::from_rows(gold, [("A", pred_a), ("B", pred_b)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub method: IntervalMethod,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub population: SyntheticPopulationSpec,
    pub true_difference: f64,
    pub n_eval: usize,
    pub method: IntervalMethod,
    pub nominal_level: f64,
    pub trials: usize,
    pub covered: usize,
    pub empirical_coverage: f64,
    pub mean_interval_length: f64,
    pub warnings: Vec<Warning>,
}

/// Coverage for several interval specs evaluated on the same trial stream:
/// trial `t` draws its data from population substream `t` and resamples with
/// the `t`-th child seed, so every spec sees identical bootstrap replicates.
pub fn coverage_study(
    population: &SyntheticPopulationSpec,
    n_eval: usize,
    trials: usize,
    cfg: &ResamplingConfig,
    specs: &[IntervalSpec],
) -> Result<Vec<CoverageReport>> {
    population.validate()?;
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::InsufficientData("coverage needs at least one trial".into()));
    }
    if n_eval < 2 {
        return Err(Error::InsufficientData(format!(
            "coverage needs evaluation sets of at least 2 instances, got {n_eval}"
        )));
    }
    for spec in specs {
        if !(spec.level > 0.0 && spec.level < 1.0) {
            return Err(Error::Config(format!(
                "confidence level must lie in (0, 1), got {}",
                spec.level
            )));
        }
    }
    let truth = population.true_difference();
    let metric = population.metric();
    let stream = cfg.stream();
    let need_jackknife = specs.iter().any(|s| s.method == IntervalMethod::Bca);

    let per_trial: Vec<Vec<IntervalEstimate>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let eval = population.sample(n_eval, &mut stream.rng(Purpose::Population, t))?;
            let trial_cfg = ResamplingConfig {
                seed: stream.child(t).master_seed(),
                ..*cfg
            };
            let dist = bootstrap_diff_distribution(&eval, "A", "B", &metric, &trial_cfg)?;
            let gold = eval.gold();
            let theta_hat = metric.score(gold.as_ref(), eval.system_ref("A")?)?.value
                - metric.score(gold.as_ref(), eval.system_ref("B")?)?.value;
            let jk = if need_jackknife {
                jackknife_diff_values(&eval, "A", "B", &metric)?.values
            } else {
                Vec::new()
            };
            specs
                .iter()
                .map(|spec| match spec.method {
                    IntervalMethod::Percentile => percentile_ci(&dist.values, theta_hat, spec.level, cfg.quantile_rule),
                    IntervalMethod::Bca => {
                        bca_ci(&dist.values, theta_hat, &jk, spec.level, cfg.quantile_rule).map(|r| r.0)
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut warnings = Vec::new();
    if trials < RECOMMENDED_MIN_TRIALS {
        warnings.push(Warning::LowTrialCount {
            trials,
            recommended: RECOMMENDED_MIN_TRIALS,
        });
    }
    Ok(specs
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let covered = per_trial.iter().filter(|iv| iv[k].contains(truth)).count();
            let total_len: f64 = per_trial.iter().map(|iv| iv[k].length()).sum();
            CoverageReport {
                population: *population,
                true_difference: truth,
                n_eval,
                method: spec.method,
                nominal_level: spec.level,
                trials,
                covered,
                empirical_coverage: covered as f64 / trials as f64,
                mean_interval_length: total_len / trials as f64,
                warnings: warnings.clone(),
            }
        })
        .collect())
}

/// Coverage of the interval method and level configured in `cfg`.
pub fn coverage_simulation(
    population: &SyntheticPopulationSpec,
    n_eval: usize,
    trials: usize,
    cfg: &ResamplingConfig,
) -> Result<CoverageReport> {
    let spec = IntervalSpec {
        method: cfg.method,
        level: cfg.confidence_level,
    };
    let mut reports = coverage_study(population, n_eval, trials, cfg, &[spec])?;
    Ok(reports.remove(0))
}

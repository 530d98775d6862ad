//! Paired bootstrap, leave-one-pair-out jackknife, and pair-swap masks.
//!
//! Every replicate draws from its own [`ReplicateStream`] substream and the
//! results are assembled in replicate-index order, so distributions are
//! bit-identical regardless of how many rayon workers run them.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::PairedEvaluationSet;
use crate::error::{Error, Result};
use crate::interval::{IntervalMethod, QuantileRule};
use crate::metrics::{MetricSpec, Values};
use crate::rng::{Purpose, ReplicateStream};

pub const DEFAULT_REPLICATES: usize = 10_000;
pub const DEFAULT_CONFIDENCE_LEVEL: f64 = 0.95;
pub const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResamplingConfig {
    pub replicates: usize,
    pub confidence_level: f64,
    pub method: IntervalMethod,
    pub seed: u64,
    pub quantile_rule: QuantileRule,
    /// Permits fewer than [`MIN_REPLICATES`] replicates.
    #[serde(default)]
    pub allow_few_replicates: bool,
}

impl Default for ResamplingConfig {
    fn default() -> Self {
        ResamplingConfig {
            replicates: DEFAULT_REPLICATES,
            confidence_level: DEFAULT_CONFIDENCE_LEVEL,
            method: IntervalMethod::Bca,
            seed: 0,
            quantile_rule: QuantileRule::Linear,
            allow_few_replicates: false,
        }
    }
}

impl ResamplingConfig {
    pub fn with_seed(seed: u64) -> Self {
        ResamplingConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(Error::Config(format!(
                "confidence level must lie strictly inside (0, 1), got {}",
                self.confidence_level
            )));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicate count must be positive".into()));
        }
        if self.replicates < MIN_REPLICATES && !self.allow_few_replicates {
            return Err(Error::TooFewReplicates {
                got: self.replicates,
                min: MIN_REPLICATES,
            });
        }
        Ok(())
    }

    pub fn stream(&self) -> ReplicateStream {
        ReplicateStream::new(self.seed)
    }
}

/// `n` indices drawn uniformly from `[0, n)` with replacement.
pub fn bootstrap_indices(n: usize, replicate_index: u64, stream: &ReplicateStream) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    fill_bootstrap_indices(&mut out, n, replicate_index, stream);
    out
}

pub fn fill_bootstrap_indices(out: &mut Vec<usize>, n: usize, replicate_index: u64, stream: &ReplicateStream) {
    let mut rng = stream.rng(Purpose::Bootstrap, replicate_index);
    out.clear();
    out.extend((0..n).map(|_| rng.random_range(0..n)));
}

/// `n` fair coin flips; `true` at `i` exchanges the two systems' predictions
/// on instance `i`.
pub fn permutation_swap_mask(n: usize, replicate_index: u64, stream: &ReplicateStream) -> Vec<bool> {
    let mut rng = stream.rng(Purpose::Permutation, replicate_index);
    (0..n).map(|_| rng.random::<bool>()).collect()
}

/// Writes the exchanged prediction columns into `out_a`/`out_b`.
pub fn apply_swap(mask: &[bool], a: &Values, b: &Values, out_a: &mut Values, out_b: &mut Values) {
    out_a.clear();
    out_b.clear();
    for (i, &swap) in mask.iter().enumerate() {
        let (src_a, src_b) = if swap { (b, a) } else { (a, b) };
        out_a.push_from(src_a, i);
        out_b.push_from(src_b, i);
    }
}

/// Metric difference `score(A) - score(B)` plus whether either score hit a
/// degenerate case.
pub fn paired_difference(metric: &MetricSpec, gold: &Values, a: &Values, b: &Values) -> Result<(f64, bool)> {
    let sa = metric.score(gold.as_ref(), a.as_ref())?;
    let sb = metric.score(gold.as_ref(), b.as_ref())?;
    Ok((sa.value - sb.value, sa.degenerate || sb.degenerate))
}

/// Bootstrap or jackknife replicate values, in replicate order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateValues {
    pub values: Vec<f64>,
    pub degenerate_replicates: usize,
}

impl ReplicateValues {
    fn collect(pairs: Vec<(f64, bool)>) -> Self {
        let degenerate_replicates = pairs.iter().filter(|p| p.1).count();
        ReplicateValues {
            values: pairs.into_iter().map(|p| p.0).collect(),
            degenerate_replicates,
        }
    }
}

pub(crate) fn lookup_pair<'a>(
    eval: &'a PairedEvaluationSet,
    sys_a: &str,
    sys_b: &str,
    metric: &MetricSpec,
) -> Result<(&'a Values, &'a Values)> {
    let a = eval.system(sys_a)?;
    let b = eval.system(sys_b)?;
    if metric.kind().value_kind() != eval.kind() {
        return Err(Error::Type(format!(
            "metric {} expects {} values but the evaluation set is {}",
            metric.name(),
            metric.kind().value_kind(),
            eval.kind()
        )));
    }
    Ok((a, b))
}

struct Scratch {
    indices: Vec<usize>,
    gold: Values,
    a: Values,
    b: Values,
}

impl Scratch {
    fn new(template: &Values, n: usize) -> Self {
        Scratch {
            indices: Vec::with_capacity(n),
            gold: template.empty_like(n),
            a: template.empty_like(n),
            b: template.empty_like(n),
        }
    }
}

/// Paired bootstrap distribution of `score(A) - score(B)`: replicate `b`
/// scores gold, A, and B on the same resampled index sequence.
pub fn bootstrap_diff_distribution(
    eval: &PairedEvaluationSet,
    sys_a: &str,
    sys_b: &str,
    metric: &MetricSpec,
    cfg: &ResamplingConfig,
) -> Result<ReplicateValues> {
    let (a, b) = lookup_pair(eval, sys_a, sys_b, metric)?;
    cfg.validate()?;
    let gold = eval.gold();
    let n = eval.n_instances();
    let stream = cfg.stream();
    let pairs = (0..cfg.replicates as u64)
        .into_par_iter()
        .map_init(
            || Scratch::new(gold, n),
            |s, r| {
                fill_bootstrap_indices(&mut s.indices, n, r, &stream);
                s.gold.gather_from(gold, s.indices.iter().copied());
                s.a.gather_from(a, s.indices.iter().copied());
                s.b.gather_from(b, s.indices.iter().copied());
                paired_difference(metric, &s.gold, &s.a, &s.b)
            },
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicateValues::collect(pairs))
}

/// Leave-one-pair-out metric differences; entry `i` drops instance `i` from
/// gold and both systems.
pub fn jackknife_diff_values(
    eval: &PairedEvaluationSet,
    sys_a: &str,
    sys_b: &str,
    metric: &MetricSpec,
) -> Result<ReplicateValues> {
    let (a, b) = lookup_pair(eval, sys_a, sys_b, metric)?;
    let gold = eval.gold();
    let n = eval.n_instances();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "jackknife needs at least 2 instances, got {n}"
        )));
    }
    let pairs = (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(gold, n - 1),
            |s, i| {
                let keep = (0..n).filter(|&j| j != i);
                s.gold.gather_from(gold, keep.clone());
                s.a.gather_from(a, keep.clone());
                s.b.gather_from(b, keep);
                paired_difference(metric, &s.gold, &s.a, &s.b)
            },
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicateValues::collect(pairs))
}

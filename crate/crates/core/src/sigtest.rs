//! Fisher-Pitman permutation test for paired samples.
//!
//! Under the null hypothesis the two systems are exchangeable on every
//! instance. Each permutation exchanges A's and B's predictions on a random
//! subset of instances and recomputes the full metric difference, so the
//! test works for non-decomposable metrics such as Pearson r.
//!
//! Ties `|d*| = |θ̂|` (within 1e-12) count as "as or more extreme".

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::PairedEvaluationSet;
use crate::error::{Error, Result};
use crate::metrics::{MetricSpec, Values};
use crate::resampling::{apply_swap, lookup_pair, paired_difference, permutation_swap_mask, MIN_REPLICATES};
use crate::rng::ReplicateStream;

/// Largest N for which all 2^N exchanges are enumerated.
pub const EXACT_MAX_N: usize = 20;
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    #[default]
    TwoSided,
    /// A scores higher than B.
    Greater,
    /// A scores lower than B.
    Less,
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Greater => "greater",
            Alternative::Less => "less",
        })
    }
}

impl Alternative {
    pub fn is_extreme(self, permuted: f64, observed: f64) -> bool {
        match self {
            Alternative::TwoSided => permuted.abs() >= observed.abs() - TIE_TOLERANCE,
            Alternative::Greater => permuted >= observed - TIE_TOLERANCE,
            Alternative::Less => permuted <= observed + TIE_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationMode {
    MonteCarlo,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    pub p_value: f64,
    pub observed_stat: f64,
    pub permutations: u64,
    pub mode: PermutationMode,
    pub as_or_more_extreme: u64,
    pub alternative: Alternative,
}

struct Scratch {
    a: Values,
    b: Values,
    mask: Vec<bool>,
}

#[allow(clippy::too_many_arguments)]
fn count_extreme(
    gold: &Values,
    a: &Values,
    b: &Values,
    metric: &MetricSpec,
    observed: f64,
    alternative: Alternative,
    masks: impl ParallelIterator<Item = u64>,
    fill_mask: impl Fn(u64, &mut Vec<bool>) + Sync,
) -> Result<u64> {
    let n = gold.len();
    let hits = masks
        .map_init(
            || Scratch {
                a: a.empty_like(n),
                b: b.empty_like(n),
                mask: Vec::with_capacity(n),
            },
            |s, r| {
                fill_mask(r, &mut s.mask);
                apply_swap(&s.mask, a, b, &mut s.a, &mut s.b);
                let (d, _) = paired_difference(metric, gold, &s.a, &s.b)?;
                Ok(alternative.is_extreme(d, observed) as u64)
            },
        )
        .collect::<Result<Vec<u64>>>()?;
    Ok(hits.into_iter().sum())
}

/// Monte Carlo test with `replicates` random swap masks and the add-one
/// p-value estimator `(k + 1) / (R + 1)`.
pub fn fisher_pitman_mc(
    eval: &PairedEvaluationSet,
    sys_a: &str,
    sys_b: &str,
    metric: &MetricSpec,
    replicates: usize,
    seed: u64,
    alternative: Alternative,
) -> Result<PermutationResult> {
    if replicates < MIN_REPLICATES {
        return Err(Error::TooFewReplicates {
            got: replicates,
            min: MIN_REPLICATES,
        });
    }
    monte_carlo_test(eval, sys_a, sys_b, metric, replicates, seed, alternative)
}

/// [`fisher_pitman_mc`] without the replicate-count guard.
pub(crate) fn monte_carlo_test(
    eval: &PairedEvaluationSet,
    sys_a: &str,
    sys_b: &str,
    metric: &MetricSpec,
    replicates: usize,
    seed: u64,
    alternative: Alternative,
) -> Result<PermutationResult> {
    let (a, b) = lookup_pair(eval, sys_a, sys_b, metric)?;
    if replicates == 0 {
        return Err(Error::Config("permutation count must be positive".into()));
    }
    let gold = eval.gold();
    let n = gold.len();
    let (observed, _) = paired_difference(metric, gold, a, b)?;
    let stream = ReplicateStream::new(seed);
    let k = count_extreme(
        gold,
        a,
        b,
        metric,
        observed,
        alternative,
        (0..replicates as u64).into_par_iter(),
        |r, mask| *mask = permutation_swap_mask(n, r, &stream),
    )?;
    Ok(PermutationResult {
        p_value: (k + 1) as f64 / (replicates + 1) as f64,
        observed_stat: observed,
        permutations: replicates as u64,
        mode: PermutationMode::MonteCarlo,
        as_or_more_extreme: k,
        alternative,
    })
}

/// Exact test over all 2^N swap masks; p = k / 2^N.
pub fn fisher_pitman_exact(
    eval: &PairedEvaluationSet,
    sys_a: &str,
    sys_b: &str,
    metric: &MetricSpec,
    alternative: Alternative,
) -> Result<PermutationResult> {
    let (a, b) = lookup_pair(eval, sys_a, sys_b, metric)?;
    let gold = eval.gold();
    let n = gold.len();
    if n > EXACT_MAX_N {
        return Err(Error::SizeGuard { n, max: EXACT_MAX_N });
    }
    let (observed, _) = paired_difference(metric, gold, a, b)?;
    let total = 1u64 << n;
    let k = count_extreme(
        gold,
        a,
        b,
        metric,
        observed,
        alternative,
        (0..total).into_par_iter(),
        |m, mask| {
            mask.clear();
            mask.extend((0..n).map(|i| (m >> i) & 1 == 1));
        },
    )?;
    Ok(PermutationResult {
        p_value: k as f64 / total as f64,
        observed_stat: observed,
        permutations: total,
        mode: PermutationMode::Exact,
        as_or_more_extreme: k,
        alternative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::LabelValue;
    use proptest::prelude::*;

    fn labels(s: &str) -> Vec<LabelValue> {
        s.chars().map(|c| LabelValue::Label(c.to_string())).collect()
    }

    fn set(gold: &str, a: &str, b: &str) -> PairedEvaluationSet {
        PairedEvaluationSet::from_rows(labels(gold), [("A", labels(a)), ("B", labels(b))]).unwrap()
    }

    const TS: Alternative = Alternative::TwoSided;

    #[test]
    fn exact_two_instances() {
        let s = set("ab", "ab", "ba");
        let r = fisher_pitman_exact(&s, "A", "B", &MetricSpec::accuracy(), TS).unwrap();
        assert_eq!(r.observed_stat, 1.0);
        assert_eq!((r.as_or_more_extreme, r.permutations), (2, 4));
        assert_eq!(r.p_value, 0.5);
    }

    #[test]
    fn exact_three_instances() {
        let s = set("aaa", "aaa", "bbb");
        let r = fisher_pitman_exact(&s, "A", "B", &MetricSpec::accuracy(), TS).unwrap();
        assert_eq!(r.p_value, 0.25);
    }

    #[test]
    fn identical_systems_have_p_one() {
        let s = set("abab", "abba", "abba");
        let m = MetricSpec::accuracy();
        assert_eq!(fisher_pitman_exact(&s, "A", "B", &m, TS).unwrap().p_value, 1.0);
        let mc = fisher_pitman_mc(&s, "A", "B", &m, 500, 3, TS).unwrap();
        assert_eq!(mc.p_value, 1.0);
        assert_eq!(mc.observed_stat, 0.0);
    }

    #[test]
    fn mc_is_deterministic_and_on_its_lattice() {
        let s = set("abababab", "abababba", "bbaaabab");
        let m = MetricSpec::accuracy();
        let r1 = fisher_pitman_mc(&s, "A", "B", &m, 999, 11, TS).unwrap();
        let r2 = fisher_pitman_mc(&s, "A", "B", &m, 999, 11, TS).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.p_value, (r1.as_or_more_extreme + 1) as f64 / 1000.0);
        assert!(r1.p_value > 0.0 && r1.p_value <= 1.0);
    }

    #[test]
    fn mc_agrees_with_exact_on_small_case() {
        let s = set("aaaaaaaa", "aaaaaaba", "abbabaab");
        let m = MetricSpec::accuracy();
        let exact = fisher_pitman_exact(&s, "A", "B", &m, TS).unwrap();
        let mc = fisher_pitman_mc(&s, "A", "B", &m, 10_000, 7, TS).unwrap();
        assert!(
            (exact.p_value - mc.p_value).abs() <= 0.02,
            "{} vs {}",
            exact.p_value,
            mc.p_value
        );
    }

    #[test]
    fn one_sided_alternatives() {
        let s = set("aaaa", "aaaa", "aaab");
        let m = MetricSpec::accuracy();
        let greater = fisher_pitman_exact(&s, "A", "B", &m, Alternative::Greater).unwrap();
        let less = fisher_pitman_exact(&s, "A", "B", &m, Alternative::Less).unwrap();
        // only instance 3 differs; d* = +0.25 unless it is swapped
        assert_eq!(greater.p_value, 0.5);
        assert_eq!(less.p_value, 1.0);
    }

    #[test]
    fn guards() {
        let s = set(&"a".repeat(21), &"a".repeat(21), &"b".repeat(21));
        let m = MetricSpec::accuracy();
        assert_eq!(
            fisher_pitman_exact(&s, "A", "B", &m, TS),
            Err(Error::SizeGuard { n: 21, max: 20 })
        );
        assert!(matches!(
            fisher_pitman_mc(&s, "A", "B", &m, 50, 0, TS),
            Err(Error::TooFewReplicates { .. })
        ));
        assert!(matches!(
            fisher_pitman_mc(&s, "A", "X", &m, 500, 0, TS),
            Err(Error::UnknownSystem(_))
        ));
    }

    /// Classic sign-flip test on per-instance correctness differences.
    fn sign_flip_p(gold: &[u8], a: &[u8], b: &[u8]) -> f64 {
        let d: Vec<i64> = (0..gold.len())
            .map(|i| (a[i] == gold[i]) as i64 - (b[i] == gold[i]) as i64)
            .collect();
        let observed: i64 = d.iter().sum();
        let n = d.len();
        let hits = (0..1u64 << n)
            .filter(|m| {
                let s: i64 = (0..n).map(|i| if m >> i & 1 == 1 { -d[i] } else { d[i] }).sum();
                s.abs() >= observed.abs()
            })
            .count();
        hits as f64 / (1u64 << n) as f64
    }

    fn small_case() -> impl Strategy<Value = (Vec<u8>, Vec<u8>, Vec<u8>)> {
        (1usize..=12).prop_flat_map(|n| {
            (
                prop::collection::vec(0u8..3, n),
                prop::collection::vec(0u8..3, n),
                prop::collection::vec(0u8..3, n),
            )
        })
    }

    fn to_set(g: &[u8], a: &[u8], b: &[u8]) -> PairedEvaluationSet {
        let conv = |v: &[u8]| v.iter().map(|x| LabelValue::Label(x.to_string())).collect::<Vec<_>>();
        PairedEvaluationSet::from_rows(conv(g), [("A", conv(a)), ("B", conv(b))]).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_matches_sign_flip_for_accuracy((g, a, b) in small_case()) {
            let s = to_set(&g, &a, &b);
            let r = fisher_pitman_exact(&s, "A", "B", &MetricSpec::accuracy(), TS).unwrap();
            prop_assert_eq!(r.p_value, sign_flip_p(&g, &a, &b));
        }

        #[test]
        fn exact_is_symmetric_in_systems((g, a, b) in small_case()) {
            let s = to_set(&g, &a, &b);
            for m in [MetricSpec::accuracy(), MetricSpec::macro_f1()] {
                let ab = fisher_pitman_exact(&s, "A", "B", &m, TS).unwrap();
                let ba = fisher_pitman_exact(&s, "B", "A", &m, TS).unwrap();
                prop_assert_eq!(ab.p_value, ba.p_value);
                let k = ab.p_value * (1u64 << g.len()) as f64;
                prop_assert_eq!(k, k.round());
            }
        }
    }
}

//! Performance metrics.
//!
//! Everything downstream (bootstrap, jackknife, permutation test) treats a
//! metric as an opaque pure function `(gold, predictions) -> score`, so new
//! metrics plug in through [`MetricSpec::new`] and [`MetricRegistry::register`]
//! without touching the comparison engine.
//!
//! Macro-F1 averages over the classes present in `gold ∪ predictions` of the
//! sequence being scored, not over a fixed global label set. A bootstrap
//! resample that happens to drop a class therefore averages over fewer
//! classes.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single gold or predicted value as read from input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelValue {
    Real(f64),
    Label(String),
}

impl LabelValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            LabelValue::Label(_) => ValueKind::Categorical,
            LabelValue::Real(_) => ValueKind::Real,
        }
    }
}

impl From<&str> for LabelValue {
    fn from(s: &str) -> Self {
        LabelValue::Label(s.to_owned())
    }
}

impl From<f64> for LabelValue {
    fn from(x: f64) -> Self {
        LabelValue::Real(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Categorical,
    Real,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueKind::Categorical => f.write_str("categorical"),
            ValueKind::Real => f.write_str("real"),
        }
    }
}

/// An aligned column of values. Categorical labels are interned to dense
/// codes shared by gold and every system of one evaluation set.
#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Labels(Vec<u32>),
    Reals(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Labels(v) => v.len(),
            Values::Reals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Values::Labels(_) => ValueKind::Categorical,
            Values::Reals(_) => ValueKind::Real,
        }
    }

    pub fn as_ref(&self) -> ValuesRef<'_> {
        match self {
            Values::Labels(v) => ValuesRef::Labels(v),
            Values::Reals(v) => ValuesRef::Reals(v),
        }
    }

    /// Empty column of the same kind with room for `n` values.
    pub fn empty_like(&self, n: usize) -> Values {
        match self {
            Values::Labels(_) => Values::Labels(Vec::with_capacity(n)),
            Values::Reals(_) => Values::Reals(Vec::with_capacity(n)),
        }
    }

    /// Overwrite `self` with `src[indices]`.
    pub fn gather_from(&mut self, src: &Values, indices: impl IntoIterator<Item = usize>) {
        match (self, src) {
            (Values::Labels(dst), Values::Labels(src)) => {
                dst.clear();
                dst.extend(indices.into_iter().map(|i| src[i]));
            }
            (Values::Reals(dst), Values::Reals(src)) => {
                dst.clear();
                dst.extend(indices.into_iter().map(|i| src[i]));
            }
            _ => panic!("gather between columns of different kinds"),
        }
    }

    /// Append `src[i]` to `self`.
    pub fn push_from(&mut self, src: &Values, i: usize) {
        match (self, src) {
            (Values::Labels(dst), Values::Labels(src)) => dst.push(src[i]),
            (Values::Reals(dst), Values::Reals(src)) => dst.push(src[i]),
            _ => panic!("push between columns of different kinds"),
        }
    }

    pub fn clear(&mut self) {
        match self {
            Values::Labels(v) => v.clear(),
            Values::Reals(v) => v.clear(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValuesRef<'a> {
    Labels(&'a [u32]),
    Reals(&'a [f64]),
}

impl ValuesRef<'_> {
    pub fn len(&self) -> usize {
        match self {
            ValuesRef::Labels(v) => v.len(),
            ValuesRef::Reals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            ValuesRef::Labels(_) => ValueKind::Categorical,
            ValuesRef::Reals(_) => ValueKind::Real,
        }
    }
}

/// A metric value plus a flag for inputs where the metric is undefined and
/// a convention value was substituted (e.g. zero-variance Pearson input).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    pub degenerate: bool,
}

impl Score {
    pub fn exact(value: f64) -> Self {
        Score {
            value,
            degenerate: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Classification,
    Regression,
}

impl MetricKind {
    pub fn value_kind(self) -> ValueKind {
        match self {
            MetricKind::Classification => ValueKind::Categorical,
            MetricKind::Regression => ValueKind::Real,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    #[default]
    HigherIsBetter,
}

pub type ScoreFn = dyn Fn(ValuesRef<'_>, ValuesRef<'_>) -> Result<Score> + Send + Sync;

/// A named scoring function.
#[derive(Clone)]
pub struct MetricSpec {
    name: String,
    kind: MetricKind,
    orientation: Orientation,
    score: Arc<ScoreFn>,
}

impl fmt::Debug for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpec")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("orientation", &self.orientation)
            .finish_non_exhaustive()
    }
}

impl MetricSpec {
    /// Wrap a user scoring function. The function must be pure: the
    /// bootstrap assumes bit-identical output for identical input.
    pub fn new<F>(name: impl Into<String>, kind: MetricKind, score: F) -> Self
    where
        F: Fn(ValuesRef<'_>, ValuesRef<'_>) -> Result<Score> + Send + Sync + 'static,
    {
        MetricSpec {
            name: name.into(),
            kind,
            orientation: Orientation::HigherIsBetter,
            score: Arc::new(score),
        }
    }

    pub fn accuracy() -> Self {
        Self::new("accuracy", MetricKind::Classification, |g, p| {
            let (g, p) = labels(g, p)?;
            accuracy(g, p).map(Score::exact)
        })
    }

    pub fn macro_f1() -> Self {
        Self::new("macro-f1", MetricKind::Classification, |g, p| {
            let (g, p) = labels(g, p)?;
            macro_f1_codes(g, p).map(Score::exact)
        })
    }

    pub fn pearson() -> Self {
        Self::new("pearson", MetricKind::Regression, |g, p| match (g, p) {
            (ValuesRef::Reals(g), ValuesRef::Reals(p)) => pearson_r(g, p),
            _ => Err(Error::Type("pearson needs real-valued gold and predictions".into())),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn score(&self, gold: ValuesRef<'_>, pred: ValuesRef<'_>) -> Result<Score> {
        if gold.len() != pred.len() {
            return Err(length_mismatch(gold.len(), pred.len()));
        }
        (self.score)(gold, pred)
    }
}

fn labels<'a>(g: ValuesRef<'a>, p: ValuesRef<'a>) -> Result<(&'a [u32], &'a [u32])> {
    match (g, p) {
        (ValuesRef::Labels(g), ValuesRef::Labels(p)) => Ok((g, p)),
        _ => Err(Error::Type(
            "classification metrics need categorical gold and predictions".into(),
        )),
    }
}

/// Name-keyed metric lookup. Starts with the three built-in metrics.
#[derive(Debug, Clone)]
pub struct MetricRegistry {
    metrics: IndexMap<String, MetricSpec>,
}

impl Default for MetricRegistry {
    fn default() -> Self {
        let mut r = MetricRegistry {
            metrics: IndexMap::new(),
        };
        r.register(MetricSpec::accuracy());
        r.register(MetricSpec::macro_f1());
        r.register(MetricSpec::pearson());
        r
    }
}

impl MetricRegistry {
    /// Adds a metric, replacing any previous metric of the same name.
    pub fn register(&mut self, metric: MetricSpec) {
        self.metrics.insert(metric.name.clone(), metric);
    }

    pub fn get(&self, name: &str) -> Option<&MetricSpec> {
        self.metrics.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.metrics.keys().map(String::as_str)
    }
}

fn length_mismatch(gold: usize, pred: usize) -> Error {
    Error::Alignment(format!("gold has {gold} values but predictions have {pred}"))
}

fn check_lengths(gold: usize, pred: usize, min: usize) -> Result<()> {
    if gold != pred {
        return Err(length_mismatch(gold, pred));
    }
    if gold < min {
        return Err(Error::InsufficientData(format!(
            "metric needs at least {min} values, got {gold}"
        )));
    }
    Ok(())
}

/// Fraction of positions where `pred` equals `gold`.
pub fn accuracy<T: PartialEq>(gold: &[T], pred: &[T]) -> Result<f64> {
    check_lengths(gold.len(), pred.len(), 1)?;
    let correct = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    Ok(correct as f64 / gold.len() as f64)
}

/// Unweighted mean of per-class F1 over the classes in `gold ∪ pred`.
/// A class with `P + R = 0` contributes F1 = 0.
pub fn macro_f1<T: Eq + Hash>(gold: &[T], pred: &[T]) -> Result<f64> {
    check_lengths(gold.len(), pred.len(), 1)?;
    // (tp, gold count, pred count)
    let mut counts: HashMap<&T, (usize, usize, usize)> = HashMap::new();
    for (g, p) in gold.iter().zip(pred) {
        counts.entry(g).or_default().1 += 1;
        counts.entry(p).or_default().2 += 1;
        if g == p {
            counts.entry(g).or_default().0 += 1;
        }
    }
    let total: f64 = counts
        .values()
        .map(|&(tp, n_gold, n_pred)| f1_from_counts(tp, n_gold, n_pred))
        .sum();
    Ok(total / counts.len() as f64)
}

/// [`macro_f1`] over dense label codes, without hashing.
pub fn macro_f1_codes(gold: &[u32], pred: &[u32]) -> Result<f64> {
    check_lengths(gold.len(), pred.len(), 1)?;
    let n_codes = gold.iter().chain(pred).copied().max().unwrap_or(0) as usize + 1;
    let mut tp = vec![0usize; n_codes];
    let mut n_gold = vec![0usize; n_codes];
    let mut n_pred = vec![0usize; n_codes];
    for (&g, &p) in gold.iter().zip(pred) {
        n_gold[g as usize] += 1;
        n_pred[p as usize] += 1;
        if g == p {
            tp[g as usize] += 1;
        }
    }
    let mut classes = 0usize;
    let mut total = 0.0;
    for c in 0..n_codes {
        if n_gold[c] + n_pred[c] > 0 {
            classes += 1;
            total += f1_from_counts(tp[c], n_gold[c], n_pred[c]);
        }
    }
    Ok(total / classes as f64)
}

fn f1_from_counts(tp: usize, n_gold: usize, n_pred: usize) -> f64 {
    // 2PR/(P+R) == 2tp/(n_gold+n_pred), and is 0 whenever tp is 0.
    if tp == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (n_gold + n_pred) as f64
    }
}

/// Sample Pearson correlation. Zero variance on either side yields `0` with
/// the degenerate flag set rather than an error, so a constant bootstrap
/// resample does not abort the whole distribution.
pub fn pearson_r(gold: &[f64], pred: &[f64]) -> Result<Score> {
    check_lengths(gold.len(), pred.len(), 2)?;
    let n = gold.len() as f64;
    let mean_g = gold.iter().sum::<f64>() / n;
    let mean_p = pred.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&g, &p) in gold.iter().zip(pred) {
        let dg = g - mean_g;
        let dp = p - mean_p;
        sxy += dg * dp;
        sxx += dg * dg;
        syy += dp * dp;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(Score {
            value: 0.0,
            degenerate: true,
        });
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Ok(Score::exact(r.clamp(-1.0, 1.0)))
}

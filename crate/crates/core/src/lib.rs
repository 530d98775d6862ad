//! Statistical comparison of systems evaluated on the same instances.
//!
//! Given gold values and the predictions of two or more systems, `paircmp`
//! computes the observed metric difference, a paired-bootstrap confidence
//! interval for it (percentile or BCa), and a Fisher-Pitman permutation
//! p-value. Multi-system reports add compact letter groups, repeated
//! cross-validation runs are summarized column-wise, and a Monte Carlo
//! harness checks interval coverage on synthetic populations.
//!
//! ```
//! use paircmp::{compare_pair, ComparisonConfig, LabelValue, MetricSpec, PairedEvaluationSet};
//!
//! let labels = |s: &str| s.chars().map(|c| LabelValue::Label(c.to_string())).collect::<Vec<_>>();
//! let eval = PairedEvaluationSet::from_rows(
//!     labels("aabbaabbab"),
//!     [("new", labels("aabbaabbaa")), ("old", labels("abbbaaabba"))],
//! )
//! .unwrap();
//! let mut cfg = ComparisonConfig::with_seed(42);
//! cfg.resampling.replicates = 1000;
//! let r = compare_pair(&eval, "new", "old", &MetricSpec::accuracy(), &cfg).unwrap();
//! assert!((r.theta_hat - 0.3).abs() < 1e-12);
//! assert!(r.interval.lower <= r.interval.upper);
//! ```

pub mod cli;
pub mod compare;
pub mod dataset;
pub mod error;
pub mod interval;
pub mod metrics;
pub mod resampling;
pub mod rng;
pub mod sigtest;

pub use compare::{
    compare_all, compare_pair, coverage_simulation, coverage_study, letter_groups, repeated_comparison,
    ComparisonConfig, ComparisonResult, CoverageReport, LetterGrouping, MatrixReport, RepeatedSummary,
    SyntheticPopulationSpec, Warning,
};
pub use dataset::PairedEvaluationSet;
pub use error::{Error, Result};
pub use interval::{bca_ci, percentile_ci, quantile, BcaDiagnostics, IntervalEstimate, IntervalMethod, QuantileRule};
pub use metrics::{LabelValue, MetricKind, MetricRegistry, MetricSpec, ValueKind};
pub use resampling::{bootstrap_diff_distribution, jackknife_diff_values, ResamplingConfig};
pub use rng::ReplicateStream;
pub use sigtest::{fisher_pitman_exact, fisher_pitman_mc, Alternative, PermutationResult};

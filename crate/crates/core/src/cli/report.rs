//! Report views shared by every output format.
//!
//! Numbers are rounded to six decimals once, when a view is built. The text,
//! TSV, JSON and SVG renderers all read the same rounded values, so a JSON
//! report parsed back yields exactly the numbers shown elsewhere.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::compare::{ComparisonResult, CoverageReport, MatrixReport, RepeatedSummary, Warning};
use crate::error::{Error, Result};
use crate::interval::{FallbackReason, IntervalMethod};
use crate::sigtest::{Alternative, PermutationMode};

pub const SCHEMA_VERSION: u32 = 1;
pub const DECIMALS: usize = 6;

/// Rounds to [`DECIMALS`] places; negative zero becomes zero.
pub fn round6(x: f64) -> f64 {
    if x.is_finite() {
        (x * 1e6).round() / 1e6 + 0.0
    } else {
        x
    }
}

fn fmt6(x: f64) -> String {
    format!("{x:.DECIMALS$}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigView {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    pub method: IntervalMethod,
    pub replicates: usize,
    pub level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternative: Option<Alternative>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<PermutationMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub config: ConfigView,
}

impl Header {
    pub fn new(command: &str, seed: u64, config: ConfigView) -> Self {
        Header {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub system_a: String,
    pub system_b: String,
    pub score_a: f64,
    pub score_b: f64,
    pub difference: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: IntervalMethod,
    pub p_value: f64,
    pub significant: bool,
    pub permutations: u64,
    pub permutation_mode: PermutationMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acceleration: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback: Option<FallbackReason>,
}

impl From<&ComparisonResult> for PairRow {
    fn from(r: &ComparisonResult) -> Self {
        PairRow {
            system_a: r.system_a.clone(),
            system_b: r.system_b.clone(),
            score_a: round6(r.score_a),
            score_b: round6(r.score_b),
            difference: round6(r.theta_hat),
            lower: round6(r.interval.lower),
            upper: round6(r.interval.upper),
            level: round6(r.interval.level),
            method: r.interval.method,
            p_value: round6(r.permutation.p_value),
            significant: r.significant,
            permutations: r.permutation.permutations,
            permutation_mode: r.permutation.mode,
            z0: r.bca_diag.map(|d| round6(d.z0)),
            acceleration: r.bca_diag.and_then(|d| d.acceleration).map(round6),
            fallback: r.bca_diag.and_then(|d| d.fallback),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemRow {
    pub rank: usize,
    pub name: String,
    pub score: f64,
    pub letters: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarningView {
    pub message: String,
    /// `code` plus the warning's structured fields.
    #[serde(flatten)]
    pub data: serde_json::Map<String, serde_json::Value>,
}

fn round_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round6(x))) {
                *n = x;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

impl From<&Warning> for WarningView {
    fn from(w: &Warning) -> Self {
        let mut value = serde_json::to_value(w).expect("warnings serialize to JSON");
        round_json(&mut value);
        let data = match value {
            serde_json::Value::Object(map) => map,
            _ => unreachable!("warnings are internally tagged structs"),
        };
        WarningView {
            message: w.to_string(),
            data,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareView {
    pub metric: String,
    pub n_instances: usize,
    pub comparison: PairRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixView {
    pub metric: String,
    pub n_instances: usize,
    pub systems: Vec<SystemRow>,
    pub comparisons: Vec<PairRow>,
    pub non_transitive_pairs: Vec<(String, String)>,
}

impl From<&MatrixReport> for MatrixView {
    fn from(m: &MatrixReport) -> Self {
        let names: Vec<&str> = m.grouping.systems.iter().map(|s| s.name.as_str()).collect();
        MatrixView {
            metric: m.metric.clone(),
            n_instances: m.n_instances,
            systems: m
                .grouping
                .systems
                .iter()
                .enumerate()
                .map(|(i, s)| SystemRow {
                    rank: i + 1,
                    name: s.name.clone(),
                    score: round6(s.score),
                    letters: s.letters.clone(),
                })
                .collect(),
            comparisons: m.comparisons.iter().map(PairRow::from).collect(),
            non_transitive_pairs: m
                .grouping
                .non_transitive_pairs
                .iter()
                .map(|&(i, j)| (names[i].to_owned(), names[j].to_owned()))
                .collect(),
        }
    }
}

impl From<&CompareView> for MatrixView {
    /// Two-row view of a single comparison, in the order given.
    fn from(c: &CompareView) -> Self {
        let p = &c.comparison;
        let second = if p.significant { "b" } else { "a" };
        MatrixView {
            metric: c.metric.clone(),
            n_instances: c.n_instances,
            systems: vec![
                SystemRow {
                    rank: 1,
                    name: p.system_a.clone(),
                    score: p.score_a,
                    letters: "a".into(),
                },
                SystemRow {
                    rank: 2,
                    name: p.system_b.clone(),
                    score: p.score_b,
                    letters: second.into(),
                },
            ],
            comparisons: vec![p.clone()],
            non_transitive_pairs: vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatedRow {
    pub system_a: String,
    pub system_b: String,
    pub score_a: f64,
    pub score_b: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_significant: usize,
    pub n_runs: usize,
    pub lower_min: f64,
    pub lower_max: f64,
    pub difference_min: f64,
    pub difference_max: f64,
    pub upper_min: f64,
    pub upper_max: f64,
}

impl From<&RepeatedSummary> for RepeatedRow {
    fn from(s: &RepeatedSummary) -> Self {
        RepeatedRow {
            system_a: s.system_a.clone(),
            system_b: s.system_b.clone(),
            score_a: round6(s.score_a),
            score_b: round6(s.score_b),
            p_min: round6(s.p_min),
            p_max: round6(s.p_max),
            n_significant: s.n_significant,
            n_runs: s.n_runs,
            lower_min: round6(s.ci_lower_min),
            lower_max: round6(s.ci_lower_max),
            difference_min: round6(s.diff_min),
            difference_max: round6(s.diff_max),
            upper_min: round6(s.ci_upper_min),
            upper_max: round6(s.ci_upper_max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatedView {
    pub metric: String,
    pub n_runs: usize,
    pub runs: Vec<String>,
    pub rows: Vec<RepeatedRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub method: IntervalMethod,
    pub nominal_level: f64,
    pub covered: usize,
    pub empirical_coverage: f64,
    pub mean_interval_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageView {
    pub population: String,
    pub true_difference: f64,
    pub n_eval: usize,
    pub trials: usize,
    pub results: Vec<CoverageRow>,
}

impl CoverageView {
    pub fn new(reports: &[CoverageReport]) -> Result<Self> {
        let first = reports
            .first()
            .ok_or_else(|| Error::Arity("coverage report needs at least one interval spec".into()))?;
        Ok(CoverageView {
            population: first.population.to_string(),
            true_difference: round6(first.true_difference),
            n_eval: first.n_eval,
            trials: first.trials,
            results: reports
                .iter()
                .map(|r| CoverageRow {
                    method: r.method,
                    nominal_level: round6(r.nominal_level),
                    covered: r.covered,
                    empirical_coverage: round6(r.empirical_coverage),
                    mean_interval_length: round6(r.mean_interval_length),
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum ReportBody {
    Compare(CompareView),
    Matrix(MatrixView),
    Repeated(RepeatedView),
    Coverage(CoverageView),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub header: Header,
    #[serde(flatten)]
    pub body: ReportBody,
    pub warnings: Vec<WarningView>,
}

impl Report {
    pub fn new<'a>(header: Header, body: ReportBody, warnings: impl IntoIterator<Item = &'a Warning>) -> Self {
        let mut views: Vec<WarningView> = Vec::new();
        for w in warnings {
            let v = WarningView::from(w);
            if !views.contains(&v) {
                views.push(v);
            }
        }
        Report {
            header,
            body,
            warnings: views,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize to JSON");
        s.push('\n');
        s
    }

    pub fn to_text(&self, seed_drawn: bool) -> String {
        let h = &self.header;
        let c = &h.config;
        let mut out = String::new();
        let _ = write!(out, "{} {}", h.tool, h.command);
        if let Some(metric) = &c.metric {
            let _ = write!(out, "  metric={metric}");
        }
        let _ = write!(
            out,
            "  method={}  level={}  replicates={}",
            c.method, c.level, c.replicates
        );
        if let Some(alpha) = c.alpha {
            let _ = write!(out, "  alpha={alpha}");
        }
        if let Some(alt) = c.alternative {
            let _ = write!(out, "  alternative={alt}");
        }
        let _ = writeln!(out, "  seed={}", h.seed);
        if seed_drawn {
            let _ = writeln!(out, "(seed drawn at random; pass --seed {} to reproduce)", h.seed);
        }
        out.push('\n');
        match &self.body {
            ReportBody::Compare(v) => compare_text(v, &mut out),
            ReportBody::Matrix(v) => matrix_text(v, &mut out),
            ReportBody::Repeated(v) => {
                let _ = writeln!(out, "{} runs, metric {}", v.n_runs, v.metric);
                out.push_str(&repeated_table(&v.rows));
            }
            ReportBody::Coverage(v) => coverage_text(v, &mut out),
        }
        if !self.warnings.is_empty() {
            out.push_str("\nwarnings:\n");
            for w in &self.warnings {
                let _ = writeln!(out, "  - {}", w.message);
            }
        }
        out
    }

    pub fn to_tsv(&self, seed_drawn: bool) -> String {
        let mut out = String::new();
        if seed_drawn {
            let _ = writeln!(out, "# seed\t{}", self.header.seed);
        }
        let mut emit = |cells: Vec<String>| {
            out.push_str(&cells.join("\t"));
            out.push('\n');
        };
        match &self.body {
            ReportBody::Compare(v) => {
                emit(pair_tsv_header());
                emit(pair_tsv(&v.comparison));
            }
            ReportBody::Matrix(v) => {
                emit(pair_tsv_header());
                for p in &v.comparisons {
                    emit(pair_tsv(p));
                }
            }
            ReportBody::Repeated(v) => {
                emit(
                    [
                        "c1",
                        "c2",
                        "score_c1",
                        "score_c2",
                        "p_min",
                        "p_max",
                        "n_significant",
                        "n_runs",
                        "lower_cl_min",
                        "lower_cl_max",
                        "difference_min",
                        "difference_max",
                        "upper_cl_min",
                        "upper_cl_max",
                    ]
                    .map(String::from)
                    .to_vec(),
                );
                for r in &v.rows {
                    emit(vec![
                        r.system_a.clone(),
                        r.system_b.clone(),
                        fmt6(r.score_a),
                        fmt6(r.score_b),
                        fmt6(r.p_min),
                        fmt6(r.p_max),
                        r.n_significant.to_string(),
                        r.n_runs.to_string(),
                        fmt6(r.lower_min),
                        fmt6(r.lower_max),
                        fmt6(r.difference_min),
                        fmt6(r.difference_max),
                        fmt6(r.upper_min),
                        fmt6(r.upper_max),
                    ]);
                }
            }
            ReportBody::Coverage(v) => {
                emit(
                    [
                        "population",
                        "true_difference",
                        "n_eval",
                        "trials",
                        "method",
                        "nominal_level",
                        "covered",
                        "empirical_coverage",
                        "mean_interval_length",
                    ]
                    .map(String::from)
                    .to_vec(),
                );
                for r in &v.results {
                    emit(vec![
                        v.population.clone(),
                        fmt6(v.true_difference),
                        v.n_eval.to_string(),
                        v.trials.to_string(),
                        r.method.to_string(),
                        fmt6(r.nominal_level),
                        r.covered.to_string(),
                        fmt6(r.empirical_coverage),
                        fmt6(r.mean_interval_length),
                    ]);
                }
            }
        }
        out
    }
}

fn pair_tsv_header() -> Vec<String> {
    [
        "system_a",
        "system_b",
        "score_a",
        "score_b",
        "difference",
        "lower",
        "upper",
        "level",
        "method",
        "p_value",
        "significant",
    ]
    .map(String::from)
    .to_vec()
}

fn pair_tsv(p: &PairRow) -> Vec<String> {
    vec![
        p.system_a.clone(),
        p.system_b.clone(),
        fmt6(p.score_a),
        fmt6(p.score_b),
        fmt6(p.difference),
        fmt6(p.lower),
        fmt6(p.upper),
        fmt6(p.level),
        p.method.to_string(),
        fmt6(p.p_value),
        p.significant.to_string(),
    ]
}

#[derive(Clone, Copy, PartialEq)]
enum Align {
    Left,
    Right,
}

/// Fixed-width table with an optional row of spanning group labels above the
/// column headers.
fn table(groups: &[(&str, usize)], headers: &[&str], align: &[Align], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let sep = "  ";
    // widen the last column of a group if its label does not fit
    let mut col = 0;
    for &(label, span) in groups {
        let span_width: usize = widths[col..col + span].iter().sum::<usize>() + sep.len() * (span - 1);
        if label.len() > span_width {
            widths[col + span - 1] += label.len() - span_width;
        }
        col += span;
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .zip(align)
            .map(|((c, &w), a)| match a {
                Align::Left => format!("{c:<w$}"),
                Align::Right => format!("{c:>w$}"),
            })
            .collect();
        parts.join(sep).trim_end().to_owned() + "\n"
    };
    let mut out = String::new();
    if !groups.is_empty() {
        let mut col = 0;
        let mut parts = Vec::new();
        for &(label, span) in groups {
            let w: usize = widths[col..col + span].iter().sum::<usize>() + sep.len() * (span - 1);
            parts.push(format!("{label:^w$}"));
            col += span;
        }
        out.push_str(parts.join(sep).trim_end());
        out.push('\n');
    }
    out.push_str(&line(&headers.iter().map(|h| h.to_string()).collect::<Vec<_>>()));
    for row in rows {
        out.push_str(&line(row));
    }
    out
}

/// Repeated-run summary laid out as: compared systems, their scores, p-value
/// range with significance count, then min/max of the lower limit, observed
/// difference and upper limit.
pub fn repeated_table(rows: &[RepeatedRow]) -> String {
    use Align::*;
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.system_a.clone(),
                r.system_b.clone(),
                fmt6(r.score_a),
                fmt6(r.score_b),
                fmt6(r.p_min),
                fmt6(r.p_max),
                r.n_significant.to_string(),
                fmt6(r.lower_min),
                fmt6(r.lower_max),
                fmt6(r.difference_min),
                fmt6(r.difference_max),
                fmt6(r.upper_min),
                fmt6(r.upper_max),
            ]
        })
        .collect();
    table(
        &[
            ("", 2),
            ("Score", 2),
            ("p-value", 3),
            ("Lower CL", 2),
            ("Difference", 2),
            ("Upper CL", 2),
        ],
        &[
            "C1", "C2", "C1", "C2", "Min", "Max", "#sig", "Min", "Max", "Min", "Max", "Min", "Max",
        ],
        &[
            Left, Left, Right, Right, Right, Right, Right, Right, Right, Right, Right, Right, Right,
        ],
        &body,
    )
}

fn level_pct(level: f64) -> String {
    let pct = round6(level * 100.0);
    format!("{pct}%")
}

fn compare_text(v: &CompareView, out: &mut String) {
    let p = &v.comparison;
    let _ = writeln!(out, "N = {} instances, metric {}", v.n_instances, v.metric);
    out.push_str(&table(
        &[],
        &["system", "score"],
        &[Align::Left, Align::Right],
        &[
            vec![p.system_a.clone(), fmt6(p.score_a)],
            vec![p.system_b.clone(), fmt6(p.score_b)],
        ],
    ));
    out.push('\n');
    let _ = writeln!(
        out,
        "difference ({} - {}): {}",
        p.system_a,
        p.system_b,
        fmt6(p.difference)
    );
    let _ = writeln!(
        out,
        "{} {} interval: [{}, {}]",
        level_pct(p.level),
        p.method,
        fmt6(p.lower),
        fmt6(p.upper)
    );
    let mode = match p.permutation_mode {
        PermutationMode::MonteCarlo => "random",
        PermutationMode::Exact => "all",
    };
    let _ = writeln!(
        out,
        "permutation p-value: {} ({} {} exchanges){}",
        fmt6(p.p_value),
        mode,
        p.permutations,
        if p.significant {
            ", significant"
        } else {
            ", not significant"
        }
    );
    if let Some(z0) = p.z0 {
        let a = p.acceleration.map_or("n/a".to_owned(), fmt6);
        let _ = writeln!(out, "bias correction z0 = {}, acceleration = {a}", fmt6(z0));
    }
}

fn matrix_text(v: &MatrixView, out: &mut String) {
    use Align::*;
    let _ = writeln!(out, "N = {} instances, metric {}", v.n_instances, v.metric);
    let rows: Vec<Vec<String>> = v
        .systems
        .iter()
        .map(|s| vec![s.rank.to_string(), s.name.clone(), fmt6(s.score), s.letters.clone()])
        .collect();
    out.push_str(&table(
        &[],
        &["rank", "system", "score", "group"],
        &[Right, Left, Right, Left],
        &rows,
    ));
    if let Some(first) = v.comparisons.first() {
        let _ = writeln!(
            out,
            "\n{} {} intervals for the difference with each lower-ranked system:",
            level_pct(first.level),
            first.method
        );
    }
    let rows: Vec<Vec<String>> = v
        .comparisons
        .iter()
        .map(|p| {
            vec![
                p.system_a.clone(),
                p.system_b.clone(),
                fmt6(p.difference),
                fmt6(p.lower),
                fmt6(p.upper),
                fmt6(p.p_value),
                if p.significant { "*" } else { "" }.into(),
            ]
        })
        .collect();
    out.push_str(&table(
        &[],
        &["system", "vs", "difference", "lower", "upper", "p", "sig"],
        &[Left, Left, Right, Right, Right, Right, Left],
        &rows,
    ));
}

fn coverage_text(v: &CoverageView, out: &mut String) {
    use Align::*;
    let _ = writeln!(
        out,
        "population {} (true difference {}), n = {}, {} trials",
        v.population,
        fmt6(v.true_difference),
        v.n_eval,
        v.trials
    );
    let rows: Vec<Vec<String>> = v
        .results
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                fmt6(r.nominal_level),
                r.covered.to_string(),
                fmt6(r.empirical_coverage),
                fmt6(r.mean_interval_length),
            ]
        })
        .collect();
    out.push_str(&table(
        &[],
        &["method", "nominal", "covered", "coverage", "mean length"],
        &[Left, Right, Right, Right, Right],
        &rows,
    ));
}

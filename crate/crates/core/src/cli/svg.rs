//! Forest plot of pairwise intervals.
//!
//! One row per comparison: a horizontal segment from lower to upper limit, an
//! X at the observed difference, and a dashed vertical line at zero. The axis
//! mapping is declared in `<metadata>` so that every x coordinate can be
//! recomputed from data values.

use std::fmt::Write as _;

use super::report::{MatrixView, PairRow};

pub const SVG_NS: &str = "http://www.w3.org/2000/svg";
pub const AXIS_NS: &str = "urn:paircmp:forest-axis";

const WIDTH: f64 = 860.0;
const LABEL_WIDTH: f64 = 330.0;
const PLOT_LEFT: f64 = LABEL_WIDTH + 20.0;
const PLOT_RIGHT: f64 = WIDTH - 30.0;
const ROW_HEIGHT: f64 = 26.0;
const TOP: f64 = 56.0;
const MARKER: f64 = 4.0;

/// Linear map from data values to pixel x positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub domain_min: f64,
    pub domain_max: f64,
    pub pixel_min: f64,
    pub pixel_max: f64,
}

impl Axis {
    fn covering(values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values.fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        Axis {
            domain_min: lo - 0.05 * span,
            domain_max: hi + 0.05 * span,
            pixel_min: PLOT_LEFT,
            pixel_max: PLOT_RIGHT,
        }
    }

    pub fn x(&self, v: f64) -> f64 {
        self.pixel_min + (v - self.domain_min) / (self.domain_max - self.domain_min) * (self.pixel_max - self.pixel_min)
    }

    fn ticks(&self) -> Vec<f64> {
        let span = self.domain_max - self.domain_min;
        let raw = span / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .into_iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let first = (self.domain_min / step).ceil() as i64;
        let last = (self.domain_max / step).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn px(v: f64) -> String {
    format!("{v:.3}")
}

fn label(view: &MatrixView, p: &PairRow) -> String {
    let tag = |name: &str, score: f64| {
        let letters = view
            .systems
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.letters.as_str())
            .unwrap_or("");
        format!("{name} ({score:.3}, {letters})")
    };
    format!("{} vs {}", tag(&p.system_a, p.score_a), tag(&p.system_b, p.score_b))
}

/// Renders a standalone SVG 1.1 document.
pub fn render_forest_svg(view: &MatrixView) -> String {
    let axis = Axis::covering(view.comparisons.iter().flat_map(|p| [p.lower, p.upper, p.difference]));
    let rows = view.comparisons.len();
    let plot_bottom = TOP + ROW_HEIGHT * rows as f64;
    let height = plot_bottom + 44.0;
    let title = match view.comparisons.first() {
        Some(p) => format!(
            "{} difference, {}% {} intervals (N = {})",
            view.metric,
            (p.level * 100.0 * 1e6).round() / 1e6,
            p.method,
            view.n_instances
        ),
        None => format!("{} difference (N = {})", view.metric, view.n_instances),
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="{SVG_NS}" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        px(WIDTH),
        px(height),
        px(WIDTH),
        px(height)
    );
    let _ = writeln!(s, "<title>{}</title>", esc(&title));
    let _ = writeln!(
        s,
        r#"<metadata><axis xmlns="{AXIS_NS}" domain-min="{}" domain-max="{}" pixel-min="{}" pixel-max="{}"/></metadata>"#,
        axis.domain_min, axis.domain_max, axis.pixel_min, axis.pixel_max
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-size="14">{}</text>"#,
        px(PLOT_LEFT),
        esc(&title)
    );

    let zero = axis.x(0.0);
    let _ = writeln!(
        s,
        r##"<line class="zero" x1="{z}" y1="{}" x2="{z}" y2="{}" stroke="#888888" stroke-dasharray="4 3"/>"##,
        px(TOP - 8.0),
        px(plot_bottom),
        z = px(zero)
    );
    let _ = writeln!(
        s,
        r##"<line class="axis" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#000000"/>"##,
        px(PLOT_LEFT),
        px(PLOT_RIGHT),
        y = px(plot_bottom)
    );
    for t in axis.ticks() {
        let x = px(axis.x(t));
        let _ = writeln!(
            s,
            r##"<line class="tick" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#000000"/><text x="{x}" y="{}" text-anchor="middle">{}</text>"##,
            px(plot_bottom),
            px(plot_bottom + 5.0),
            px(plot_bottom + 18.0),
            format_tick(t)
        );
    }

    for (i, p) in view.comparisons.iter().enumerate() {
        let y = TOP + ROW_HEIGHT * (i as f64 + 0.5);
        let colour = if p.significant { "#1f4e9c" } else { "#555555" };
        let _ = writeln!(s, r#"<g class="pair" id="pair-{i}">"#);
        let _ = writeln!(
            s,
            "<title>{} - {}: difference {:.6}, interval [{:.6}, {:.6}], p = {:.6}</title>",
            esc(&p.system_a),
            esc(&p.system_b),
            p.difference,
            p.lower,
            p.upper,
            p.p_value
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            px(LABEL_WIDTH),
            px(y + 4.0),
            esc(&label(view, p))
        );
        let _ = writeln!(
            s,
            r#"<line class="interval" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{colour}" stroke-width="2"/>"#,
            px(axis.x(p.lower)),
            px(axis.x(p.upper)),
            y = px(y)
        );
        let cx = axis.x(p.difference);
        let _ = writeln!(
            s,
            r#"<path class="estimate" d="M {} {} L {} {} M {} {} L {} {}" stroke="{colour}" stroke-width="2" fill="none"/>"#,
            px(cx - MARKER),
            px(y - MARKER),
            px(cx + MARKER),
            px(y + MARKER),
            px(cx - MARKER),
            px(y + MARKER),
            px(cx + MARKER),
            px(y - MARKER)
        );
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(t: f64) -> String {
    let s = format!("{:.6}", t + 0.0);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

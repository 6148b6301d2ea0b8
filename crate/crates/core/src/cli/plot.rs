//! Minimal SVG line charts for experiment results.

use std::fmt::Write as _;

use crate::experiments::ResultRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Linear or logarithmic map from data values to pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisMap {
    pub lo: f64,
    pub hi: f64,
    pub log: bool,
    pub px_lo: f64,
    pub px_hi: f64,
}

impl AxisMap {
    /// Map over `[lo, hi]`, padded when the range is empty.
    pub fn new(mut lo: f64, mut hi: f64, log: bool, px_lo: f64, px_hi: f64) -> Self {
        if log {
            lo = lo.log10();
            hi = hi.log10();
        }
        if !(hi > lo) {
            let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
            lo -= pad;
            hi += pad;
        }
        Self { lo, hi, log, px_lo, px_hi }
    }

    pub fn map(&self, v: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        self.px_lo + (t - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

/// Chart options.
#[derive(Debug, Clone, Default)]
pub struct PlotSpec {
    pub x_label: String,
    pub log_x: bool,
    /// Series whose preference region is shaded.
    pub highlight: Option<String>,
    /// Series the highlight is compared against.
    pub baseline: Option<String>,
}

/// A named series of `(grid, mean SNR)` points; failed cells are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Groups rows by variant, keeping first-seen order.
pub fn group_series(rows: &[ResultRow]) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let idx = match out.iter().position(|s| s.label == r.variant) {
            Some(i) => i,
            None => {
                out.push(Series { label: r.variant.clone(), points: Vec::new() });
                out.len() - 1
            }
        };
        if let Some(m) = r.mean_snr_db.filter(|m| m.is_finite()) {
            out[idx].points.push((r.grid_value, m));
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// Log scale when every grid value is positive and they span two decades.
pub fn guess_log_axis(rows: &[ResultRow]) -> bool {
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.grid_value), hi.max(r.grid_value))
    });
    lo > 0.0 && hi / lo >= 100.0
}

/// Axis maps `(x, y)` for the given series under the chart layout.
pub fn layout(series: &[Series], log_x: bool) -> (AxisMap, AxisMap) {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let log_x = log_x && x0 > 0.0;
    let x = AxisMap::new(x0, x1, log_x, MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let pad = 0.05 * (y1 - y0).max(1.0);
    let y = AxisMap::new(y0 - pad, y1 + pad, false, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    (x, y)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Grid intervals where `highlight ≥ baseline`, as `[x_lo, x_hi]` in data
/// units, widened to the midpoints between neighboring grid values.
pub fn preference_bands(highlight: &Series, baseline: &Series) -> Vec<(f64, f64)> {
    let grid: Vec<f64> = baseline.points.iter().map(|p| p.0).collect();
    // constant variant lines carry the same value at every grid point
    let value_at = |x: f64| {
        highlight
            .points
            .iter()
            .find(|p| p.0 == x)
            .or(highlight.points.first())
            .map(|p| p.1)
    };
    let mut bands = Vec::new();
    for (i, &(x, b)) in baseline.points.iter().enumerate() {
        let Some(v) = value_at(x) else { continue };
        if v >= b {
            let lo = if i > 0 { 0.5 * (grid[i - 1] + x) } else { x };
            let hi = if i + 1 < grid.len() { 0.5 * (x + grid[i + 1]) } else { x };
            match bands.last_mut() {
                Some((_, prev_hi)) if *prev_hi == lo => *prev_hi = hi,
                _ => bands.push((lo, hi)),
            }
        }
    }
    bands
}

fn ticks(lo: f64, hi: f64, log: bool) -> Vec<f64> {
    if log {
        let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
        return (a..=b).map(|e| 10f64.powi(e)).filter(|t| *t >= lo * 0.999 && *t <= hi * 1.001).collect();
    }
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![lo];
    }
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 8.0).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Renders the chart as an SVG document: one `<polyline>` per series with
/// at least two points, circle markers for every point.
pub fn render_svg(series: &[Series], spec: &PlotSpec) -> String {
    let (xm, ym) = layout(series, spec.log_x);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    if let (Some(h), Some(b)) = (&spec.highlight, &spec.baseline) {
        let find = |l: &str| series.iter().find(|s| s.label == l);
        if let (Some(hs), Some(bs)) = (find(h), find(b)) {
            for (lo, hi) in preference_bands(hs, bs) {
                let (x0, x1) = (xm.map(lo), xm.map(hi));
                let w = (x1 - x0).max(4.0);
                let x0 = if x1 - x0 < 4.0 { x0 - 2.0 } else { x0 };
                let _ = writeln!(
                    svg,
                    r##"<rect class="preference" x="{x0:.2}" y="{MARGIN_TOP}" width="{w:.2}" height="{:.2}" fill="#f2c14e" fill-opacity="0.3"/>"##,
                    HEIGHT - MARGIN_BOTTOM - MARGIN_TOP
                );
            }
        }
    }

    // axes and ticks
    let (left, right, top, bottom) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT, MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
    let _ = writeln!(
        svg,
        r#"<path d="M{left},{top} L{left},{bottom} L{right},{bottom}" fill="none" stroke="black"/>"#
    );
    let x_range = if xm.log { (10f64.powf(xm.lo), 10f64.powf(xm.hi)) } else { (xm.lo, xm.hi) };
    for t in ticks(x_range.0, x_range.1, xm.log) {
        let px = xm.map(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 18.0,
            fmt_tick(t)
        );
    }
    for t in ticks(ym.lo, ym.hi, false) {
        let py = ym.map(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{right}" y2="{py:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            left - 5.0,
            left - 8.0,
            py + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        0.5 * (left + right),
        HEIGHT - 12.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">mean SNR (dB)</text>"#,
        0.5 * (top + bottom),
        0.5 * (top + bottom)
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.points.len() >= 2 {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", xm.map(x), ym.map(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                pts.join(" ")
            );
        }
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                xm.map(x),
                ym.map(y)
            );
        }
        let ly = top + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            right + 12.0,
            right + 32.0,
            right + 38.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

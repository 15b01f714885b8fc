//! SVG learning-curve charts: mean accuracy per strategy with a ±1 std band.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// One learning curve: `mean[q]` and `std[q]` at query index `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Y range covering every band, padded, snapped to 0.05 and kept in [0, 1].
fn y_range(series: &[Series]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for (m, sd) in s.mean.iter().zip(&s.std) {
            lo = lo.min(m - sd);
            hi = hi.max(m + sd);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    let lo = ((lo - 0.02).max(0.0) / 0.05).floor() * 0.05;
    let hi = ((hi + 0.02).min(1.0) / 0.05).ceil() * 0.05;
    let (lo, hi) = (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0));
    if hi - lo < 0.05 {
        if hi >= 0.05 {
            (hi - 0.05, hi)
        } else {
            (0.0, 0.05)
        }
    } else {
        (lo, hi)
    }
}

/// Renders the curves as a standalone SVG document.
pub fn learning_curve_svg(title: &str, series: &[Series]) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let max_q = series
        .iter()
        .map(|s| s.mean.len())
        .max()
        .unwrap_or(1)
        .saturating_sub(1)
        .max(1);
    let (y_lo, y_hi) = y_range(series);
    let sx = |q: f64| MARGIN_LEFT + q / max_q as f64 * plot_w;
    let sy = |v: f64| MARGIN_TOP + (y_hi - v.clamp(y_lo, y_hi)) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );

    // axes and grid
    let _ = writeln!(svg, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT}" y1="{}" x2="{}" y2="{}"/>"#,
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{}"/>"#,
        MARGIN_TOP + plot_h
    );
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="y-ticks" fill="black">"#);
    let steps = ((y_hi - y_lo) / 0.05).round() as usize;
    let stride = (steps / 8).max(1);
    for i in (0..=steps).step_by(stride) {
        let v = y_lo + i as f64 * 0.05;
        let y = sy(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"##,
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="x-ticks" fill="black">"#);
    let x_stride = (max_q / 10).max(1);
    for q in (0..=max_q).step_by(x_stride) {
        let x = sx(q as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{q}</text>"#,
            MARGIN_TOP + plot_h + 18.0
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">query</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">test accuracy</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let name = escape(&s.name);
        let upper: Vec<String> = s
            .mean
            .iter()
            .zip(&s.std)
            .enumerate()
            .map(|(q, (m, sd))| format!("{:.2},{:.2}", sx(q as f64), sy(m + sd)))
            .collect();
        let lower: Vec<String> = s
            .mean
            .iter()
            .zip(&s.std)
            .enumerate()
            .rev()
            .map(|(q, (m, sd))| format!("{:.2},{:.2}", sx(q as f64), sy(m - sd)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polygon class="band" data-strategy="{name}" fill="{colour}" fill-opacity="0.15" stroke="none" points="{} {}"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        let line: Vec<String> = s
            .mean
            .iter()
            .enumerate()
            .map(|(q, m)| format!("{:.2},{:.2}", sx(q as f64), sy(*m)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-strategy="{name}" fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            line.join(" ")
        );
    }

    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let x = WIDTH - MARGIN_RIGHT + 20.0;
        let y = MARGIN_TOP + 10.0 + 22.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<g class="legend-entry"><line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{colour}" stroke-width="3"/><text x="{}" y="{}">{}</text></g>"#,
            x + 24.0,
            x + 30.0,
            y + 4.0,
            escape(&s.name)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}

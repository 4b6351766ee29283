//! Minimal SVG plotter: axes, ticks, labels, polylines and a stacked bar.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A horizontal reference line.
pub struct Level {
    pub label: String,
    pub y: f64,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 100.0).round() / 100.0)
    }
}

/// Line chart. With `log2_x` the x axis is `log2(x)` and ticks show `x`.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], levels: &[Level], log2_x: bool) -> String {
    let tx = |x: f64| if log2_x { x.log2() } else { x };
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| tx(p.0))));
    let (y0, y1) = range(
        series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(levels.iter().map(|l| l.y)),
    );
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (tx(x) - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    header(&mut out, title);
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let y = y0 + (y1 - y0) * f64::from(i) / 4.0;
        let py = sy(y);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            py + 4.0,
            fmt_tick(y)
        );
    }
    let mut xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let stride = xs.len().div_ceil(8).max(1);
    for x in xs.iter().step_by(stride) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            sx(*x),
            TOP + ph + 16.0,
            fmt_tick(*x)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );
    let mut legend_y = TOP + 10.0;
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{legend_y}" fill="{color}">{}</text>"#,
            W - RIGHT + 10.0,
            escape(&s.label)
        );
        legend_y += 16.0;
    }
    for l in levels {
        let py = sy(l.y);
        let _ = writeln!(
            out,
            r#"<line x1="{LEFT}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="black" stroke-dasharray="6 4"/>"#,
            LEFT + pw
        );
        let _ = writeln!(out, r#"<text x="{}" y="{legend_y}">{}</text>"#, W - RIGHT + 10.0, escape(&l.label));
        legend_y += 16.0;
    }
    out.push_str("</svg>\n");
    out
}

/// One vertical bar split into `(label, value)` segments, bottom to top.
pub fn stacked_bar(title: &str, y_label: &str, segments: &[(String, f64)]) -> String {
    let total: f64 = segments.iter().map(|s| s.1.max(0.0)).sum();
    let ph = H - TOP - BOTTOM;
    let bar_x = LEFT + 60.0;
    let bar_w = 120.0;
    let mut out = String::new();
    header(&mut out, title);
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );
    let mut y = TOP + ph;
    for (i, (label, v)) in segments.iter().enumerate() {
        let frac = if total > 0.0 { v.max(0.0) / total } else { 0.0 };
        let h = frac * ph;
        y -= h;
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{bar_x}" y="{y:.2}" width="{bar_w}" height="{h:.2}" fill="{color}"/>"#
        );
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}">{} ({:.1}%)</text>"#,
            bar_x + bar_w + 60.0,
            TOP + 16.0 * i as f64,
            bar_x + bar_w + 76.0,
            TOP + 16.0 * i as f64 + 9.0,
            escape(label),
            100.0 * frac
        );
    }
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        bar_x - 10.0,
        TOP + ph,
        bar_x + bar_w + 10.0,
        TOP + ph
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_draws_one_polyline_per_series() {
        let s = vec![
            Series { label: "a".into(), points: vec![(1.0, 0.0), (2.0, 1.0)] },
            Series { label: "b<c".into(), points: vec![(1.0, 2.0)] },
        ];
        let svg = line_chart("t", "x", "y", &s, &[Level { label: "l".into(), y: 0.5 }], true);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("b&lt;c"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn stacked_bar_handles_all_zero_segments() {
        let svg = stacked_bar("t", "J", &[("a".into(), 0.0), ("b".into(), 0.0)]);
        assert_eq!(svg.matches("<rect").count(), 1 + 2 * 2);
    }
}

//! Standalone SVG boxplots.

use std::fmt::Write as _;

use super::output::quartiles;

pub struct BoxSeries {
    pub label: String,
    pub values: Vec<f64>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tukey boxplot: box from q1 to q3, whiskers to the furthest points within
/// 1.5 IQR, remaining points drawn individually. `reference` adds a dashed
/// horizontal line.
pub fn boxplot_svg(title: &str, ylabel: &str, series: &[BoxSeries], reference: Option<f64>) -> String {
    let all: Vec<f64> = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .chain(reference)
        .filter(|v| v.is_finite())
        .collect();
    let (mut lo, mut hi) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { lo.abs().max(1.0) * 0.05 };
    lo -= pad;
    hi += pad;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let plot_w = WIDTH - LEFT - RIGHT;
    let y = |v: f64| TOP + (hi - v) / (hi - lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<text transform="translate(18,{:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + plot_h / 2.0,
        escape(ylabel)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let v = lo + (hi - lo) * i as f64 / 5.0;
        let yy = y(v);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{yy:.2}" x2="{LEFT}" y2="{yy:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.4e}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            yy + 4.0
        );
    }
    if let Some(r) = reference.filter(|r| r.is_finite()) {
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="#c0392b" stroke-dasharray="6,4"/>"##,
            y(r),
            LEFT + plot_w
        );
    }
    let k = series.len().max(1) as f64;
    let slot = plot_w / k;
    for (i, b) in series.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let half = (slot * 0.3).min(40.0);
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            HEIGHT - BOTTOM + 20.0,
            escape(&b.label)
        );
        let finite: Vec<f64> = b.values.iter().copied().filter(|v| v.is_finite()).collect();
        let Some(q) = quartiles(&finite) else { continue };
        let fence_lo = q.q1 - 1.5 * q.iqr();
        let fence_hi = q.q3 + 1.5 * q.iqr();
        let wlo = finite.iter().copied().filter(|&v| v >= fence_lo).fold(f64::INFINITY, f64::min);
        let whi = finite.iter().copied().filter(|&v| v <= fence_hi).fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            s,
            r##"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/><line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"##,
            y(whi),
            y(q.q3),
            y(q.q1),
            y(wlo)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#aed6f1" stroke="black"/>"##,
            cx - half,
            y(q.q3),
            2.0 * half,
            (y(q.q1) - y(q.q3)).max(0.5)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{2:.2}" x2="{1:.2}" y2="{2:.2}" stroke="black" stroke-width="2"/>"##,
            cx - half,
            cx + half,
            y(q.median)
        );
        for v in finite.iter().filter(|&&v| v < fence_lo || v > fence_hi) {
            let _ = writeln!(s, r#"<circle cx="{cx:.2}" cy="{:.2}" r="2.5" fill="none" stroke="black"/>"#, y(*v));
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_one_box_per_series() {
        let svg = boxplot_svg(
            "t <1>",
            "estimate",
            &[
                BoxSeries { label: "a".into(), values: vec![1.0, 2.0, 3.0, 4.0, 100.0] },
                BoxSeries { label: "b".into(), values: vec![2.0; 4] },
            ],
            Some(2.5),
        );
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("fill=\"#aed6f1\"").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("t &lt;1&gt;"));
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn degenerate_inputs() {
        let svg = boxplot_svg("empty", "y", &[], None);
        assert!(svg.contains("</svg>"));
        let svg = boxplot_svg("nan", "y", &[BoxSeries { label: "x".into(), values: vec![f64::NAN] }], None);
        assert!(svg.contains("</svg>"));
    }
}

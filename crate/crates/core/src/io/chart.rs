//! Minimal SVG bar chart for ranked or graded results.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const BAR: f64 = 18.0;
const GAP: f64 = 6.0;
const LABEL: f64 = 200.0;
const MARGIN: f64 = 30.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Horizontal bars scaled to `max` (or the largest value when `None`).
pub fn bar_chart(title: &str, bars: &[(String, f64)], max: Option<f64>) -> String {
    let top = max
        .unwrap_or_else(|| bars.iter().map(|b| b.1).fold(0.0, f64::max))
        .max(f64::MIN_POSITIVE);
    let plot = WIDTH - LABEL - 2.0 * MARGIN - 60.0;
    let height = 2.0 * MARGIN + bars.len() as f64 * (BAR + GAP);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="18" font-weight="bold">{}</text>"#, escape(title));
    for (i, (label, v)) in bars.iter().enumerate() {
        let y = MARGIN + i as f64 * (BAR + GAP);
        let w = (v / top).clamp(0.0, 1.0) * plot;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN + LABEL - 6.0,
            y + BAR * 0.75,
            escape(label)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{:.1}" y="{y:.1}" width="{w:.1}" height="{BAR}" fill="#4a7ab8"/>"##,
            MARGIN + LABEL
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            MARGIN + LABEL + w + 4.0,
            y + BAR * 0.75,
            super::format_number((v * 1e4).round() / 1e4)
        );
    }
    s.push_str("</svg>\n");
    s
}

//! Minimal SVG bar charts for histograms.

use std::fmt::Write;

/// Vertical bar chart with one bar per label.
pub fn bar_chart_svg(title: &str, labels: &[String], values: &[f64]) -> String {
    assert_eq!(labels.len(), values.len());
    let n = labels.len().max(1);
    let bar_w = 40.0;
    let gap = 10.0;
    let left = 50.0;
    let top = 40.0;
    let plot_h = 200.0;
    let width = left + n as f64 * (bar_w + gap) + gap;
    let height = top + plot_h + 60.0;
    let max = values.iter().cloned().fold(0.0_f64, f64::max);
    let scale = if max > 0.0 { plot_h / max } else { 0.0 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, width / 2.0, xml_escape(title));
    let base = top + plot_h;
    let _ = writeln!(s, r#"<line x1="{left}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#, width - gap);
    for (i, (label, v)) in labels.iter().zip(values).enumerate() {
        let x = left + gap + i as f64 * (bar_w + gap);
        let h = v * scale;
        let _ = writeln!(
            s,
            r##"<rect x="{x}" y="{}" width="{bar_w}" height="{h}" fill="#4a7ab5"><title>{}: {v}</title></rect>"##,
            base - h,
            xml_escape(label)
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{v}</text>"#, x + bar_w / 2.0, base - h - 3.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" transform="rotate(-45 {} {})">{}</text>"#,
            x + bar_w / 2.0,
            base + 14.0,
            x + bar_w / 2.0,
            base + 14.0,
            xml_escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

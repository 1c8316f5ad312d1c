//! Persistence diagrams as standalone SVG, one panel per degree.

use std::fmt::Write;

use crate::barcode::GradedBarcode;

const PANEL: f64 = 240.0;
const PAD: f64 = 36.0;
const GUTTER: f64 = 18.0;

/// Points `(birth, death)` per degree; rays sit on a gutter line above the plot.
pub fn persistence_diagrams(b: &GradedBarcode, title: &str) -> String {
    let degrees: Vec<i32> = b.degrees().collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, bar) in b.iter() {
        lo = lo.min(bar.birth);
        hi = hi.max(bar.birth);
        if !bar.is_infinite() {
            hi = hi.max(bar.death);
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        hi = lo + 1.0;
    }
    let span = hi - lo;
    let (lo, hi) = (lo - 0.05 * span, hi + 0.05 * span);
    let panels = degrees.len().max(1);
    let width = panels as f64 * (PANEL + PAD) + PAD;
    let height = PANEL + GUTTER + 2.0 * PAD;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{PAD}" y="16">{}</text>"#, escape(title));
    for (k, n) in degrees.iter().enumerate() {
        let x0 = PAD + k as f64 * (PANEL + PAD);
        let y0 = PAD + GUTTER;
        let px = |t: f64| x0 + (t - lo) / (hi - lo) * PANEL;
        let py = |t: f64| y0 + PANEL - (t - lo) / (hi - lo) * PANEL;
        let _ = writeln!(
            s,
            r##"<rect x="{x0}" y="{y0}" width="{PANEL}" height="{PANEL}" fill="none" stroke="#888"/>"##
        );
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{}" x2="{}" y2="{y0}" stroke="#bbb"/>"##,
            y0 + PANEL,
            x0 + PANEL
        );
        let gy = PAD + GUTTER / 2.0;
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{gy}" x2="{}" y2="{gy}" stroke="#bbb" stroke-dasharray="4 3"/>"##,
            x0 + PANEL
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">inf</text>"#, x0 + PANEL + 3.0, gy + 4.0);
        let _ = writeln!(s, r#"<text x="{x0}" y="{}">H^{n}</text>"#, y0 + PANEL + 16.0);
        for bar in b.degree(*n) {
            let y = if bar.is_infinite() { gy } else { py(bar.death) };
            let fill = if bar.is_infinite() { "#c0392b" } else { "#2c3e50" };
            let _ = writeln!(
                s,
                r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{fill}"><title>[{}, {})</title></circle>"#,
                px(bar.birth),
                y,
                bar.birth,
                if bar.is_infinite() { "inf".to_string() } else { bar.death.to_string() }
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

//! Minimal SVG line plots. Coordinates are printed at fixed precision so
//! the output is byte-stable.

use std::fmt::Write;

use crate::artifact::{format_float, Artifact, PlotSpec};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_Y: f64 = 40.0;
type Segments = Vec<Vec<(f64, f64)>>;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Columns that are missing or hold no finite value are skipped; empty
/// cells and backward steps in x break a polyline into segments.
pub fn render_svg(artifact: &Artifact, spec: &PlotSpec, config_hash: &str) -> String {
    let xi = artifact.column(&spec.x);
    let tx = |x: f64| if spec.log_x { x.log10() } else { x };
    let mut series: Vec<(String, Segments)> = Vec::new();
    if let Some(xi) = xi {
        for y in &spec.ys {
            let Some(yi) = artifact.column(y) else { continue };
            let mut segments: Segments = vec![Vec::new()];
            for row in &artifact.rows {
                let point = row[xi]
                    .as_f64()
                    .zip(row[yi].as_f64())
                    .map(|(x, y)| (tx(x), y))
                    .filter(|(x, y)| x.is_finite() && y.is_finite());
                let current = segments.last_mut().expect("non-empty");
                match point {
                    Some(p) if current.last().is_some_and(|q| p.0 < q.0) => segments.push(vec![p]),
                    Some(p) => current.push(p),
                    None if !current.is_empty() => segments.push(Vec::new()),
                    None => {}
                }
            }
            segments.retain(|s| !s.is_empty());
            if !segments.is_empty() {
                series.push((y.clone(), segments));
            }
        }
    }

    let points = series.iter().flat_map(|(_, s)| s.iter().flatten());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| MARGIN_Y + (y1 - y) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<!-- config {config_hash} -->");
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        MARGIN_Y - 14.0,
        escape(&artifact.name)
    );
    if (y0..=y1).contains(&0.0) {
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_LEFT}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            MARGIN_LEFT + plot_w,
            py(0.0),
            py(0.0)
        );
    }
    let label_x = |x: f64| format_float(if spec.log_x { 10f64.powf(x) } else { x });
    let bottom = MARGIN_Y + plot_h;
    let _ = writeln!(s, r#"<text x="{MARGIN_LEFT}" y="{:.2}" text-anchor="start">{}</text>"#, bottom + 16.0, label_x(x0));
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
        MARGIN_LEFT + plot_w,
        bottom + 16.0,
        label_x(x1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        bottom + 32.0,
        escape(&spec.x_label),
        if spec.log_x { " (log scale)" } else { "" }
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.4e}</text>"#, MARGIN_LEFT - 6.0, MARGIN_Y + 4.0, y1);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.4e}</text>"#, MARGIN_LEFT - 6.0, bottom, y0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MARGIN_Y + plot_h / 2.0,
        MARGIN_Y + plot_h / 2.0,
        escape(&spec.y_label)
    );

    for (k, (name, segments)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for seg in segments {
            let pts: Vec<String> = seg.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = MARGIN_Y + 16.0 + 18.0 * k as f64;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0,
            ly - 4.0,
            ly - 4.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, lx + 26.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

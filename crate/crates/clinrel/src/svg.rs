//! SVG scatter plots and CSV dumps of t-SNE layouts.

use std::fmt::Write as _;

use clinrel_core::linalg::Matrix;

use crate::error::{Error, Result};
use crate::registry::Source;
use crate::workflow::PointLabel;

const PALETTE: [&str; 8] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];
const PLOT: f64 = 600.0;
const LEGEND_W: f64 = 220.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Classes in order of first appearance.
fn class_order(labels: &[PointLabel]) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for l in labels {
        if !out.contains(&l.class.as_str()) {
            out.push(&l.class);
        }
    }
    out
}

/// One `<circle>` per point: colour by class, filled for real points and
/// hollow for synthetic ones. The data area's viewBox spans the layout with a
/// 5% margin; legend swatches are squares so the circle count equals `n`.
pub fn render_scatter(coords: &Matrix, labels: &[PointLabel], title: &str) -> Result<String> {
    let n = coords.rows();
    if n == 0 {
        return Err(Error::Config("cannot plot an empty embedding".into()));
    }
    if labels.len() != n {
        return Err(Error::Config(format!("label count {} does not match {} points", labels.len(), n)));
    }
    let classes = class_order(labels);
    let color = |class: &str| PALETTE[classes.iter().position(|c| *c == class).unwrap_or(0) % PALETTE.len()];

    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let (x, y) = (coords.get(i, 0), -coords.get(i, 1));
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let span = (xmax - xmin).max(ymax - ymin).max(1e-9);
    let (w, h) = ((xmax - xmin).max(span * 1e-3), (ymax - ymin).max(span * 1e-3));
    let (vx, vy, vw, vh) = (xmin - 0.05 * w, ymin - 0.05 * h, 1.1 * w, 1.1 * h);
    let r = 0.006 * span;
    let stroke = 0.25 * r;

    let mut s = String::new();
    let total_w = PLOT + LEGEND_W;
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total_w}" height="{h}" viewBox="0 0 {total_w} {h}">"#,
        h = PLOT + 40.0
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{total_w}" height="{}" fill="white"/>"#, PLOT + 40.0);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#, PLOT / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<svg x="0" y="40" width="{PLOT}" height="{PLOT}" viewBox="{vx:.6} {vy:.6} {vw:.6} {vh:.6}" preserveAspectRatio="xMidYMid meet">"#
    );
    let _ = writeln!(s, r#"<g stroke-width="{stroke:.6}">"#);
    for (i, l) in labels.iter().enumerate() {
        let c = color(&l.class);
        let fill = if l.source == Source::Real { c } else { "none" };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.6}" cy="{:.6}" r="{r:.6}" fill="{fill}" stroke="{c}"/>"#,
            coords.get(i, 0),
            -coords.get(i, 1)
        );
    }
    s.push_str("</g>\n</svg>\n");

    let mut entries: Vec<(Source, &str)> = Vec::new();
    for source in [Source::Real, Source::Synthetic] {
        for class in &classes {
            if labels.iter().any(|l| l.source == source && l.class == *class) {
                entries.push((source, class));
            }
        }
    }
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="13">"#);
    for (k, (source, class)) in entries.iter().enumerate() {
        let y = 60.0 + 24.0 * k as f64;
        let c = color(class);
        let fill = if *source == Source::Real { c } else { "none" };
        let _ = writeln!(
            s,
            r#"<rect class="legend" x="{}" y="{}" width="12" height="12" fill="{fill}" stroke="{c}" stroke-width="2"/>"#,
            PLOT + 16.0,
            y - 10.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{y}">{} {}</text>"#, PLOT + 36.0, escape(&source.to_string()), escape(class));
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

/// `index,x,y,source,class` rows.
pub fn coords_csv(coords: &Matrix, labels: &[PointLabel]) -> String {
    let mut s = String::from("index,x,y,source,class\n");
    for (i, l) in labels.iter().enumerate() {
        let _ = writeln!(s, "{i},{},{},{},{}", coords.get(i, 0), coords.get(i, 1), l.source, l.class);
    }
    s
}

/// `iter,kl` rows; iteration `k` is the layout entering step `k`, and the last
/// row is the final layout.
pub fn kl_trace_csv(trace: &[f64], final_kl: f64) -> String {
    let mut s = String::from("iter,kl\n");
    for (i, kl) in trace.iter().enumerate() {
        let _ = writeln!(s, "{i},{kl}");
    }
    let _ = writeln!(s, "{},{final_kl}", trace.len());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels() -> Vec<PointLabel> {
        [(Source::Real, "AD"), (Source::Real, "NonAD"), (Source::Synthetic, "AD"), (Source::Synthetic, "NonAD"), (Source::Real, "AD")]
            .iter()
            .map(|&(source, c)| PointLabel { source, class: c.into() })
            .collect()
    }

    #[test]
    fn one_circle_per_point_and_four_legend_entries() {
        let coords = Matrix::from_vec(5, 2, vec![0.0, 0.0, 1.0, 2.0, -1.0, 0.5, 3.0, -2.0, 0.2, 0.1]);
        let svg = render_scatter(&coords, &labels(), "t").unwrap();
        assert_eq!(svg.matches("<circle").count(), 5);
        assert_eq!(svg.matches(r#"class="legend""#).count(), 4);
        assert_eq!(svg.matches(r#"fill="none""#).count(), 2 + 2);
    }

    #[test]
    fn errors_on_mismatch_or_empty() {
        let coords = Matrix::from_vec(2, 2, vec![0.0; 4]);
        assert!(render_scatter(&coords, &labels(), "t").is_err());
        assert!(render_scatter(&Matrix::zeros(0, 2), &[], "t").is_err());
    }

    #[test]
    fn viewbox_has_five_percent_margin() {
        let coords = Matrix::from_vec(2, 2, vec![0.0, 0.0, 10.0, -10.0]);
        let l = &labels()[..2];
        let svg = render_scatter(&coords, l, "t").unwrap();
        assert!(svg.contains(r#"viewBox="-0.500000 -0.500000 11.000000 11.000000""#), "{svg}");
    }
}

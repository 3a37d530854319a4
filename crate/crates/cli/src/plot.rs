//! Static SVG scatter plots.
//!
//! Planar embeddings are drawn as they are. Spherical (3-column) embeddings
//! are drawn as two orthographic discs: the upper hemisphere (`z ≥ 0`) seen
//! from above and the lower one seen from below. Points are coloured by label
//! from a fixed palette; point circles are the only elements with a colour
//! fill, so the number of distinct `fill="#…"` values equals the number of
//! labels shown (up to the palette size).

use std::fmt::Write as _;

use sphere_sne::Matrix64;

use crate::error::{CliError, Result};

pub const PALETTE: [&str; 20] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
];

const POINT_RADIUS: f64 = 2.5;
const PANEL: f64 = 420.0;
const MARGIN: f64 = 20.0;

fn colour(labels: Option<&[usize]>, i: usize) -> &'static str {
    PALETTE[labels.map_or(0, |l| l[i]) % PALETTE.len()]
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#);
}

fn point(out: &mut String, x: f64, y: f64, fill: &str) {
    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{POINT_RADIUS}" fill="{fill}"/>"#);
}

fn planar(y: &Matrix64, labels: Option<&[usize]>) -> String {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for row in y.iter_rows() {
        for a in 0..2 {
            lo[a] = lo[a].min(row[a]);
            hi[a] = hi[a].max(row[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let inner = PANEL - 2.0 * MARGIN;
    let scale = if span > 0.0 { inner / span } else { 0.0 };
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];

    let mut out = String::new();
    header(&mut out, PANEL, PANEL);
    for (i, row) in y.iter_rows().enumerate() {
        let px = PANEL / 2.0 + (row[0] - mid[0]) * scale;
        let py = PANEL / 2.0 - (row[1] - mid[1]) * scale;
        point(&mut out, px, py, colour(labels, i));
    }
    out.push_str("</svg>\n");
    out
}

fn hemispheres(y: &Matrix64, labels: Option<&[usize]>) -> String {
    let radius = PANEL / 2.0 - MARGIN;
    let centres = [PANEL / 2.0, PANEL + PANEL / 2.0];
    let cy = PANEL / 2.0;

    let mut out = String::new();
    header(&mut out, 2.0 * PANEL, PANEL + MARGIN);
    for (cx, title) in centres.iter().zip(["z ≥ 0 (from above)", "z &lt; 0 (from below)"]) {
        let _ = writeln!(
            out,
            r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="{radius:.2}" fill="none" stroke="#444444" stroke-width="1"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{title}</text>"#,
            PANEL + MARGIN / 2.0
        );
    }
    for (i, row) in y.iter_rows().enumerate() {
        let len = (row[0] * row[0] + row[1] * row[1] + row[2] * row[2]).sqrt();
        let (x, yy, z) = if len > 0.0 { (row[0] / len, row[1] / len, row[2] / len) } else { (0.0, 0.0, 1.0) };
        // seen from below, the x axis is mirrored
        let (cx, sx) = if z >= 0.0 { (centres[0], x) } else { (centres[1], -x) };
        point(&mut out, cx + sx * radius, cy - yy * radius, colour(labels, i));
    }
    out.push_str("</svg>\n");
    out
}

/// Renders a 2- or 3-column embedding.
pub fn render_svg(y: &Matrix64, labels: Option<&[usize]>) -> Result<String> {
    if y.rows() == 0 {
        return Err(CliError::validation("nothing to plot: the embedding has no rows"));
    }
    if let Some(l) = labels {
        if l.len() != y.rows() {
            return Err(CliError::validation(format!("{} labels for {} points", l.len(), y.rows())));
        }
    }
    match y.cols() {
        2 => Ok(planar(y, labels)),
        3 => Ok(hemispheres(y, labels)),
        d => Err(CliError::validation(format!("can only plot 2 or 3 columns, got {d}"))),
    }
}

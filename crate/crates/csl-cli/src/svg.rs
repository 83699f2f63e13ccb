//! Minimal SVG scatter output: one circle per point, radius 3px, a fixed
//! 8-color palette indexed by label, view fitted to the data with a 5%
//! margin.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::errors::CliResult;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

const CANVAS: f64 = 600.0;

pub fn write_scatter(path: &Path, points: &[(f64, f64)], labels: &[usize]) -> CliResult<()> {
    assert_eq!(points.len(), labels.len());
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    let span_x = (max_x - min_x).max(1e-12);
    let span_y = (max_y - min_y).max(1e-12);
    // 5% margin on each side, data scaled into a fixed pixel canvas so the
    // 3px radius means what it says.
    let margin = 0.05 * CANVAS;
    let scale = ((CANVAS - 2.0 * margin) / span_x).min((CANVAS - 2.0 * margin) / span_y);
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = margin + (x - min_x) * scale;
        let py = CANVAS - margin - (y - min_y) * scale; // SVG y grows downward
        (px, py)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {CANVAS} {CANVAS}" width="{CANVAS}" height="{CANVAS}">"#
    );
    for (&(x, y), &label) in points.iter().zip(labels) {
        let (px, py) = to_px(x, y);
        let _ = writeln!(
            svg,
            r#"  <circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{}"/>"#,
            PALETTE[label % PALETTE.len()]
        );
    }
    svg.push_str("</svg>\n");
    fs::write(path, svg)?;
    Ok(())
}

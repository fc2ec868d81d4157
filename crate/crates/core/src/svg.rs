//! Minimal SVG rendering for field maps and convergence curves. Plain text
//! output keeps plots diffable; the numerical CSV is always written
//! alongside, so these are never the only record of a run.

use crate::field::FieldGrid;
use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 50.0;

fn color(frac: f64) -> String {
    // Two-stop blue -> red ramp through white.
    let f = frac.clamp(0.0, 1.0);
    let (r, g, b) = if f < 0.5 {
        let t = f * 2.0;
        ((70.0 + 185.0 * t) as u8, (100.0 + 155.0 * t) as u8, 255u8)
    } else {
        let t = (f - 0.5) * 2.0;
        (255u8, (255.0 - 175.0 * t) as u8, (255.0 - 195.0 * t) as u8)
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Render a field grid as colored cells; absent values stay unfilled.
pub fn heatmap(grid: &FieldGrid) -> String {
    let spec = &grid.spec;
    let present: Vec<f64> = grid.samples.iter().filter_map(|s| s.value).collect();
    let lo = present.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = present.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cell_w = (WIDTH - 2.0 * MARGIN) / spec.nx as f64;
    let cell_h = (HEIGHT - 2.0 * MARGIN) / spec.ny as f64;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
    );
    for iy in 0..spec.ny {
        for ix in 0..spec.nx {
            let s = grid.sample(ix, iy);
            if let Some(v) = s.value {
                let x = MARGIN + ix as f64 * cell_w;
                // SVG y grows downward; grid rows grow upward.
                let y = HEIGHT - MARGIN - (iy + 1) as f64 * cell_h;
                let _ = writeln!(
                    out,
                    "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cell_w:.2}\" height=\"{cell_h:.2}\" fill=\"{}\"/>",
                    color((v - lo) / span)
                );
            }
        }
    }
    let _ = writeln!(
        out,
        "<text x=\"{MARGIN}\" y=\"{:.2}\" font-size=\"14\" font-family=\"monospace\">min {lo:e}  max {hi:e}</text>",
        HEIGHT - MARGIN / 3.0
    );
    out.push_str("</svg>\n");
    out
}

/// Polyline plot of `(x, y)` points with a log10 y-axis; intended for error
/// versus element-count curves.
pub fn line_plot(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
    );
    if !points.is_empty() {
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1.max(1e-300).log10()).collect();
        let (x_lo, x_hi) = (
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        let (y_lo, y_hi) = (
            ys.iter().cloned().fold(f64::INFINITY, f64::min),
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
        let y_span = if y_hi > y_lo { y_hi - y_lo } else { 1.0 };
        let map = |x: f64, y: f64| {
            (
                MARGIN + (x - x_lo) / x_span * (WIDTH - 2.0 * MARGIN),
                HEIGHT - MARGIN - (y - y_lo) / y_span * (HEIGHT - 2.0 * MARGIN),
            )
        };
        let path: Vec<String> = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| {
                let (px, py) = map(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\"/>",
            path.join(" ")
        );
        for (&x, &y) in xs.iter().zip(&ys) {
            let (px, py) = map(x, y);
            let _ = writeln!(
                out,
                "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"#1f4e9c\"/>"
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" font-family=\"monospace\">{x_label}</text>",
            WIDTH / 2.0 - 40.0,
            HEIGHT - MARGIN / 3.0
        );
        let _ = writeln!(
            out,
            "<text x=\"8\" y=\"{:.2}\" font-size=\"14\" font-family=\"monospace\">{y_label} (log10 {y_lo:.2} .. {y_hi:.2})</text>",
            MARGIN / 2.0
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{field_map, GridSpec};
    use crate::geometry::{build_annulus, Point2};
    use crate::system::{assemble, solve_dirichlet_to_neumann};

    #[test]
    fn heatmap_masks_absent_cells() {
        let mesh = build_annulus(
            Point2::new(0.0, 0.0),
            2.0,
            Point2::new(0.0, 0.0),
            1.0,
            12,
            12,
        )
        .unwrap();
        let mats = assemble(&mesh).unwrap();
        let sol = solve_dirichlet_to_neumann(&mesh, &mats, &vec![1.0; mesh.len()]).unwrap();
        let spec = GridSpec {
            x_min: -2.2,
            x_max: 2.2,
            y_min: -2.2,
            y_max: 2.2,
            nx: 11,
            ny: 11,
        };
        let grid = field_map(&sol, &spec).unwrap();
        let svg = heatmap(&grid);
        assert!(svg.starts_with("<svg"));
        let rects = svg.matches("<rect").count() - 1; // minus background
        let present = grid.samples.iter().filter(|s| s.value.is_some()).count();
        assert_eq!(rects, present);
        // Deterministic output for identical input.
        assert_eq!(svg, heatmap(&grid));
    }

    #[test]
    fn line_plot_contains_all_points() {
        let points = [(20.0, 0.034), (40.0, 0.009), (80.0, 0.0023)];
        let svg = line_plot(&points, "elements", "avg error");
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("polyline"));
    }
}

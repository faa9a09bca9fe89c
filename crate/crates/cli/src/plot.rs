use std::fmt::Write;

use crate::records::{grids, AlphaGrid, SweepRecord};
use crate::CliError;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 70.0;

pub fn alpha_color(alpha: f64, index: usize) -> &'static str {
    match alpha {
        a if a == 0.25 => "red",
        a if a == 0.75 => "green",
        a if a == 1.0 => "black",
        _ => ["blue", "orange", "purple", "teal", "brown"][index % 5],
    }
}

/// Scatter of `(‖u_x‖, ‖u_y‖)` with the λ-grid connectivity drawn per `α`.
///
/// Both axes share one scale so that symmetry about the bisector shows as such.
pub fn emit_map_plot(records: &[SweepRecord]) -> Result<String, CliError> {
    let grids = grids(records)?;
    let all = || grids.iter().flat_map(|g| g.points.iter().flatten()).flat_map(|p| p.iter().copied());
    let lo = all().fold(f64::INFINITY, f64::min);
    let mut hi = all().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1.0;
    }
    let span = SIZE - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + (v - lo) / (hi - lo) * span;
    let sy = |v: f64| SIZE - MARGIN - (v - lo) / (hi - lo) * span;

    let mut svg = String::new();
    let w = &mut svg;
    // writing into a String cannot fail
    let _ = writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let first = &records[0];
    let _ = writeln!(w, r#"<text x="{}" y="30" text-anchor="middle" font-size="16">{} / {}</text>"#, SIZE / 2.0, first.domain, first.initial);
    let (x0, x1, y0, y1) = (sx(lo), sx(hi), sy(lo), sy(hi));
    let _ = writeln!(w, r##"<g stroke="#444" stroke-width="1"><line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>"##);
    let _ = writeln!(w, r##"<line class="bisector" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#999" stroke-dasharray="4 4"/>"##);
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">{v:.4}</text>"#, sx(v), y0 + 18.0);
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{v:.4}</text>"#, x0 - 6.0, sy(v) + 4.0);
    }
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">‖u_x‖₂</text>"#, SIZE / 2.0, SIZE - 20.0);
    let _ = writeln!(w, r#"<text x="20" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 20 {})">‖u_y‖₂</text>"#, SIZE / 2.0, SIZE / 2.0);

    for (index, g) in grids.iter().enumerate() {
        let color = alpha_color(g.alpha, index);
        let _ = writeln!(w, r#"<g class="grid" data-alpha="{}" stroke="{color}" fill="none" stroke-width="1">"#, g.alpha);
        for line in grid_lines(g) {
            let pts: Vec<String> = line.iter().map(|p| format!("{:.3},{:.3}", sx(p[0]), sy(p[1]))).collect();
            let _ = writeln!(w, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        for p in g.points.iter().flatten() {
            let _ = writeln!(w, r#"<circle cx="{:.3}" cy="{:.3}" r="2.5" fill="{color}"/>"#, sx(p[0]), sy(p[1]));
        }
        let _ = writeln!(w, "</g>");
        let ly = MARGIN + 18.0 * index as f64;
        let _ = writeln!(w, r#"<text x="{}" y="{ly}" font-size="13" fill="{color}">α = {}</text>"#, SIZE - MARGIN - 70.0, g.alpha);
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

/// Rows (fixed λ₁) then columns (fixed λ₂) of the mapped grid.
fn grid_lines(g: &AlphaGrid) -> Vec<Vec<[f64; 2]>> {
    let mut lines: Vec<Vec<[f64; 2]>> = g.points.clone();
    for j in 0..g.lambda2.len() {
        lines.push(g.points.iter().map(|row| row[j]).collect());
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::tests::identity;

    #[test]
    fn markers_and_grids() {
        let svg = emit_map_plot(&identity(&[1.0], &[0.1, 1.0])).unwrap();
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches(r#"class="grid""#).count(), 1);
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.contains(r#"stroke="black""#));

        let axis: Vec<f64> = (0..10).map(|i| 0.1 + 0.1 * i as f64).collect();
        let svg = emit_map_plot(&identity(&[0.25, 0.75, 1.0], &axis)).unwrap();
        assert_eq!(svg.matches(r#"class="grid""#).count(), 3);
        assert_eq!(svg.matches("<circle").count(), 300);
        for c in ["red", "green", "black"] {
            assert!(svg.contains(&format!(r#"stroke="{c}""#)));
        }
    }

    #[test]
    fn rejects_empty_and_mixed_input() {
        assert!(emit_map_plot(&[]).is_err());
        let mut r = identity(&[1.0], &[0.1, 1.0]);
        r[0].domain = "rectangle".into();
        assert!(emit_map_plot(&r).is_err());
    }
}

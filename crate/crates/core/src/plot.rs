//! Deterministic SVG rendering of supply cost curves.

use std::fmt::Write as _;

use crate::econ::CostCurvePoint;
use crate::numfmt::sig6;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

/// Curves longer than this are thinned to evenly spaced vertices (first and
/// last always kept) so the file stays small.
pub const MAX_VERTICES: usize = 4000;

/// Rendered plot. `empty` is set when the curve had no points, in which case
/// the SVG holds only the axes and a "no data" note.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvePlot {
    pub svg: String,
    pub empty: bool,
}

/// Draws cumulative energy (TWh) against LCOE (£/kWh) as a single polyline.
pub fn render_cost_curve(points: &[CostCurvePoint], title: &str) -> CurvePlot {
    let x_max = nice_max(points.last().map_or(0.0, |p| p.cumulative_twh));
    let y_max = nice_max(points.iter().map(|p| p.lcoe).fold(0.0, f64::max));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + x / x_max * plot_w;
    let py = |y: f64| TOP + plot_h - y / y_max * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, y0, x1, y1) = (LEFT, TOP + plot_h, LEFT + plot_w, TOP);
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let (tx, ty) = (px(f * x_max), py(f * y_max));
        let _ = writeln!(
            s,
            r#"<line x1="{tx:.2}" y1="{y0}" x2="{tx:.2}" y2="{:.2}" stroke="black"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            sig6(f * x_max)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ty:.2}" x2="{x0}" y2="{ty:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            ty + 4.0,
            sig6(f * y_max)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Cumulative energy (TWh/yr)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">LCOE (£/kWh)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let empty = points.is_empty();
    if empty {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">no data</text>"#,
            LEFT + plot_w / 2.0,
            TOP + plot_h / 2.0
        );
    } else {
        s.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points=""#);
        for (k, i) in vertex_indices(points.len()).into_iter().enumerate() {
            let p = &points[i];
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.2},{:.2}", px(p.cumulative_twh), py(p.lcoe));
        }
        s.push_str("\"/>\n");
    }
    s.push_str("</svg>\n");
    CurvePlot { svg: s, empty }
}

fn vertex_indices(n: usize) -> Vec<usize> {
    if n <= MAX_VERTICES {
        return (0..n).collect();
    }
    let m = MAX_VERTICES;
    (0..m)
        .map(|k| (k * (n - 1) + (m - 1) / 2) / (m - 1))
        .collect()
}

/// Smallest of 1, 2, 2.5 or 5 times a power of ten that is at least `v`.
fn nice_max(v: f64) -> f64 {
    if !(v > 0.0 && v.is_finite()) {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    for m in [1.0, 2.0, 2.5, 5.0, 10.0] {
        if m * mag >= v {
            return m * mag;
        }
    }
    10.0 * mag
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: f64, l: f64) -> CostCurvePoint {
        CostCurvePoint {
            cumulative_twh: c,
            lcoe: l,
            site_id: String::new(),
        }
    }

    fn vertices(svg: &str) -> usize {
        let start = svg.find("points=\"").unwrap() + 8;
        let end = start + svg[start..].find('"').unwrap();
        svg[start..end].split(' ').count()
    }

    #[test]
    fn three_points_one_polyline() {
        let p = render_cost_curve(&[pt(1.0, 0.05), pt(2.0, 0.06), pt(4.0, 0.09)], "wind");
        assert!(!p.empty);
        assert_eq!(p.svg.matches("<polyline").count(), 1);
        assert_eq!(vertices(&p.svg), 3);
        assert_eq!(
            p.svg,
            render_cost_curve(&[pt(1.0, 0.05), pt(2.0, 0.06), pt(4.0, 0.09)], "wind").svg
        );
    }

    #[test]
    fn empty_curve_has_no_polyline() {
        let p = render_cost_curve(&[], "x");
        assert!(p.empty);
        assert!(!p.svg.contains("<polyline"));
    }

    #[test]
    fn long_curves_are_thinned() {
        let pts: Vec<_> = (0..10_000).map(|i| pt(f64::from(i + 1), 0.05)).collect();
        let idx = vertex_indices(pts.len());
        assert_eq!(idx.len(), MAX_VERTICES);
        assert_eq!((idx[0], *idx.last().unwrap()), (0, 9999));
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(vertices(&render_cost_curve(&pts, "x").svg), MAX_VERTICES);
    }

    #[test]
    fn nice_axis_limits() {
        assert_eq!(nice_max(0.093), 0.1);
        assert_eq!(nice_max(3.2), 5.0);
        assert_eq!(nice_max(20.0), 20.0);
        assert_eq!(nice_max(0.0), 1.0);
    }
}

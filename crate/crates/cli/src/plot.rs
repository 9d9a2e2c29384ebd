//! Static SVG line chart of a scan, one polyline per quantity against tau.

use std::fmt::Write as _;

use nlspring::{Quantity, ScanResult};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

fn color(q: Quantity) -> &'static str {
    match q {
        Quantity::P0 => "#1f77b4",
        Quantity::Pcl => "#ff7f0e",
        Quantity::Sx => "#2ca02c",
        Quantity::Sp => "#d62728",
    }
}

fn value_range(result: &ScanResult) -> (f64, f64) {
    let (lo, hi) = result
        .columns
        .iter()
        .flatten()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Renders the chart. Non-finite samples break the line.
pub fn render_svg(result: &ScanResult) -> String {
    let (x0, x1) = (result.tau[0], *result.tau.last().expect("grid has at least two points"));
    let (y0, y1) = value_range(result);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{xv:.3}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.4}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">tau</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );

    for (k, (&q, column)) in result.quantities.iter().zip(&result.columns).enumerate() {
        let mut segments: Vec<Vec<String>> = vec![Vec::new()];
        for (&x, &y) in result.tau.iter().zip(column) {
            if y.is_finite() {
                segments.last_mut().expect("non-empty").push(format!("{:.2},{:.2}", sx(x), sy(y)));
            } else if !segments.last().expect("non-empty").is_empty() {
                segments.push(Vec::new());
            }
        }
        for points in segments.iter().filter(|s| !s.is_empty()) {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.2" points="{}"/>"#,
                color(q),
                points.join(" ")
            );
        }
        let ly = TOP + 15.0 + 16.0 * k as f64;
        let lx = LEFT + plot_w - 60.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0,
            color(q),
            lx + 25.0,
            q.column()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

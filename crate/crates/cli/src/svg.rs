//! Standalone SVG bar chart for quick visual inspection.

use std::fmt::Write;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

/// Bars at positions `x` with heights `y` (both taken from table columns).
pub fn histogram(x: &[f64], y: &[f64], x_label: &str, y_label: &str, title: &str) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let (x_min, x_max) = bounds(x);
    let y_max = y.iter().copied().fold(0.0, f64::max);
    let y_max = if y_max > 0.0 { y_max } else { 1.0 };
    let span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let bar_w = (plot_w / x.len().max(1) as f64).max(0.5);
    let sx = |v: f64| {
        if x_max > x_min {
            LEFT + (v - x_min) / span * (plot_w - bar_w)
        } else {
            LEFT + (plot_w - bar_w) / 2.0
        }
    };
    let sy = |v: f64| TOP + plot_h * (1.0 - v / y_max);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    for (&xi, &yi) in x.iter().zip(y) {
        let top = sy(yi.max(0.0));
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="steelblue"/>"#,
            sx(xi),
            top,
            bar_w,
            TOP + plot_h - top
        );
    }
    let axis_y = TOP + plot_h;
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{axis_y}" x2="{}" y2="{axis_y}" stroke="black"/>"#,
        WIDTH - RIGHT
    );
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{axis_y}" stroke="black"/>"#);
    for (v, anchor) in [(x_min, "start"), (x_max, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{}" text-anchor="{anchor}">{}</text>"#,
            sx(v) + if anchor == "end" { bar_w } else { 0.0 },
            axis_y + 16.0,
            tick(v)
        );
    }
    for v in [0.0, y_max / 2.0, y_max] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.3}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(v) + 4.0,
            tick(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_label)
    );
    s.push_str("</svg>\n");
    s
}

fn bounds(x: &[f64]) -> (f64, f64) {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 0.0)
    }
}

fn tick(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e6 {
        format!("{v}")
    } else {
        format!("{v:.3e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

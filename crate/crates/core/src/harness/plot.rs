//! Standalone SVG rendering of err-versus-time curves.

use std::fmt::Write as _;

use crate::error::{input, Result};
use crate::optimizer::GreedyTrace;

/// Values at or below zero are raised to this floor on logarithmic axes.
pub const LOG_FLOOR: f64 = 1e-12;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Clone, Debug, Default)]
pub struct PlotOptions {
    pub loglog: bool,
    /// Reference utility for `err`; defaults to the best recorded estimate.
    pub f_star: Option<f64>,
    pub title: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Plot {
    pub svg: String,
    /// Number of values clipped to [`LOG_FLOOR`].
    pub clipped: usize,
}

/// `(time, err)` points of one trace, with `err = (estimate - f*) / f*`.
pub fn err_points(trace: &GreedyTrace<f64>, f_star: f64) -> Vec<(f64, f64)> {
    trace
        .rows
        .iter()
        .map(|r| {
            let err = if f_star == 0.0 { 0.0 } else { (r.estimate - f_star) / f_star };
            (r.wall_seconds, err)
        })
        .collect()
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One polyline per labelled trace. On log-log axes `|err|` is plotted.
pub fn render_svg(traces: &[(String, GreedyTrace<f64>)], opts: &PlotOptions) -> Result<Plot> {
    if traces.is_empty() {
        return input("nothing to plot");
    }
    let f_star = opts.f_star.unwrap_or_else(|| {
        traces
            .iter()
            .flat_map(|(_, t)| t.rows.iter().map(|r| r.estimate))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let mut clipped = 0usize;
    let mut series: Vec<Vec<(f64, f64)>> = Vec::with_capacity(traces.len());
    for (_, t) in traces {
        let pts = err_points(t, f_star)
            .into_iter()
            .map(|(x, y)| {
                if opts.loglog {
                    let y = y.abs();
                    if x <= LOG_FLOOR {
                        clipped += 1;
                    }
                    if y <= LOG_FLOOR {
                        clipped += 1;
                    }
                    (x.max(LOG_FLOOR).log10(), y.max(LOG_FLOOR).log10())
                } else {
                    (x, y)
                }
            })
            .collect();
        series.push(pts);
    }
    let all = series.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-300 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-300 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{m} {t} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let (xl, yl) = if opts.loglog {
        ("log10 time (s)", "log10 |err|")
    } else {
        ("time (s)", "err")
    };
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{xl}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 15 {})">{yl}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="{anchor}" font-size="10">{v:.3e}</text>"#,
            sx(v),
            HEIGHT - MARGIN + 14.0
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="10">{v:.3e}</text>"#,
            MARGIN - 4.0,
            sy(v)
        );
    }
    if let Some(title) = &opts.title {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="25" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            esc(title)
        );
    }
    for (s, ((label, _), pts)) in traces.iter().zip(&series).enumerate() {
        let color = COLORS[s % COLORS.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = MARGIN + 16.0 * s as f64;
        let lx = WIDTH - MARGIN - 90.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11">{}</text>"#,
            lx + 25.0,
            ly + 4.0,
            esc(label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(Plot { svg, clipped })
}

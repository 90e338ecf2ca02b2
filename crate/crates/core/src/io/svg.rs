//! Minimal standalone log-log line charts.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::tables::write_atomic;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Decade-aligned plotting box in `log10` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFrame {
    pub x_decades: (i32, i32),
    pub y_decades: (i32, i32),
}

impl LogLogFrame {
    fn covering(points: impl Iterator<Item = (f64, f64)>) -> Option<Self> {
        let mut bounds: Option<[f64; 4]> = None;
        for (x, y) in points {
            let (lx, ly) = (x.log10(), y.log10());
            let b = bounds.get_or_insert([lx, lx, ly, ly]);
            b[0] = b[0].min(lx);
            b[1] = b[1].max(lx);
            b[2] = b[2].min(ly);
            b[3] = b[3].max(ly);
        }
        let [x0, x1, y0, y1] = bounds?;
        let span = |lo: f64, hi: f64| {
            let (a, mut b) = (lo.floor() as i32, hi.ceil() as i32);
            if b == a {
                b += 1;
            }
            (a, b)
        };
        Some(Self {
            x_decades: span(x0, x1),
            y_decades: span(y0, y1),
        })
    }

    /// SVG pixel position of a data point.
    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let fx = (x.log10() - self.x_decades.0 as f64) / (self.x_decades.1 - self.x_decades.0) as f64;
        let fy = (y.log10() - self.y_decades.0 as f64) / (self.y_decades.1 - self.y_decades.0) as f64;
        (
            LEFT + fx * (WIDTH - LEFT - RIGHT),
            TOP + (1.0 - fy) * (HEIGHT - TOP - BOTTOM),
        )
    }
}

fn plottable(points: &[(f64, f64)]) -> impl Iterator<Item = (f64, f64)> + '_ {
    points
        .iter()
        .copied()
        .filter(|&(x, y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn decade_ticks((lo, hi): (i32, i32)) -> impl Iterator<Item = i32> {
    let step = ((hi - lo) as usize).div_ceil(8).max(1);
    (lo..=hi).step_by(step)
}

/// Render the chart. Points with a non-positive coordinate are left out.
pub fn render_svg_loglog(series: &[&[(f64, f64)]], labels: &[&str], title: &str) -> Result<String> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("no series to plot".into()));
    }
    if labels.len() != series.len() {
        return Err(Error::InvalidArgument(format!(
            "{} labels for {} series",
            labels.len(),
            series.len()
        )));
    }
    if let Some(k) = series.iter().position(|s| s.is_empty()) {
        return Err(Error::InvalidArgument(format!("series `{}` is empty", labels[k])));
    }
    let frame = LogLogFrame::covering(series.iter().flat_map(|s| plottable(s)))
        .ok_or_else(|| Error::InvalidArgument("no positive points to plot on log axes".into()))?;

    let mut svg = String::new();
    let (x_lo, y_top) = (LEFT, TOP);
    let (x_hi, y_bottom) = (WIDTH - RIGHT, HEIGHT - BOTTOM);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for k in decade_ticks(frame.x_decades) {
        let (px, _) = frame.map(10f64.powi(k), 10f64.powi(frame.y_decades.0));
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.3}" y1="{y_top}" x2="{px:.3}" y2="{y_bottom}" stroke="#ddd"/><text x="{px:.3}" y="{}" text-anchor="middle">1e{k}</text>"##,
            y_bottom + 16.0
        );
    }
    for k in decade_ticks(frame.y_decades) {
        let (_, py) = frame.map(10f64.powi(frame.x_decades.0), 10f64.powi(k));
        let _ = writeln!(
            svg,
            r##"<line x1="{x_lo}" y1="{py:.3}" x2="{x_hi}" y2="{py:.3}" stroke="#ddd"/><text x="{}" y="{:.3}" text-anchor="end">1e{k}</text>"##,
            x_lo - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{x_lo}" y="{y_top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x_hi - x_lo,
        y_bottom - y_top
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">E</text>"#,
        (x_lo + x_hi) / 2.0,
        HEIGHT - 12.0
    );

    for (k, (points, label)) in series.iter().zip(labels).enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = plottable(points)
            .map(|(x, y)| {
                let (px, py) = frame.map(x, y);
                format!("{px:.3},{py:.3}")
            })
            .collect();
        if !coords.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = y_top + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            x_lo + 10.0,
            x_lo + 30.0,
            x_lo + 36.0,
            ly + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Render and write atomically to `path`.
pub fn emit_svg_loglog(series: &[&[(f64, f64)]], labels: &[&str], title: &str, path: &Path) -> Result<()> {
    let svg = render_svg_loglog(series, labels, title)?;
    write_atomic(path, svg.as_bytes())
}

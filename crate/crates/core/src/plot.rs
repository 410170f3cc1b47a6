//! Minimal SVG line charts: cumulative consumption against generation with a
//! dashed availability line.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const MAX_POINTS: usize = 500;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LineSeries {
    pub label: String,
    /// `values[k]` is plotted at generation `k + 1`.
    pub values: Vec<f64>,
}

impl LineSeries {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            values,
        }
    }
}

/// Splits a `[generation][item]` table into one series per item.
pub fn item_series(series: &[Vec<f64>]) -> Vec<LineSeries> {
    let m = series.first().map_or(0, Vec::len);
    (0..m)
        .map(|i| LineSeries::new(format!("item {}", i + 1), series.iter().map(|row| row[i]).collect()))
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e5 {
        format!("{v:.2e}")
    } else {
        format!("{v:.0}")
    }
}

pub fn render_svg(title: &str, lines: &[LineSeries], threshold: Option<f64>) -> String {
    let n = lines.iter().map(|l| l.values.len()).max().unwrap_or(0).max(1);
    let data_max = lines
        .iter()
        .flat_map(|l| l.values.iter().copied())
        .chain(threshold)
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let y_max = if data_max > 0.0 { data_max * 1.05 } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x_of = |g: f64| {
        if n == 1 {
            LEFT
        } else {
            LEFT + (g - 1.0) / (n as f64 - 1.0) * plot_w
        }
    };
    let y_of = |v: f64| TOP + plot_h - v.clamp(0.0, y_max) / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    // Axes and ticks.
    let x0 = LEFT;
    let y0 = TOP + plot_h;
    let _ = writeln!(
        svg,
        r##"<path class="axes" d="M{x0},{TOP} V{y0} H{}" fill="none" stroke="#333"/>"##,
        LEFT + plot_w
    );
    for t in 0..=5 {
        let v = y_max * t as f64 / 5.0;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r##"<text x="{}" y="{:.1}" text-anchor="end" dominant-baseline="middle" fill="#333">{}</text>"##,
            x0 - 6.0,
            y,
            tick_label(v)
        );
        let g = 1.0 + (n as f64 - 1.0) * t as f64 / 5.0;
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{}" text-anchor="middle" fill="#333">{}</text>"##,
            x_of(g),
            y0 + 18.0,
            g.round()
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">generation</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">cumulative resource consumed</text>"#,
        TOP + plot_h / 2.0
    );

    let stride = n.div_ceil(MAX_POINTS).max(1);
    for (idx, line) in lines.iter().enumerate() {
        let colour = PALETTE[idx % PALETTE.len()];
        let mut points = String::new();
        let len = line.values.len();
        for (k, v) in line.values.iter().enumerate() {
            if k % stride == 0 || k + 1 == len {
                let _ = write!(points, "{:.2},{:.2} ", x_of(k as f64 + 1.0), y_of(*v));
            }
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.trim_end()
        );
        let ly = TOP + 10.0 + idx as f64 * 18.0;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx}" y="{}" width="14" height="4" fill="{colour}"/><text x="{}" y="{ly}" dominant-baseline="middle">{}</text>"#,
            ly - 2.0,
            lx + 20.0,
            escape(&line.label)
        );
    }

    if let Some(a) = threshold.filter(|a| a.is_finite()) {
        let y = y_of(a);
        let _ = writeln!(
            svg,
            r##"<line class="threshold" x1="{x0}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#000" stroke-width="1.5" stroke-dasharray="6 4"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end">availability</text>"#,
            LEFT + plot_w - 4.0,
            y - 6.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_svg_plot(
    lines: &[LineSeries],
    threshold: Option<f64>,
    title: &str,
    path: &Path,
) -> io::Result<PathBuf> {
    if lines.iter().all(|l| l.values.is_empty()) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "nothing to plot"));
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, render_svg(title, lines, threshold))?;
    Ok(path.to_path_buf())
}

//! Deterministic SVG line plots of sweep CSVs: log-scale rate axis, one
//! series per column. Text output keeps the plots diffable in tests.

use crate::sweep::Table;
use anyhow::{bail, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Plot specification.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    /// Columns to draw; empty means every column after the first.
    pub columns: Vec<String>,
    /// Plot title.
    pub title: String,
    /// Logarithmic x axis (chosen automatically when None: log when the
    /// abscissa spans more than two positive decades).
    pub log_x: Option<bool>,
}

struct Series<'a> {
    name: &'a str,
    points: Vec<(f64, f64)>,
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn axis_ticks_log(lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
    (a..=b).map(|e| 10f64.powi(e)).collect()
}

fn axis_ticks_lin(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let step = 10f64.powf(span.log10().floor());
    let step = if span / step < 3.0 { step / 2.0 } else { step };
    let mut ticks = Vec::new();
    let mut v = (lo / step).ceil() * step;
    while v <= hi + 1e-12 * span {
        ticks.push(v);
        v += step;
    }
    ticks
}

/// Renders the table as an SVG string. Series without positive finite
/// points are omitted from the axes but noted in the legend. Requesting a
/// column that does not exist is an error.
pub fn render(table: &Table, spec: &PlotSpec) -> Result<String> {
    if table.header.len() < 2 {
        bail!("table needs an abscissa and at least one value column");
    }
    let wanted: Vec<String> = if spec.columns.is_empty() {
        table.header[1..].to_vec()
    } else {
        spec.columns.clone()
    };
    let mut series = Vec::new();
    let mut silent: Vec<&str> = Vec::new();
    for name in &wanted {
        let Some(idx) = table.column(name) else {
            bail!("column '{name}' not found in CSV (header: {:?})", table.header);
        };
        let points: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter_map(|row| match (row[0], row[idx]) {
                (Some(x), Some(y)) if y > 0.0 && y.is_finite() && x.is_finite() => Some((x, y)),
                _ => None,
            })
            .collect();
        let name = &table.header[idx];
        if points.is_empty() {
            silent.push(name);
        } else {
            series.push(Series { name, points });
        }
    }

    let xs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .collect();
    let (x_lo, x_hi) = bounds(&xs);
    let (y_lo, y_hi) = bounds(&ys);
    let log_x = spec
        .log_x
        .unwrap_or(x_lo > 0.0 && x_hi / x_lo.max(f64::MIN_POSITIVE) > 100.0);

    let x_map = |x: f64| -> f64 {
        let (a, b) = if log_x {
            (x_lo.log10(), x_hi.log10())
        } else {
            (x_lo, x_hi)
        };
        let v = if log_x { x.log10() } else { x };
        let frac = if b > a { (v - a) / (b - a) } else { 0.5 };
        MARGIN_L + frac * (WIDTH - MARGIN_L - MARGIN_R)
    };
    let y_map = |y: f64| -> f64 {
        let (a, b) = (y_lo.log10(), y_hi.log10());
        let frac = if b > a { (y.log10() - a) / (b - a) } else { 0.5 };
        HEIGHT - MARGIN_B - frac * (HEIGHT - MARGIN_T - MARGIN_B)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        escape(&spec.title)
    ));
    // Frame.
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        fmt(MARGIN_L),
        fmt(MARGIN_T),
        fmt(WIDTH - MARGIN_L - MARGIN_R),
        fmt(HEIGHT - MARGIN_T - MARGIN_B)
    ));

    if !series.is_empty() {
        let x_ticks = if log_x {
            axis_ticks_log(x_lo, x_hi)
        } else {
            axis_ticks_lin(x_lo, x_hi)
        };
        for t in x_ticks.iter().filter(|&&t| t >= x_lo && t <= x_hi) {
            let x = x_map(*t);
            svg.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#cccccc\"/>\n",
                fmt(x),
                fmt(MARGIN_T),
                fmt(HEIGHT - MARGIN_B)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"middle\">{}</text>\n",
                fmt(x),
                fmt(HEIGHT - MARGIN_B + 16.0),
                tick_label(*t)
            ));
        }
        for t in axis_ticks_log(y_lo, y_hi)
            .iter()
            .filter(|&&t| t >= y_lo / 1.0001 && t <= y_hi * 1.0001)
        {
            let y = y_map(*t);
            svg.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#cccccc\"/>\n",
                fmt(MARGIN_L),
                fmt(WIDTH - MARGIN_R),
                fmt(y)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"end\">{}</text>\n",
                fmt(MARGIN_L - 6.0),
                fmt(y + 4.0),
                tick_label(*t)
            ));
        }
        for (i, s) in series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{},{}", fmt(x_map(x)), fmt(y_map(y))))
                .collect();
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                path.join(" ")
            ));
        }
    }

    // Legend, including series that had nothing to draw.
    let mut legend_y = MARGIN_T + 14.0;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            fmt(WIDTH - MARGIN_R + 10.0),
            fmt(WIDTH - MARGIN_R + 34.0),
            fmt(legend_y - 4.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            fmt(WIDTH - MARGIN_R + 40.0),
            fmt(legend_y),
            escape(s.name)
        ));
        legend_y += 18.0;
    }
    for name in silent {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"#888888\">{} (no data)</text>\n",
            fmt(WIDTH - MARGIN_R + 40.0),
            fmt(legend_y),
            escape(name)
        ));
        legend_y += 18.0;
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(vs: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vs {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (1.0, 10.0)
    } else if lo == hi {
        (lo * 0.5, hi * 2.0)
    } else {
        (lo, hi)
    }
}

fn tick_label(v: f64) -> String {
    let e = v.log10();
    if (e - e.round()).abs() < 1e-9 && e.abs() >= 3.0 {
        format!("1e{}", e.round() as i64)
    } else if (0.001..10000.0).contains(&v) {
        let s = format!("{v}");
        s
    } else {
        format!("{v:e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

//! Minimal SVG line charts from the CSV tables this tool writes.
//!
//! Output is a standalone SVG 1.1 document on a fixed 800x600 view box.
//! Coordinates are printed with two decimals so identical input gives
//! identical bytes.

use std::fmt::Write as _;

use crate::config::RunConfig;
use crate::error::{config_err, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: String,
    pub y: String,
    pub group: Option<String>,
    pub log_x: bool,
    pub log_y: bool,
    pub title: Option<String>,
}

impl PlotSpec {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let need = |k: &str| {
            cfg.raw(k)
                .map(str::to_string)
                .ok_or_else(|| config_err(format!("missing required key `{k}`")))
        };
        Ok(Self {
            x: need("plot.x")?,
            y: need("plot.y")?,
            group: cfg.raw("plot.group").map(str::to_string),
            log_x: cfg.bool_or("plot.log_x", false)?,
            log_y: cfg.bool_or("plot.log_y", false)?,
            title: cfg.raw("plot.title").map(str::to_string),
        })
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            let v = if log { v.log10() } else { v };
            (a.min(v), b.max(v))
        });
        if log {
            lo = lo.floor();
            hi = hi.ceil();
        }
        if hi - lo <= 0.0 {
            let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
            lo -= pad;
            hi += pad;
        }
        Self { lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions (data units) and labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo as i32, self.hi as i32);
            let stride = ((b - a) / 8 + 1).max(1);
            return (a..=b)
                .filter(|p| (p - a) % stride == 0)
                .map(|p| (10f64.powi(p), format!("1e{p}")))
                .collect();
        }
        let raw = (self.hi - self.lo) / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last)
            .map(|i| {
                let v = i as f64 * step;
                let label = format!("{v:.decimals$}");
                (v, if label == "-0" { "0".to_string() } else { label })
            })
            .collect()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| config_err(format!("unknown column `{name}`")))
}

fn read_series(csv_text: &str, spec: &PlotSpec) -> Result<Vec<Series>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(csv_text.as_bytes());
    let headers = rdr.headers()?.clone();
    let xi = column(&headers, &spec.x)?;
    let yi = column(&headers, &spec.y)?;
    let gi = spec.group.as_deref().map(|g| column(&headers, g)).transpose()?;

    let mut series: Vec<Series> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let key = gi.map(|i| rec[i].to_string()).unwrap_or_default();
        let idx = match series.iter().position(|s| s.label == key) {
            Some(i) => i,
            None => {
                series.push(Series { label: key, points: Vec::new() });
                series.len() - 1
            }
        };
        let (Ok(x), Ok(y)) = (rec[xi].parse::<f64>(), rec[yi].parse::<f64>()) else {
            continue;
        };
        let usable = x.is_finite() && y.is_finite() && (!spec.log_x || x > 0.0) && (!spec.log_y || y > 0.0);
        if usable {
            series[idx].points.push((x, y));
        }
    }
    if series.is_empty() {
        return Err(config_err("no data rows to plot"));
    }
    if let Some(empty) = series.iter().find(|s| s.points.is_empty()) {
        return Err(match &spec.group {
            Some(g) => config_err(format!("group {g} = {} has no plottable points", empty.label)),
            None => config_err("no plottable points"),
        });
    }
    Ok(series)
}

/// Renders the chart for a CSV table.
pub fn render(csv_text: &str, spec: &PlotSpec) -> Result<String> {
    let series = read_series(csv_text, spec)?;
    let all = || series.iter().flat_map(|s| s.points.iter());
    let ax = Axis::new(all().map(|p| p.0), spec.log_x);
    let ay = Axis::new(all().map(|p| p.1), spec.log_y);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + pw * ax.frac(x);
    let py = |y: f64| TOP + ph * (1.0 - ay.frac(y));

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    if let Some(t) = &spec.title {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
            LEFT + pw / 2.0,
            escape(t)
        );
    }

    // grid and ticks
    for (v, label) in ax.ticks() {
        let x = px(v);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{TOP:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#e0e0e0\"/>",
            TOP + ph
        );
        let _ = writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            TOP + ph + 18.0,
            escape(&label)
        );
    }
    for (v, label) in ay.ticks() {
        let y = py(v);
        let _ = writeln!(
            s,
            "<line x1=\"{LEFT:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\"/>",
            LEFT + pw
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            LEFT - 6.0,
            y + 4.0,
            escape(&label)
        );
    }
    let _ = writeln!(
        s,
        "<rect x=\"{LEFT:.2}\" y=\"{TOP:.2}\" width=\"{pw:.2}\" height=\"{ph:.2}\" fill=\"none\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        LEFT + pw / 2.0,
        HEIGHT - 20.0,
        escape(&spec.x)
    );
    let _ = writeln!(
        s,
        "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">{}</text>",
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&spec.y)
    );

    for (i, ser) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.join(" ")
        );
        if let Some(g) = &spec.group {
            let ly = TOP + 10.0 + 20.0 * i as f64;
            let lx = LEFT + pw + 15.0;
            let _ = writeln!(
                s,
                "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{colour}\" stroke-width=\"2\"/>",
                lx + 20.0
            );
            let _ = writeln!(
                s,
                "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
                lx + 26.0,
                ly + 4.0,
                escape(&format!("{g} = {}", ser.label))
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

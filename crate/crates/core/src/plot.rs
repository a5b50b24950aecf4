//! Static SVG line charts of training curves.

use std::fmt::Write as _;

use crate::metrics::EpochMetrics;
use crate::{Error, Result};

const WIDTH: f64 = 760.0;
const PANEL_H: f64 = 360.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Splits each file's rows into one series per (algo, sigma0, seed).
pub fn series_from_metrics(files: &[Vec<EpochMetrics>], value: impl Fn(&EpochMetrics) -> f64) -> Result<Vec<Series>> {
    if files.is_empty() {
        return Err(Error::Usage("no metrics files to plot".into()));
    }
    let mut out = Vec::new();
    for (i, rows) in files.iter().enumerate() {
        if rows.is_empty() {
            return Err(Error::Other(format!("metrics file #{} has no rows", i + 1)));
        }
        let mut keys: Vec<(String, String, u64)> = Vec::new();
        for r in rows {
            let k = (r.algo.clone(), r.sigma0.to_string(), r.seed);
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        let multi_seed = keys.iter().any(|k| k.2 != keys[0].2);
        for (algo, sigma, seed) in &keys {
            let mut label = format!("{algo} sigma0={sigma}");
            if multi_seed {
                let _ = write!(label, " seed={seed}");
            }
            let points = rows
                .iter()
                .filter(|r| &r.algo == algo && &r.sigma0.to_string() == sigma && r.seed == *seed)
                .map(|r| (r.epoch as f64, value(r)))
                .collect();
            out.push(Series { label, points });
        }
    }
    Ok(out)
}

/// Round tick step covering `span` with about `target` intervals.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let (lo, hi) = if hi - lo < 1e-12 {
        let pad = if lo.abs() > 1.0 { lo.abs() * 0.01 } else { 1.0 };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    };
    let step = tick_step(hi - lo, 6.0);
    let start = (lo / step).floor() * step;
    let end = (hi / step).ceil() * step;
    let n = ((end - start) / step).round() as usize;
    (start, end, (0..=n).map(|i| start + i as f64 * step).collect())
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn panel(svg: &mut String, series: &[Series], y_label: &str, y0: f64) {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let (xlo, xhi, xt) = ticks(xmin, xmax);
    let (ylo, yhi, yt) = ticks(ymin, ymax);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = PANEL_H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - xlo) / (xhi - xlo) * pw;
    let sy = |y: f64| y0 + TOP + ph - (y - ylo) / (yhi - ylo) * ph;

    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{:.2}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##,
        y0 + TOP
    );
    for &x in &xt {
        let px = sx(x);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#333"/><text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"##,
            y0 + TOP + ph,
            y0 + TOP + ph + 5.0,
            y0 + TOP + ph + 18.0,
            fmt_tick(x)
        );
    }
    for &y in &yt {
        let py = sy(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="#333"/><line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT + pw,
            LEFT - 8.0,
            py + 4.0,
            fmt_tick(y)
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">epoch</text>"##,
        LEFT + pw / 2.0,
        y0 + PANEL_H - 10.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="18" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 18 {:.2})">{y_label}</text>"##,
        y0 + TOP + ph / 2.0,
        y0 + TOP + ph / 2.0
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"##,
            pts.join(" ")
        );
        let ly = y0 + TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"##,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders one panel per `(series, y label)` pair, stacked vertically.
pub fn render_svg(panels: &[(Vec<Series>, &str)]) -> Result<String> {
    if panels.is_empty() || panels.iter().any(|(s, _)| s.is_empty() || s.iter().any(|x| x.points.is_empty())) {
        return Err(Error::Other("nothing to plot".into()));
    }
    let height = PANEL_H * panels.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, (series, label)) in panels.iter().enumerate() {
        panel(&mut svg, series, label, PANEL_H * i as f64);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Reward curves, plus mean action curves underneath when asked.
pub fn plot_metrics(files: &[Vec<EpochMetrics>], with_action: bool) -> Result<String> {
    let reward = series_from_metrics(files, |r| r.epoch_reward)?;
    let mut panels = vec![(reward, "epoch reward")];
    if with_action {
        panels.push((series_from_metrics(files, |r| r.mean_action)?, "mean action"));
    }
    render_svg(&panels)
}

//! Line charts of sweep results as standalone SVG.
//!
//! Output depends only on the input values: no timestamps, no generated ids,
//! fixed number formatting and series order.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::simulation::{SweepPoint, SweepResult};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Mean payout per step.
    Payout,
    /// Repair frequency.
    Action,
}

impl PlotKind {
    fn value(self, p: &SweepPoint) -> f64 {
        match self {
            PlotKind::Payout => p.mean_payout.mean,
            PlotKind::Action => p.repair_freq.mean,
        }
    }

    fn axis_label(self) -> &'static str {
        match self {
            PlotKind::Payout => "mean payout",
            PlotKind::Action => "probability of repairing",
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            PlotKind::Payout => "payout",
            PlotKind::Action => "action",
        }
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "payout" => Ok(PlotKind::Payout),
            "action" => Ok(PlotKind::Action),
            other => Err(Error::config(format!("unknown plot kind '{other}' (expected payout or action)"))),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

struct Scale {
    lo: f64,
    hi: f64,
    out_lo: f64,
    out_hi: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        self.out_lo + (v - self.lo) / (self.hi - self.lo) * (self.out_hi - self.out_lo)
    }
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

pub fn render_svg_string(result: &SweepResult, kind: PlotKind) -> Result<String> {
    if result.is_empty() {
        return Err(Error::invalid("cannot plot an empty result"));
    }

    let (x_lo, x_hi) = {
        let (lo, hi) = result
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.probability), hi.max(p.probability)));
        if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) }
    };
    let (y_lo, y_hi) = match kind {
        PlotKind::Action => (0.0, 1.0),
        PlotKind::Payout => padded_range(result.points.iter().map(|p| kind.value(p))),
    };
    let xs = Scale { lo: x_lo, hi: x_hi, out_lo: LEFT, out_hi: WIDTH - RIGHT };
    let ys = Scale { lo: y_lo, hi: y_hi, out_lo: HEIGHT - BOTTOM, out_hi: TOP };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{} ({})</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(&result.experiment),
        kind.id()
    );

    // axes
    let (px0, px1, py0, py1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1" fill="none">"#);
    let _ = writeln!(s, r#"<line x1="{px0:.2}" y1="{py0:.2}" x2="{px1:.2}" y2="{py0:.2}"/>"#);
    let _ = writeln!(s, r#"<line x1="{px0:.2}" y1="{py0:.2}" x2="{px0:.2}" y2="{py1:.2}"/>"#);
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g stroke="#cccccc" stroke-width="0.5">"##);
    for i in 0..=TICKS {
        let x = xs.map(x_lo + (x_hi - x_lo) * i as f64 / TICKS as f64);
        let y = ys.map(y_lo + (y_hi - y_lo) * i as f64 / TICKS as f64);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{py0:.2}" x2="{x:.2}" y2="{py1:.2}"/>"#);
        let _ = writeln!(s, r#"<line x1="{px0:.2}" y1="{y:.2}" x2="{px1:.2}" y2="{y:.2}"/>"#);
    }
    let _ = writeln!(s, "</g>");

    for i in 0..=TICKS {
        let xv = x_lo + (x_hi - x_lo) * i as f64 / TICKS as f64;
        let yv = y_lo + (y_hi - y_lo) * i as f64 / TICKS as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            xs.map(xv),
            py0 + 18.0,
            tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            px0 - 6.0,
            ys.map(yv) + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">probability</text>"#,
        (px0 + px1) / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (py0 + py1) / 2.0,
        (py0 + py1) / 2.0,
        kind.axis_label()
    );

    for (i, label) in result.series_labels().into_iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts: Vec<&SweepPoint> = result.series(label).collect();
        pts.sort_by(|a, b| a.probability.total_cmp(&b.probability));
        let coords: Vec<(f64, f64)> = pts.iter().map(|p| (xs.map(p.probability), ys.map(kind.value(p)))).collect();

        let _ = writeln!(s, r#"<g class="series" data-agent="{}">"#, escape(label));
        if coords.len() > 1 {
            let path: Vec<String> = coords.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                path.join(" ")
            );
        }
        for (x, y) in &coords {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(label)
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_svg(result: &SweepResult, kind: PlotKind, path: &Path) -> Result<()> {
    let text = render_svg_string(result, kind)?;
    std::fs::write(path, text).map_err(|e| Error::io(format!("cannot write {}", path.display()), e))
}

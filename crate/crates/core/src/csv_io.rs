//! Sweep results as CSV.
//!
//! One row per (agent, grid point, metric), sorted by agent, probability and
//! metric, with the header
//!
//! ```text
//! experiment,agent,probability,metric,value,stderr,runs,steps,window,seed
//! ```
//!
//! Floating-point fields carry 9 significant digits. Lines end with LF.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::simulation::{Stat, SweepPoint, SweepResult};

pub const HEADER: [&str; 10] = [
    "experiment",
    "agent",
    "probability",
    "metric",
    "value",
    "stderr",
    "runs",
    "steps",
    "window",
    "seed",
];

pub const METRIC_MEAN_PAYOUT: &str = "mean_payout";
pub const METRIC_REPAIR_FREQ: &str = "repair_freq";

/// Formats `x` with 9 significant digits, like C's `%.9g`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn to_csv_string(result: &SweepResult) -> Result<String> {
    let mut rows: Vec<(&SweepPoint, &str, Stat)> = result
        .points
        .iter()
        .flat_map(|p| [(p, METRIC_MEAN_PAYOUT, p.mean_payout), (p, METRIC_REPAIR_FREQ, p.repair_freq)])
        .collect();
    rows.sort_by(|a, b| {
        a.0.agent
            .cmp(&b.0.agent)
            .then(a.0.probability.total_cmp(&b.0.probability))
            .then(a.1.cmp(b.1))
    });

    let mut w = ::csv::WriterBuilder::new()
        .terminator(::csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let to_err = |e: ::csv::Error| Error::config(format!("csv: {e}"));
    w.write_record(HEADER).map_err(to_err)?;
    let window = format_sig9(result.window);
    let steps = result.steps.to_string();
    let seed = result.seed.to_string();
    for (p, metric, stat) in rows {
        w.write_record([
            result.experiment.as_str(),
            &p.agent,
            &format_sig9(p.probability),
            metric,
            &format_sig9(stat.mean),
            &format_sig9(stat.stderr),
            &p.runs.to_string(),
            &steps,
            &window,
            &seed,
        ])
        .map_err(to_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::config(format!("csv: {}", e.error())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let text = to_csv_string(result)?;
    std::fs::write(path, text).map_err(|e| Error::io(format!("cannot write {}", path.display()), e))
}

/// Rebuilds a [`SweepResult`] from CSV text. Points come back sorted by agent
/// and probability.
pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut reader = ::csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header '{}'", header.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut experiment = String::new();
    let mut steps = 0;
    let mut window = 1.0;
    let mut seed = 0;
    let mut points: BTreeMap<(String, u64), SweepPoint> = BTreeMap::new();

    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        let field = |k: usize| record.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64> {
            field(k).parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad {} '{}'", HEADER[k], field(k)),
            })
        };
        let int = |k: usize| -> Result<u64> {
            field(k).parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad {} '{}'", HEADER[k], field(k)),
            })
        };

        experiment = field(0).to_string();
        let probability = num(2)?;
        let stat = Stat {
            mean: num(4)?,
            stderr: num(5)?,
        };
        let runs = int(6)? as usize;
        steps = int(7)?;
        window = num(8)?;
        seed = int(9)?;

        let point = points
            .entry((field(1).to_string(), probability.to_bits()))
            .or_insert_with(|| SweepPoint {
                agent: field(1).to_string(),
                probability,
                mean_payout: Stat { mean: f64::NAN, stderr: f64::NAN },
                repair_freq: Stat { mean: f64::NAN, stderr: f64::NAN },
                runs,
            });
        match field(3) {
            METRIC_MEAN_PAYOUT => point.mean_payout = stat,
            METRIC_REPAIR_FREQ => point.repair_freq = stat,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown metric '{other}'"),
                })
            }
        }
    }

    let mut points: Vec<SweepPoint> = points.into_values().collect();
    points.sort_by(|a, b| a.agent.cmp(&b.agent).then(a.probability.total_cmp(&b.probability)));
    Ok(SweepResult {
        experiment,
        steps,
        window,
        seed,
        points,
    })
}

//! Long-format plot data: one `series,x,y` row per point.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// Measured flow curves, both branches, per mix and w/s.
    FlowCurve,
    /// Strength against age per sample.
    StrengthDev,
    /// Smoothed dm/dT per mix and age.
    Dtg,
}

impl PlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::FlowCurve => "flow_curve",
            PlotKind::StrengthDev => "strength_dev",
            PlotKind::Dtg => "dtg",
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flow_curve" => Ok(PlotKind::FlowCurve),
            "strength_dev" => Ok(PlotKind::StrengthDev),
            "dtg" => Ok(PlotKind::Dtg),
            other => Err(format!("unknown plot kind `{other}`")),
        }
    }
}

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("report has no {0} data")]
    MissingSection(PlotKind),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub series: String,
    pub x: f64,
    pub y: f64,
}

/// Flow-curve series are named `<mix>/ws<w/s>/<branch>`, DTG series
/// `<mix>/<age>d`, strength series by sample id.
pub fn emit_plot_data(report: &Report, kind: PlotKind) -> Result<Vec<PlotRow>, PlotError> {
    let mut rows = Vec::new();
    let mut push = |series: &str, pts: &mut dyn Iterator<Item = (f64, f64)>| {
        rows.extend(pts.map(|(x, y)| PlotRow {
            series: series.to_string(),
            x,
            y,
        }))
    };
    match kind {
        PlotKind::FlowCurve => {
            for m in &report.mixes {
                for r in &m.rheology {
                    for (branch, pts) in [("up", &r.up), ("down", &r.down)] {
                        push(&format!("{}/ws{}/{branch}", m.id, r.w_s), &mut pts.iter().copied());
                    }
                }
            }
        }
        PlotKind::StrengthDev => {
            for s in report.strength.iter().flat_map(|s| &s.series) {
                push(&s.sample_id, &mut s.points.iter().map(|&(a, v)| (a as f64, v)));
            }
        }
        PlotKind::Dtg => {
            for m in &report.mixes {
                for t in &m.thermal {
                    if let Some(d) = &t.dtg {
                        push(
                            &format!("{}/{}d", m.id, t.age_days),
                            &mut d.curve.iter().map(|p| (p.temperature_c, p.rate)),
                        );
                    }
                }
            }
        }
    }
    if rows.is_empty() {
        return Err(PlotError::MissingSection(kind));
    }
    Ok(rows)
}

/// Writes rows at full precision so re-reading reproduces them exactly.
pub fn write_plot_csv<W: Write>(w: W, rows: &[PlotRow]) -> Result<(), PlotError> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_plot_csv<R: std::io::Read>(r: R) -> Result<Vec<PlotRow>, PlotError> {
    let mut rdr = csv::Reader::from_reader(r);
    let rows = rdr.deserialize().collect::<Result<Vec<PlotRow>, _>>()?;
    Ok(rows)
}

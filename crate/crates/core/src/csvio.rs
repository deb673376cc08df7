//! CSV readers and writers for lab data files.
//!
//! | file        | header                                                   |
//! |-------------|----------------------------------------------------------|
//! | flow curve  | `shear_rate_per_s,shear_stress_pa,hold_time_s,branch`    |
//! | thermogram  | `temperature_c,mass_ug`                                  |
//! | EDS         | `sample_id,age_days,C,O,Na,Mg,Al,Si,Ca,Mn,Fe,n_points`   |
//! | strength    | `sample_id,age_days,strength_mpa`                        |
//! | mix table   | `mix_type,mix_id,sf_pct,ggbfs_pct,naoh_pct,hl_pct,sa_pct,w_s` |

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::microanalysis::{EdsComposition, MicroError, StrengthRecord};
use crate::mixdesign::{MixDesign, MixMode};
use crate::rheology::{Branch, FlowCurve, FlowPoint, RheoError};
use crate::thermo::{ThermoError, ThermoSample, Thermogram};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("file has no data rows")]
    Empty,
    #[error(transparent)]
    Rheology(#[from] RheoError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Micro(#[from] MicroError),
}

fn check_headers<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&'static str]) -> Result<(), CsvError> {
    let headers = rdr.headers()?.clone();
    for &col in expected {
        if !headers.iter().any(|h| h.trim() == col) {
            return Err(CsvError::MissingColumn(col));
        }
    }
    Ok(())
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r)
}

#[derive(Debug, Serialize, Deserialize)]
struct FlowRow {
    shear_rate_per_s: f64,
    shear_stress_pa: f64,
    hold_time_s: f64,
    branch: Branch,
}

/// One rheometer run: either branch may be missing from the file.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun {
    pub up: Option<FlowCurve>,
    pub down: Option<FlowCurve>,
}

pub fn read_flow_csv<R: Read>(r: R) -> Result<FlowRun, CsvError> {
    let mut rdr = reader(r);
    check_headers(
        &mut rdr,
        &["shear_rate_per_s", "shear_stress_pa", "hold_time_s", "branch"],
    )?;
    let (mut up, mut down) = (Vec::new(), Vec::new());
    for row in rdr.deserialize::<FlowRow>() {
        let row = row?;
        let p = FlowPoint::new(row.shear_rate_per_s, row.shear_stress_pa, row.hold_time_s);
        match row.branch {
            Branch::Up => up.push(p),
            Branch::Down => down.push(p),
        }
    }
    if up.is_empty() && down.is_empty() {
        return Err(CsvError::Empty);
    }
    let build = |pts: Vec<FlowPoint>, b| -> Result<Option<FlowCurve>, CsvError> {
        if pts.is_empty() {
            Ok(None)
        } else {
            Ok(Some(FlowCurve::new(pts, b)?))
        }
    };
    Ok(FlowRun {
        up: build(up, Branch::Up)?,
        down: build(down, Branch::Down)?,
    })
}

pub fn write_flow_csv<W: Write>(w: W, curves: &[&FlowCurve]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    for c in curves {
        for p in c.points() {
            wtr.serialize(FlowRow {
                shear_rate_per_s: p.shear_rate,
                shear_stress_pa: p.shear_stress,
                hold_time_s: p.hold_time,
                branch: c.branch(),
            })?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct ThermoRow {
    temperature_c: f64,
    mass_ug: f64,
}

pub fn read_thermogram_csv<R: Read>(r: R, sample_id: &str) -> Result<Thermogram, CsvError> {
    let mut rdr = reader(r);
    check_headers(&mut rdr, &["temperature_c", "mass_ug"])?;
    let samples = rdr
        .deserialize::<ThermoRow>()
        .map(|row| {
            row.map(|r| ThermoSample {
                temperature_c: r.temperature_c,
                mass_ug: r.mass_ug,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if samples.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(Thermogram::new(sample_id, samples)?)
}

pub fn write_thermogram_csv<W: Write>(w: W, gram: &Thermogram) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    for s in gram.samples() {
        wtr.serialize(ThermoRow {
            temperature_c: s.temperature_c,
            mass_ug: s.mass_ug,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
#[allow(non_snake_case)]
struct EdsRow {
    sample_id: String,
    age_days: u32,
    C: f64,
    O: f64,
    Na: f64,
    Mg: f64,
    Al: f64,
    Si: f64,
    Ca: f64,
    Mn: f64,
    Fe: f64,
    n_points: u32,
}

pub fn read_eds_csv<R: Read>(r: R) -> Result<Vec<EdsComposition>, CsvError> {
    let mut rdr = reader(r);
    check_headers(
        &mut rdr,
        &["sample_id", "age_days", "C", "O", "Na", "Mg", "Al", "Si", "Ca", "Mn", "Fe", "n_points"],
    )?;
    let mut out = Vec::new();
    for row in rdr.deserialize::<EdsRow>() {
        let r = row?;
        out.push(EdsComposition::from_array(
            r.sample_id,
            r.age_days,
            [r.C, r.O, r.Na, r.Mg, r.Al, r.Si, r.Ca, r.Mn, r.Fe],
            r.n_points,
        )?);
    }
    if out.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(out)
}

#[derive(Debug, Deserialize)]
struct StrengthRow {
    sample_id: String,
    age_days: u32,
    strength_mpa: f64,
}

pub fn read_strength_csv<R: Read>(r: R) -> Result<Vec<StrengthRecord>, CsvError> {
    let mut rdr = reader(r);
    check_headers(&mut rdr, &["sample_id", "age_days", "strength_mpa"])?;
    let mut out = Vec::new();
    for row in rdr.deserialize::<StrengthRow>() {
        let r = row?;
        out.push(StrengthRecord::new(r.sample_id, r.age_days, r.strength_mpa)?);
    }
    if out.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct MixRow<'a> {
    mix_type: &'a str,
    mix_id: &'a str,
    sf_pct: f64,
    ggbfs_pct: f64,
    naoh_pct: f64,
    hl_pct: Option<f64>,
    sa_pct: Option<f64>,
    w_s: f64,
}

/// Writes a mix table. Control mixes leave the HL and SA cells empty.
pub fn write_mix_table_csv<W: Write>(w: W, designs: &[MixDesign]) -> Result<(), CsvError> {
    let mut wtr = csv::Writer::from_writer(w);
    for d in designs {
        let solid = d.mode != MixMode::ControlNaohSolution;
        wtr.serialize(MixRow {
            mix_type: d.mode.label(),
            mix_id: &d.id,
            sf_pct: d.sf_frac,
            ggbfs_pct: d.ggbfs_frac,
            naoh_pct: d.target_naoh,
            hl_pct: solid.then_some(d.hl_dosage),
            sa_pct: solid.then_some(d.sa_dosage),
            w_s: d.w_s,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

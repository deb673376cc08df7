use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use slagbind::csvio::{read_eds_csv, read_flow_csv, read_strength_csv, read_thermogram_csv};
use slagbind::microanalysis::{development_curve, molar_ratio, ratio_delta, strength_increment, RatioPair};
use slagbind::mixdesign::activator_cost;
use slagbind::rheology::{
    fit_bingham, fit_herschel_bulkley, fit_modified_bingham, hysteresis_area, validate_protocol,
    HysteresisResult, ProtocolVerdict, ShearProtocol,
};
use slagbind::thermo::{
    anhydrous_ldca, bound_water_report, dtg_curve, dtg_peaks, free_hydroxides, mix_ldca,
    segment_losses, DtgPeak, DtgPoint, Interpretation, MhVariant, SchemeName, DEFAULT_DTG_WINDOW,
};
use slagbind::{
    BoundWaterReport, CostBreakdown, EdsComposition, HydroxideReport, LoiContext,
    MassLossProfile, MixDesign, Registry, RheoFit, SegmentationScheme, StrengthRecord,
    StrengthSeries,
};

use crate::project::{DataFile, FlowBinding, MixBinding, Project, ThermogramBinding};

pub const TOOL_NAME: &str = "slagbind";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Ratios reported for every EDS row.
pub const DEFAULT_RATIOS: [&str; 6] = ["Ca/Si", "Al/Si", "Na/Al", "Na/Ca", "Mg/Al", "Mg/Ca"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// An analysis that could not be completed. The rest of the report stands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionFailure {
    pub section: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RheologySection {
    pub w_s: f64,
    pub source: String,
    /// Modified Bingham, Bingham and Herschel–Bulkley on the down branch.
    pub fits: Vec<RheoFit>,
    pub hysteresis: Option<HysteresisResult>,
    pub protocol: Option<ProtocolVerdict>,
    /// `(shear rate, shear stress)` as measured.
    pub up: Vec<(f64, f64)>,
    pub down: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DtgSection {
    pub window: f64,
    pub curve: Vec<DtgPoint>,
    pub peaks: Vec<DtgPeak>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalSection {
    pub age_days: u32,
    pub source: String,
    pub profile: MassLossProfile,
    pub bound_water: BoundWaterReport,
    pub hydroxides: Option<HydroxideReport>,
    pub dtg: Option<DtgSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixSection {
    pub id: String,
    pub design: MixDesign,
    pub cost: Option<CostBreakdown>,
    pub rheology: Vec<RheologySection>,
    pub thermal: Vec<ThermalSection>,
    pub failures: Vec<SectionFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdsRow {
    pub sample_id: String,
    pub age_days: u32,
    /// `None` where the denominator element is absent.
    pub ratios: BTreeMap<String, Option<f64>>,
}

/// Percent change of each ratio between two ages of one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdsDelta {
    pub sample_id: String,
    pub from_days: u32,
    pub to_days: u32,
    pub change_pct: BTreeMap<String, Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdsSection {
    pub source: String,
    pub rows: Vec<EdsRow>,
    pub deltas: Vec<EdsDelta>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthIncrement {
    pub sample_id: String,
    pub strength_28: f64,
    pub strength_120: f64,
    pub increment_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthSection {
    pub source: String,
    pub series: Vec<StrengthSeries>,
    pub increments: Vec<StrengthIncrement>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub project: String,
    pub inputs: Vec<InputDigest>,
    pub mixes: Vec<MixSection>,
    pub eds: Option<EdsSection>,
    pub strength: Option<StrengthSection>,
    pub failures: Vec<SectionFailure>,
}

impl Report {
    pub fn has_failures(&self) -> bool {
        !self.failures.is_empty() || self.mixes.iter().any(|m| !m.failures.is_empty())
    }

    pub fn mix(&self, id: &str) -> Option<&MixSection> {
        self.mixes.iter().find(|m| m.id == id)
    }
}

fn digest(file: &DataFile) -> InputDigest {
    let sha256 = match fs::read(&file.path) {
        Ok(bytes) => hex::encode(Sha256::digest(&bytes)),
        Err(e) => format!("unreadable: {e}"),
    };
    InputDigest {
        path: file.label.clone(),
        sha256,
    }
}

fn open(path: &Path) -> Result<BufReader<File>, String> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs every bound analysis. Failures land in the section they belong to;
/// only an invalid project stops the run, and that happens at load time.
pub fn run_project(project: &Project) -> Report {
    let mixes = std::thread::scope(|scope| {
        let handles: Vec<_> = project
            .mixes
            .iter()
            .map(|design| scope.spawn(move || analyze_mix(project, design)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("mix analysis panicked"))
            .collect::<Vec<_>>()
    });

    let mut failures = Vec::new();
    let eds = project.eds.as_ref().and_then(|f| {
        eds_section(f)
            .map_err(|message| {
                failures.push(SectionFailure {
                    section: "eds".into(),
                    message,
                })
            })
            .ok()
    });
    let strength = project.strength.as_ref().and_then(|f| {
        strength_section(f)
            .map_err(|message| {
                failures.push(SectionFailure {
                    section: "strength".into(),
                    message,
                })
            })
            .ok()
    });

    Report {
        tool: ToolInfo {
            name: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
        },
        project: project.name.clone(),
        inputs: project.inputs().into_iter().map(digest).collect(),
        mixes,
        eds,
        strength,
        failures,
    }
}

fn analyze_mix(project: &Project, design: &MixDesign) -> MixSection {
    let mut failures = Vec::new();
    let mut fail = |section: String, message: String| failures.push(SectionFailure { section, message });

    let cost = project.binder_kg.and_then(|kg| {
        activator_cost(design, &project.registry, kg)
            .map_err(|e| fail("cost".into(), e.to_string()))
            .ok()
    });

    let mut rheology = Vec::new();
    let mut thermal = Vec::new();
    if let Some(binding) = project.binding(&design.id) {
        for fb in &binding.flow_curves {
            match rheology_section(fb) {
                Ok(s) => rheology.push(s),
                Err(e) => fail(format!("rheology w/s {}", fb.w_s), e),
            }
        }
        for tb in &binding.thermograms {
            match thermal_section(&project.registry, design, binding, tb) {
                Ok((s, notes)) => {
                    for (section, message) in notes {
                        fail(format!("{section} {} d", tb.age_days), message);
                    }
                    thermal.push(s);
                }
                Err(e) => fail(format!("thermal {} d", tb.age_days), e),
            }
        }
    }

    MixSection {
        id: design.id.clone(),
        design: design.clone(),
        cost,
        rheology,
        thermal,
        failures,
    }
}

pub fn rheology_section(fb: &FlowBinding) -> Result<RheologySection, String> {
    let run = read_flow_csv(open(&fb.file.path)?).map_err(|e| format!("{}: {e}", fb.file.label))?;
    let pairs = |c: &Option<slagbind::FlowCurve>| -> Vec<(f64, f64)> {
        c.iter()
            .flat_map(|c| c.points().iter().map(|p| (p.shear_rate, p.shear_stress)))
            .collect()
    };
    let down = run
        .down
        .as_ref()
        .ok_or_else(|| format!("{}: no down-branch points to fit", fb.file.label))?;
    let mut fits = Vec::new();
    for f in [fit_modified_bingham, fit_bingham, fit_herschel_bulkley] {
        fits.push(f(down).map_err(|e| e.to_string())?);
    }
    let hysteresis = match &run.up {
        Some(up) => Some(hysteresis_area(up, down).map_err(|e| e.to_string())?),
        None => None,
    };
    let protocol = validate_protocol(run.up.as_ref(), run.down.as_ref(), &ShearProtocol::default()).ok();
    Ok(RheologySection {
        w_s: fb.w_s,
        source: fb.file.label.clone(),
        fits,
        hysteresis,
        protocol,
        up: pairs(&run.up),
        down: pairs(&run.down),
    })
}

/// Blend `Ldc_a` from the registry's anhydrous references.
pub fn registry_ldc_a(registry: &Registry, design: &MixDesign) -> Result<f64, String> {
    let ldca: BTreeMap<String, f64> = registry
        .iter()
        .filter_map(|m| m.anhydrous_ref.map(|r| (m.id.clone(), anhydrous_ldca(&r))))
        .collect();
    mix_ldca(&design.material_parts(), &ldca).map_err(|e| e.to_string())
}

type Notes = Vec<(&'static str, String)>;

fn thermal_section(
    registry: &Registry,
    design: &MixDesign,
    binding: &MixBinding,
    tb: &ThermogramBinding,
) -> Result<(ThermalSection, Notes), String> {
    let label = &tb.file.label;
    let gram = read_thermogram_csv(open(&tb.file.path)?, &design.id).map_err(|e| format!("{label}: {e}"))?;
    let profile = segment_losses(&gram, &SegmentationScheme::standard(binding.scheme))
        .map_err(|e| format!("{label}: {e}"))?;
    let ldc_a = match binding.ldc_a {
        Some(v) => v,
        None => registry_ldc_a(registry, design)?,
    };
    let mut notes = Notes::new();
    let loi = LoiContext::from_design(design, registry, Interpretation::CALIBRATED)
        .map_err(|e| notes.push(("bound water", e.to_string())))
        .ok();
    let bound_water = bound_water_report(&profile, ldc_a, loi.as_ref());
    let hydroxides = if binding.scheme == SchemeName::PresentStudy {
        free_hydroxides(&profile, ldc_a, binding.calcite_fraction, MhVariant::TotalLdx)
            .map_err(|e| notes.push(("hydroxides", e.to_string())))
            .ok()
    } else {
        None
    };
    let dtg = dtg_curve(&gram, DEFAULT_DTG_WINDOW)
        .and_then(|curve| {
            Ok(DtgSection {
                window: DEFAULT_DTG_WINDOW,
                peaks: dtg_peaks(&gram, DEFAULT_DTG_WINDOW)?,
                curve,
            })
        })
        .map_err(|e| notes.push(("dtg", e.to_string())))
        .ok();
    Ok((
        ThermalSection {
            age_days: tb.age_days,
            source: label.clone(),
            profile,
            bound_water,
            hydroxides,
            dtg,
        },
        notes,
    ))
}

pub fn eds_rows(comps: &[EdsComposition], pairs: &[RatioPair]) -> Vec<EdsRow> {
    let mut rows: Vec<EdsRow> = comps
        .iter()
        .map(|c| EdsRow {
            sample_id: c.sample_id().to_string(),
            age_days: c.age_days(),
            ratios: pairs
                .iter()
                .map(|p| (p.to_string(), molar_ratio(c, p.num, p.den).ok()))
                .collect(),
        })
        .collect();
    rows.sort_by(|a, b| (&a.sample_id, a.age_days).cmp(&(&b.sample_id, b.age_days)));
    rows
}

pub fn eds_deltas(comps: &[EdsComposition], pairs: &[RatioPair], from: u32, to: u32) -> Vec<EdsDelta> {
    let mut by_sample: BTreeMap<&str, (Option<&EdsComposition>, Option<&EdsComposition>)> = BTreeMap::new();
    for c in comps {
        let slot = by_sample.entry(c.sample_id()).or_default();
        if c.age_days() == from {
            slot.0 = Some(c);
        } else if c.age_days() == to {
            slot.1 = Some(c);
        }
    }
    by_sample
        .into_iter()
        .filter_map(|(id, pair)| match pair {
            (Some(a), Some(b)) => Some(EdsDelta {
                sample_id: id.to_string(),
                from_days: from,
                to_days: to,
                change_pct: pairs
                    .iter()
                    .map(|p| (p.to_string(), ratio_delta(a, b, p.num, p.den).ok()))
                    .collect(),
            }),
            _ => None,
        })
        .collect()
}

pub fn default_pairs() -> Vec<RatioPair> {
    DEFAULT_RATIOS
        .iter()
        .map(|s| s.parse().expect("built-in ratio pair"))
        .collect()
}

fn eds_section(file: &DataFile) -> Result<EdsSection, String> {
    let comps = read_eds_csv(open(&file.path)?).map_err(|e| format!("{}: {e}", file.label))?;
    let pairs = default_pairs();
    Ok(EdsSection {
        source: file.label.clone(),
        rows: eds_rows(&comps, &pairs),
        deltas: eds_deltas(&comps, &pairs, 7, 28),
    })
}

pub fn strength_increments(records: &[StrengthRecord]) -> Vec<StrengthIncrement> {
    let find = |id: &str, age| records.iter().find(|r| r.sample_id == id && r.age_days == age);
    development_curve(records)
        .iter()
        .filter_map(|s| {
            let (a, b) = (find(&s.sample_id, 28)?, find(&s.sample_id, 120)?);
            Some(StrengthIncrement {
                sample_id: s.sample_id.clone(),
                strength_28: a.strength,
                strength_120: b.strength,
                increment_pct: strength_increment(a, b).ok()?,
            })
        })
        .collect()
}

fn strength_section(file: &DataFile) -> Result<StrengthSection, String> {
    let records = read_strength_csv(open(&file.path)?).map_err(|e| format!("{}: {e}", file.label))?;
    Ok(StrengthSection {
        source: file.label.clone(),
        series: development_curve(&records),
        increments: strength_increments(&records),
    })
}

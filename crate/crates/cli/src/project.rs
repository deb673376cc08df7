//! Project files: one text file binding a mix table to lab data files.
//!
//! ```text
//! [project]
//! name = lab-2023
//! registry = materials.cfg      # optional; built-in registry otherwise
//! output = out                  # optional
//!
//! [mix_table]
//! sf = 10, 20
//! naoh = 8, 10
//! ws = 0.45
//! mode = solid
//! binder_kg = 571.4             # optional; enables costing
//!
//! [bind]
//! mix = SF10NH8
//! thermogram = 28, tga/SF10NH8.csv
//! flow_curve = 0.45, flow/SF10NH8_045.csv
//! calcite_fraction = 0.10
//! ldc_a = 1.889                 # optional; otherwise from the registry
//!
//! [data]
//! eds = eds.csv
//! strength = strength.csv
//! ```
//!
//! Relative paths resolve against the project file's directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use slagbind::keyvalue::{parse_sections, Entry, KeyValueError, Section};
use slagbind::mixdesign::build_mix_table;
use slagbind::thermo::SchemeName;
use slagbind::{MixDesign, MixMode, Registry};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("cannot read project file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("project file: {0}")]
    Syntax(#[from] KeyValueError),
    #[error("project does not validate:\n  {}", .problems.join("\n  "))]
    Validation { problems: Vec<String> },
}

/// A data file as written in the project and where it resolves to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DataFile {
    pub label: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermogramBinding {
    pub age_days: u32,
    pub file: DataFile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowBinding {
    pub w_s: f64,
    pub file: DataFile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixBinding {
    pub mix: String,
    pub thermograms: Vec<ThermogramBinding>,
    pub flow_curves: Vec<FlowBinding>,
    pub calcite_fraction: f64,
    pub ldc_a: Option<f64>,
    pub scheme: SchemeName,
}

#[derive(Debug, Clone)]
pub struct Project {
    pub name: String,
    pub file: DataFile,
    pub registry_file: Option<DataFile>,
    pub registry: Registry,
    pub output: Option<PathBuf>,
    pub mixes: Vec<MixDesign>,
    pub binder_kg: Option<f64>,
    pub bindings: Vec<MixBinding>,
    pub eds: Option<DataFile>,
    pub strength: Option<DataFile>,
}

pub const DEFAULT_CALCITE_FRACTION: f64 = 0.10;

impl Project {
    pub fn load(path: &Path) -> Result<Self, ProjectError> {
        let text = fs::read_to_string(path).map_err(|source| ProjectError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let file = DataFile {
            label: path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            path: path.to_path_buf(),
        };
        Self::parse(&text, base, file)
    }

    /// Parses and validates. Every problem found is collected before failing.
    pub fn parse(text: &str, base: &Path, file: DataFile) -> Result<Self, ProjectError> {
        let sections = parse_sections(text)?;
        let mut problems = Vec::new();
        let mut p = Project {
            name: String::new(),
            file,
            registry_file: None,
            registry: Registry::builtin(),
            output: None,
            mixes: Vec::new(),
            binder_kg: None,
            bindings: Vec::new(),
            eds: None,
            strength: None,
        };
        let resolve = |e: &Entry, problems: &mut Vec<String>| -> DataFile {
            let path = base.join(&e.value);
            if !path.is_file() {
                problems.push(format!("line {}: missing file {}", e.line, path.display()));
            }
            DataFile {
                label: e.value.clone(),
                path,
            }
        };
        let mut seen = BTreeSet::new();
        for s in &sections {
            if matches!(s.name.as_str(), "project" | "mix_table" | "data") && !seen.insert(&s.name) {
                problems.push(format!("line {}: duplicate [{}] section", s.line, s.name));
            }
            match s.name.as_str() {
                "project" => {
                    p.name = s.get("name").map(|e| e.value.clone()).unwrap_or_default();
                    if let Some(e) = s.get("registry") {
                        p.registry_file = Some(resolve(e, &mut problems));
                    }
                    p.output = s.get("output").map(|e| base.join(&e.value));
                }
                "mix_table" => match parse_mix_table(s) {
                    Ok((mixes, binder)) => {
                        p.mixes = mixes;
                        p.binder_kg = binder;
                    }
                    Err(e) => problems.push(e),
                },
                "bind" => match parse_binding(s, |e| resolve(e, &mut problems)) {
                    Ok(b) => p.bindings.push(b),
                    Err(e) => problems.push(e.to_string()),
                },
                "data" => {
                    if let Some(e) = s.get("eds") {
                        p.eds = Some(resolve(e, &mut problems));
                    }
                    if let Some(e) = s.get("strength") {
                        p.strength = Some(resolve(e, &mut problems));
                    }
                }
                other => problems.push(format!("line {}: unknown section [{other}]", s.line)),
            }
        }

        if let Some(f) = &p.registry_file {
            if f.path.is_file() {
                match fs::read_to_string(&f.path)
                    .map_err(|e| e.to_string())
                    .and_then(|t| Registry::parse(&t).map_err(|e| e.to_string()))
                {
                    Ok(r) => p.registry = r,
                    Err(e) => problems.push(format!("registry {}: {e}", f.label)),
                }
            }
        }

        let known: BTreeSet<&str> = p.mixes.iter().map(|m| m.id.as_str()).collect();
        let mut bound = BTreeSet::new();
        for b in &p.bindings {
            if !known.contains(b.mix.as_str()) {
                problems.push(format!("bound mix `{}` is not in the mix table", b.mix));
            }
            if !bound.insert(b.mix.as_str()) {
                problems.push(format!("mix `{}` is bound more than once", b.mix));
            }
        }

        if !problems.is_empty() {
            return Err(ProjectError::Validation { problems });
        }
        p.mixes.sort_by(|a, b| a.id.cmp(&b.id));
        p.bindings.sort_by(|a, b| a.mix.cmp(&b.mix));
        Ok(p)
    }

    /// Every file the report depends on, sorted by label.
    pub fn inputs(&self) -> Vec<&DataFile> {
        let mut v: Vec<&DataFile> = std::iter::once(&self.file)
            .chain(&self.registry_file)
            .chain(&self.eds)
            .chain(&self.strength)
            .chain(self.bindings.iter().flat_map(|b| {
                b.thermograms
                    .iter()
                    .map(|t| &t.file)
                    .chain(b.flow_curves.iter().map(|f| &f.file))
            }))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn binding(&self, mix: &str) -> Option<&MixBinding> {
        self.bindings.iter().find(|b| b.mix == mix)
    }
}

fn parse_mix_table(s: &Section) -> Result<(Vec<MixDesign>, Option<f64>), String> {
    let list = |key: &str| -> Result<Vec<f64>, String> {
        s.require(key)
            .and_then(|e| e.parse_list())
            .map_err(|e| e.to_string())
    };
    let modes: Vec<MixMode> = match s.get("mode") {
        Some(e) => e.parse_list().map_err(|e| e.to_string())?,
        None => vec![MixMode::SolidActivators],
    };
    let mixes = build_mix_table(&list("sf")?, &list("naoh")?, &list("ws")?, &modes)
        .map_err(|e| format!("line {}: mix table: {e}", s.line))?;
    let binder = s.parse_opt::<f64>("binder_kg").map_err(|e| e.to_string())?;
    if let Some(b) = binder {
        if !(b > 0.0) {
            return Err(format!("line {}: binder_kg must be positive", s.line));
        }
    }
    Ok((mixes, binder))
}

fn parse_binding(
    s: &Section,
    mut resolve: impl FnMut(&Entry) -> DataFile,
) -> Result<MixBinding, KeyValueError> {
    let mix = s.require("mix")?.value.clone();
    let mut thermograms = Vec::new();
    for e in s.get_all("thermogram") {
        let (age, path) = split_pair(e)?;
        let age_days = age.parse().map_err(|_| e.invalid("age must be a whole number of days"))?;
        thermograms.push(ThermogramBinding {
            age_days,
            file: resolve(&Entry {
                value: path.to_string(),
                ..e.clone()
            }),
        });
    }
    let mut flow_curves = Vec::new();
    for e in s.get_all("flow_curve") {
        let (ws, path) = split_pair(e)?;
        let w_s: f64 = ws.parse().map_err(|_| e.invalid("w/s must be a number"))?;
        flow_curves.push(FlowBinding {
            w_s,
            file: resolve(&Entry {
                value: path.to_string(),
                ..e.clone()
            }),
        });
    }
    thermograms.sort_by(|a, b| a.age_days.cmp(&b.age_days).then(a.file.cmp(&b.file)));
    flow_curves.sort_by(|a, b| a.w_s.total_cmp(&b.w_s).then(a.file.cmp(&b.file)));
    Ok(MixBinding {
        mix,
        thermograms,
        flow_curves,
        calcite_fraction: s
            .parse_opt("calcite_fraction")?
            .unwrap_or(DEFAULT_CALCITE_FRACTION),
        ldc_a: s.parse_opt("ldc_a")?,
        scheme: s.parse_opt("scheme")?.unwrap_or(SchemeName::PresentStudy),
    })
}

fn split_pair(e: &Entry) -> Result<(&str, &str), KeyValueError> {
    e.value
        .split_once(',')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| e.invalid("expected `<key>, <path>`"))
}

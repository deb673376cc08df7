//! Raw-material registry and precursor suitability indices.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keyvalue::{self, KeyValueError, Section};

/// Upper bound on oxides + LOI. Analytical closure of XRF tables routinely
/// lands a little above 100 %.
pub const CLOSURE_LIMIT: f64 = 105.0;

/// Minimum CaO/SiO₂ for a slag precursor.
pub const LIME_SILICA_TARGET: f64 = 1.4;

const BASICITY_TOLERANCE: f64 = 1e-9;

/// CO₂ share of pure Na₂CO₃, used as the soda-ash LOI when a registry omits it.
pub const SODA_ASH_DEFAULT_LOI: f64 = 41.5;

const BUILTIN_REGISTRY: &str = include_str!("../data/materials.cfg");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialsError {
    #[error("SiO2 + Al2O3 is zero; modulus of basicity is undefined")]
    ZeroAcidicOxides,
    #[error("SiO2 is zero; CaO/SiO2 is undefined")]
    ZeroSilica,
    #[error("{oxide} = {value} is outside [0, 100] %")]
    OxideOutOfRange { oxide: String, value: f64 },
    #[error("oxides + LOI sum to {total:.2} %, above the {CLOSURE_LIMIT} % closure limit")]
    ClosureExceeded { total: f64 },
    #[error("anhydrous TGA masses must satisfy w105 >= w635 >= w1000 > 0, got {w105}, {w635}, {w1000}")]
    NonMonotoneTga { w105: f64, w635: f64, w1000: f64 },
    #[error("material `{id}`: {reason}")]
    InvalidMaterial { id: String, reason: String },
    #[error("duplicate material id `{0}`")]
    DuplicateId(String),
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error(transparent)]
    Parse(#[from] KeyValueError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Oxide {
    CaO,
    SiO2,
    Al2O3,
    MgO,
    MnO,
    K2O,
    Na2O,
    Fe2O3,
    TiO2,
    P2O5,
    SO3,
}

impl Oxide {
    pub const ALL: [Oxide; 11] = [
        Oxide::CaO,
        Oxide::SiO2,
        Oxide::Al2O3,
        Oxide::MgO,
        Oxide::MnO,
        Oxide::K2O,
        Oxide::Na2O,
        Oxide::Fe2O3,
        Oxide::TiO2,
        Oxide::P2O5,
        Oxide::SO3,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Oxide::CaO => "CaO",
            Oxide::SiO2 => "SiO2",
            Oxide::Al2O3 => "Al2O3",
            Oxide::MgO => "MgO",
            Oxide::MnO => "MnO",
            Oxide::K2O => "K2O",
            Oxide::Na2O => "Na2O",
            Oxide::Fe2O3 => "Fe2O3",
            Oxide::TiO2 => "TiO2",
            Oxide::P2O5 => "P2O5",
            Oxide::SO3 => "SO3",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Oxide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Oxide {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Oxide::ALL
            .into_iter()
            .find(|o| o.symbol() == s)
            .ok_or_else(|| format!("unknown oxide `{s}`"))
    }
}

/// Oxide mass percentages plus loss on ignition. Oxides not given are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CompositionRepr", into = "CompositionRepr")]
pub struct OxideComposition {
    oxides: [f64; 11],
    loi: f64,
}

#[derive(Serialize, Deserialize)]
struct CompositionRepr {
    oxides: BTreeMap<Oxide, f64>,
    loi: f64,
}

impl TryFrom<CompositionRepr> for OxideComposition {
    type Error = MaterialsError;

    fn try_from(r: CompositionRepr) -> Result<Self, Self::Error> {
        let pairs: Vec<_> = r.oxides.into_iter().collect();
        OxideComposition::new(&pairs, r.loi)
    }
}

impl From<OxideComposition> for CompositionRepr {
    fn from(c: OxideComposition) -> Self {
        CompositionRepr {
            oxides: Oxide::ALL
                .into_iter()
                .filter(|o| c.get(*o) != 0.0)
                .map(|o| (o, c.get(o)))
                .collect(),
            loi: c.loi,
        }
    }
}

impl OxideComposition {
    pub fn new(oxides: &[(Oxide, f64)], loi: f64) -> Result<Self, MaterialsError> {
        let mut values = [0.0; 11];
        for &(oxide, value) in oxides {
            if !(0.0..=100.0).contains(&value) {
                return Err(MaterialsError::OxideOutOfRange {
                    oxide: oxide.symbol().into(),
                    value,
                });
            }
            values[oxide.index()] = value;
        }
        if !(0.0..=100.0).contains(&loi) {
            return Err(MaterialsError::OxideOutOfRange {
                oxide: "LOI".into(),
                value: loi,
            });
        }
        let total = values.iter().sum::<f64>() + loi;
        if total > CLOSURE_LIMIT {
            return Err(MaterialsError::ClosureExceeded { total });
        }
        Ok(Self {
            oxides: values,
            loi,
        })
    }

    pub fn get(&self, oxide: Oxide) -> f64 {
        self.oxides[oxide.index()]
    }

    pub fn loi(&self) -> f64 {
        self.loi
    }

    pub fn total(&self) -> f64 {
        self.oxides.iter().sum::<f64>() + self.loi
    }
}

/// (CaO + MgO) / (SiO₂ + Al₂O₃).
pub fn modulus_of_basicity(comp: &OxideComposition) -> Result<f64, MaterialsError> {
    let acidic = comp.get(Oxide::SiO2) + comp.get(Oxide::Al2O3);
    if acidic == 0.0 {
        return Err(MaterialsError::ZeroAcidicOxides);
    }
    Ok((comp.get(Oxide::CaO) + comp.get(Oxide::MgO)) / acidic)
}

pub fn lime_silica_ratio(comp: &OxideComposition) -> Result<f64, MaterialsError> {
    let silica = comp.get(Oxide::SiO2);
    if silica == 0.0 {
        return Err(MaterialsError::ZeroSilica);
    }
    Ok(comp.get(Oxide::CaO) / silica)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Suitable,
    Unsuitable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecursorReport {
    pub verdict: Verdict,
    pub basicity: f64,
    pub lime_silica: f64,
    pub note: Option<String>,
}

/// A slag is usable when it is neutral or basic (B >= 1). A CaO/SiO₂ below
/// the 1.4 target is noted but does not change the verdict.
pub fn precursor_check(comp: &OxideComposition) -> Result<PrecursorReport, MaterialsError> {
    let basicity = modulus_of_basicity(comp)?;
    let lime_silica = lime_silica_ratio(comp)?;
    let verdict = if basicity >= 1.0 - BASICITY_TOLERANCE {
        Verdict::Suitable
    } else {
        Verdict::Unsuitable
    };
    let note = (lime_silica < LIME_SILICA_TARGET).then(|| {
        format!("CaO/SiO2 = {lime_silica:.2} is below the {LIME_SILICA_TARGET} target")
    });
    Ok(PrecursorReport {
        verdict,
        basicity,
        lime_silica,
        note,
    })
}

/// Anhydrous raw-material masses (μg) at 105, 635 and 1000 °C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct AnhydrousTgaRef {
    w105: f64,
    w635: f64,
    w1000: f64,
}

impl AnhydrousTgaRef {
    pub fn new(w105: f64, w635: f64, w1000: f64) -> Result<Self, MaterialsError> {
        if !(w105 >= w635 && w635 >= w1000 && w1000 > 0.0) {
            return Err(MaterialsError::NonMonotoneTga { w105, w635, w1000 });
        }
        Ok(Self { w105, w635, w1000 })
    }

    pub fn w105(&self) -> f64 {
        self.w105
    }

    pub fn w635(&self) -> f64 {
        self.w635
    }

    pub fn w1000(&self) -> f64 {
        self.w1000
    }
}

impl TryFrom<[f64; 3]> for AnhydrousTgaRef {
    type Error = MaterialsError;

    fn try_from(w: [f64; 3]) -> Result<Self, Self::Error> {
        Self::new(w[0], w[1], w[2])
    }
}

impl From<AnhydrousTgaRef> for [f64; 3] {
    fn from(r: AnhydrousTgaRef) -> Self {
        [r.w105, r.w635, r.w1000]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialRole {
    Precursor,
    MineralAdditive,
    Activator,
    Aggregate,
}

impl FromStr for MaterialRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "precursor" => Ok(Self::Precursor),
            "mineral_additive" => Ok(Self::MineralAdditive),
            "activator" => Ok(Self::Activator),
            "aggregate" => Ok(Self::Aggregate),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub id: String,
    pub role: MaterialRole,
    pub composition: Option<OxideComposition>,
    pub density_kg_m3: f64,
    pub blaine_m2_kg: Option<f64>,
    pub unit_cost_per_kg: Option<f64>,
    pub anhydrous_ref: Option<AnhydrousTgaRef>,
}

impl MaterialSpec {
    fn validate(&self) -> Result<(), MaterialsError> {
        let bad = |reason: &str| MaterialsError::InvalidMaterial {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        if self.id.is_empty() {
            return Err(bad("empty id"));
        }
        if !(self.density_kg_m3 > 0.0) {
            return Err(bad("density must be positive"));
        }
        if matches!(self.blaine_m2_kg, Some(b) if !(b > 0.0)) {
            return Err(bad("Blaine fineness must be positive"));
        }
        if matches!(self.unit_cost_per_kg, Some(c) if !(c >= 0.0)) {
            return Err(bad("unit cost must be non-negative"));
        }
        if self.composition.is_none() && self.role != MaterialRole::Aggregate {
            return Err(bad("oxide composition is required unless the role is aggregate"));
        }
        Ok(())
    }

    pub fn loi(&self) -> Option<f64> {
        self.composition.as_ref().map(OxideComposition::loi)
    }
}

/// Immutable set of materials keyed by id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    materials: BTreeMap<String, MaterialSpec>,
}

impl Registry {
    pub fn new(materials: impl IntoIterator<Item = MaterialSpec>) -> Result<Self, MaterialsError> {
        let mut map = BTreeMap::new();
        for m in materials {
            m.validate()?;
            if map.contains_key(&m.id) {
                return Err(MaterialsError::DuplicateId(m.id));
            }
            map.insert(m.id.clone(), m);
        }
        Ok(Self { materials: map })
    }

    /// The raw materials and activator price list shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_REGISTRY).expect("builtin registry is valid")
    }

    pub fn parse(text: &str) -> Result<Self, MaterialsError> {
        let sections = keyvalue::parse_sections(text)?;
        let mut materials = Vec::new();
        for section in &sections {
            if section.name != "material" {
                return Err(KeyValueError::Syntax {
                    line: section.line,
                    message: format!("unexpected section [{}]", section.name),
                }
                .into());
            }
            materials.push(parse_material(section)?);
        }
        Self::new(materials)
    }

    pub fn get(&self, id: &str) -> Option<&MaterialSpec> {
        self.materials.get(id)
    }

    pub fn require(&self, id: &str) -> Result<&MaterialSpec, MaterialsError> {
        self.get(id)
            .ok_or_else(|| MaterialsError::UnknownMaterial(id.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &MaterialSpec> {
        self.materials.values()
    }

    pub fn len(&self) -> usize {
        self.materials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.materials.is_empty()
    }
}

const KNOWN_KEYS: [&str; 7] = [
    "id",
    "role",
    "density_kg_m3",
    "blaine_m2_kg",
    "unit_cost_per_kg",
    "loi",
    "tga_ref",
];

fn parse_material(section: &Section) -> Result<MaterialSpec, MaterialsError> {
    let id: String = section.parse_req("id")?;
    let role: MaterialRole = section.parse_req("role")?;

    let mut oxides = Vec::new();
    for entry in &section.entries {
        if KNOWN_KEYS.contains(&entry.key.as_str()) {
            continue;
        }
        let oxide: Oxide = entry
            .key
            .parse()
            .map_err(|e: String| entry.invalid(e))?;
        oxides.push((oxide, entry.parse::<f64>()?));
    }
    let loi: Option<f64> = section.parse_opt("loi")?;
    let composition = if oxides.is_empty() && loi.is_none() {
        None
    } else {
        let loi = match loi {
            Some(l) => l,
            None if id == "SA" => SODA_ASH_DEFAULT_LOI,
            None => 0.0,
        };
        Some(OxideComposition::new(&oxides, loi)?)
    };

    let anhydrous_ref = match section.get("tga_ref") {
        Some(entry) => {
            let w: Vec<f64> = entry.parse_list()?;
            if w.len() != 3 {
                return Err(entry.invalid("expected w105,w635,w1000").into());
            }
            Some(AnhydrousTgaRef::new(w[0], w[1], w[2])?)
        }
        None => None,
    };

    Ok(MaterialSpec {
        id,
        role,
        composition,
        density_kg_m3: section.parse_req("density_kg_m3")?,
        blaine_m2_kg: section.parse_opt("blaine_m2_kg")?,
        unit_cost_per_kg: section.parse_opt("unit_cost_per_kg")?,
        anhydrous_ref,
    })
}

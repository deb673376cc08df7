//! Activator dosing for a targeted equivalent-NaOH content, water demand,
//! mix tables and per-cubic-metre activator cost.
//!
//! Hydrated lime and soda ash react in the fresh mix as
//! `Ca(OH)₂ + Na₂CO₃ → 2 NaOH + CaCO₃`, so each percent of target NaOH needs
//! 74/80 % of lime and 106/80 % of soda ash, all expressed on binder mass.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::materials::Registry;

/// Molar mass ratio Ca(OH)₂ / 2 NaOH.
pub const LIME_PER_NAOH: f64 = 74.0 / 80.0;
/// Molar mass ratio Na₂CO₃ / 2 NaOH.
pub const SODA_ASH_PER_NAOH: f64 = 106.0 / 80.0;

pub const DEFAULT_SAND_PER_BINDER: f64 = 3.0;

const FRACTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MixError {
    #[error("dosage must be non-negative, got {0}")]
    NegativeDosage(f64),
    #[error("{0} list is empty")]
    EmptyInput(&'static str),
    #[error("mix id `{0}` occurs more than once")]
    DuplicateId(String),
    #[error("material `{0}` has no unit cost")]
    MissingUnitCost(String),
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error("invalid mix design `{id}`: {reason}")]
    InvalidDesign { id: String, reason: String },
    #[error("cannot parse mix id `{0}`; expected SF<sf>NH<naoh>[_C|_PM]")]
    BadId(String),
    #[error("unknown mixing mode `{0}`")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixMode {
    /// Hydrated lime and soda ash dry-mixed with the binder.
    SolidActivators,
    /// Analytical NaOH pellets pre-dissolved in the mixing water.
    ControlNaohSolution,
    /// Soda ash pre-dissolved in water, hydrated lime added as powder.
    PremixedSodaAsh,
}

impl MixMode {
    pub fn id_suffix(self) -> &'static str {
        match self {
            MixMode::SolidActivators => "",
            MixMode::ControlNaohSolution => "_C",
            MixMode::PremixedSodaAsh => "_PM",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MixMode::SolidActivators => "Soda ash and hydrated lime added in solid form",
            MixMode::ControlNaohSolution => "Control NaOH solution",
            MixMode::PremixedSodaAsh => "Pre-mixed soda ash in water",
        }
    }
}

impl FromStr for MixMode {
    type Err = MixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "solid" | "solid_activators" => Ok(MixMode::SolidActivators),
            "control" | "control_naoh_solution" => Ok(MixMode::ControlNaohSolution),
            "premixed" | "premixed_soda_ash" => Ok(MixMode::PremixedSodaAsh),
            other => Err(MixError::UnknownMode(other.to_string())),
        }
    }
}

/// Hydrated-lime and soda-ash dosages, percent of binder mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivatorDosage {
    pub hydrated_lime: f64,
    pub soda_ash: f64,
}

pub fn activator_dosage(target_naoh: f64) -> Result<ActivatorDosage, MixError> {
    if !(target_naoh >= 0.0) {
        return Err(MixError::NegativeDosage(target_naoh));
    }
    Ok(ActivatorDosage {
        hydrated_lime: LIME_PER_NAOH * target_naoh,
        soda_ash: SODA_ASH_PER_NAOH * target_naoh,
    })
}

/// One row of a mix table. Fractions and dosages are percent of binder
/// (GGBFS + SF) mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixDesign {
    pub id: String,
    pub sf_frac: f64,
    pub ggbfs_frac: f64,
    pub target_naoh: f64,
    pub hl_dosage: f64,
    pub sa_dosage: f64,
    /// Water to total solids.
    pub w_s: f64,
    /// Sand parts per binder part.
    pub binder_sand: f64,
    pub mode: MixMode,
}

impl MixDesign {
    pub fn new(sf_frac: f64, target_naoh: f64, w_s: f64, mode: MixMode) -> Result<Self, MixError> {
        let dosage = activator_dosage(target_naoh)?;
        let (hl, sa) = match mode {
            MixMode::ControlNaohSolution => (0.0, 0.0),
            MixMode::SolidActivators | MixMode::PremixedSodaAsh => {
                (dosage.hydrated_lime, dosage.soda_ash)
            }
        };
        let design = MixDesign {
            id: mix_id(sf_frac, target_naoh, mode),
            sf_frac,
            ggbfs_frac: 100.0 - sf_frac,
            target_naoh,
            hl_dosage: hl,
            sa_dosage: sa,
            w_s,
            binder_sand: DEFAULT_SAND_PER_BINDER,
            mode,
        };
        design.validate()?;
        Ok(design)
    }

    /// Rebuilds a design from its id, e.g. `SF10NH8_PM`.
    pub fn from_id(id: &str, w_s: f64) -> Result<Self, MixError> {
        let (mode, stem) = if let Some(stem) = id.strip_suffix("_PM") {
            (MixMode::PremixedSodaAsh, stem)
        } else if let Some(stem) = id.strip_suffix("_C") {
            (MixMode::ControlNaohSolution, stem)
        } else {
            (MixMode::SolidActivators, id)
        };
        let bad = || MixError::BadId(id.to_string());
        let rest = stem.strip_prefix("SF").ok_or_else(bad)?;
        let (sf, naoh) = rest.split_once("NH").ok_or_else(bad)?;
        let sf: f64 = sf.parse().map_err(|_| bad())?;
        let naoh: f64 = naoh.parse().map_err(|_| bad())?;
        let design = Self::new(sf, naoh, w_s, mode)?;
        if design.id != id {
            return Err(bad());
        }
        Ok(design)
    }

    pub fn validate(&self) -> Result<(), MixError> {
        let bad = |reason: String| MixError::InvalidDesign {
            id: self.id.clone(),
            reason,
        };
        if !(0.0..=100.0).contains(&self.sf_frac) || !(0.0..=100.0).contains(&self.ggbfs_frac) {
            return Err(bad("binder fractions must lie in [0, 100]".into()));
        }
        if (self.sf_frac + self.ggbfs_frac - 100.0).abs() > FRACTION_TOLERANCE {
            return Err(bad(format!(
                "SF + GGBFS = {} but must be 100",
                self.sf_frac + self.ggbfs_frac
            )));
        }
        if self.target_naoh < 0.0 || self.hl_dosage < 0.0 || self.sa_dosage < 0.0 {
            return Err(bad("dosages must be non-negative".into()));
        }
        if self.mode == MixMode::SolidActivators {
            let expected = activator_dosage(self.target_naoh)?;
            if (self.hl_dosage - expected.hydrated_lime).abs() > FRACTION_TOLERANCE
                || (self.sa_dosage - expected.soda_ash).abs() > FRACTION_TOLERANCE
            {
                return Err(bad("HL/SA dosages do not match the target NaOH".into()));
            }
        }
        if !(self.w_s > 0.0) {
            return Err(bad(format!("w/s must be positive, got {}", self.w_s)));
        }
        if !(self.binder_sand >= 0.0) {
            return Err(bad("sand ratio must be non-negative".into()));
        }
        Ok(())
    }

    /// Mass of the w/s solids set per unit binder mass. Control mixes carry
    /// their NaOH in solution, so only the binder counts.
    pub fn solids_per_binder(&self) -> f64 {
        match self.mode {
            MixMode::ControlNaohSolution => 1.0,
            MixMode::SolidActivators | MixMode::PremixedSodaAsh => {
                1.0 + (self.hl_dosage + self.sa_dosage) / 100.0
            }
        }
    }

    /// Parts per 100 binder parts of every material in the blend, keyed by
    /// registry id. Control mixes dose NaOH at the target.
    pub fn material_parts(&self) -> BTreeMap<String, f64> {
        let mut parts = BTreeMap::new();
        parts.insert("GGBFS".to_string(), self.ggbfs_frac);
        parts.insert("SF".to_string(), self.sf_frac);
        match self.mode {
            MixMode::ControlNaohSolution => {
                parts.insert("NaOH".to_string(), self.target_naoh);
            }
            MixMode::SolidActivators | MixMode::PremixedSodaAsh => {
                parts.insert("HL".to_string(), self.hl_dosage);
                parts.insert("SA".to_string(), self.sa_dosage);
            }
        }
        parts
    }
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub fn mix_id(sf_frac: f64, target_naoh: f64, mode: MixMode) -> String {
    format!(
        "SF{}NH{}{}",
        fmt_num(sf_frac),
        fmt_num(target_naoh),
        mode.id_suffix()
    )
}

/// Water mass for `binder_mass` of binder: w/s times the mode's solids set.
pub fn water_mass(design: &MixDesign, binder_mass: f64) -> f64 {
    design.w_s * binder_mass * design.solids_per_binder()
}

/// Cartesian product of the inputs, ordered mode → target → SF → w/s.
pub fn build_mix_table(
    sf_fracs: &[f64],
    targets: &[f64],
    w_s: &[f64],
    modes: &[MixMode],
) -> Result<Vec<MixDesign>, MixError> {
    for (name, empty) in [
        ("SF fraction", sf_fracs.is_empty()),
        ("target NaOH", targets.is_empty()),
        ("w/s", w_s.is_empty()),
        ("mode", modes.is_empty()),
    ] {
        if empty {
            return Err(MixError::EmptyInput(name));
        }
    }
    let mut seen = HashSet::new();
    let mut table = Vec::new();
    for &mode in modes {
        for &target in targets {
            for &sf in sf_fracs {
                for &ws in w_s {
                    let design = MixDesign::new(sf, target, ws, mode)?;
                    if !seen.insert(design.id.clone()) {
                        return Err(MixError::DuplicateId(design.id));
                    }
                    table.push(design);
                }
            }
        }
    }
    Ok(table)
}

/// Which activator grade and form a cost is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostBasis {
    /// Industrial hydrated lime and soda ash, solid or pre-mixed.
    Industrial,
    /// Analytical NaOH pellets dosed at the target percentage.
    ControlNaoh,
    /// Analytical Ca(OH)₂ and Na₂CO₃ powders at stoichiometric dosages.
    AnalyticalPowder,
}

impl CostBasis {
    pub fn for_mode(mode: MixMode) -> Self {
        match mode {
            MixMode::SolidActivators | MixMode::PremixedSodaAsh => CostBasis::Industrial,
            MixMode::ControlNaohSolution => CostBasis::ControlNaoh,
        }
    }
}

impl FromStr for CostBasis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "industrial" => Ok(CostBasis::Industrial),
            "control" | "control_naoh" => Ok(CostBasis::ControlNaoh),
            "analytical" | "analytical_powder" => Ok(CostBasis::AnalyticalPowder),
            other => Err(format!("unknown cost basis `{other}`")),
        }
    }
}

impl fmt::Display for CostBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostBasis::Industrial => "industrial",
            CostBasis::ControlNaoh => "control_naoh",
            CostBasis::AnalyticalPowder => "analytical_powder",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostLine {
    pub material: String,
    /// Percent of binder mass.
    pub dosage: f64,
    pub unit_cost: f64,
    /// Currency per m³ of mix.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub design: String,
    pub basis: CostBasis,
    pub lines: Vec<CostLine>,
    pub total: f64,
    /// Binder kg per m³ of mix.
    pub binder_mass: f64,
}

/// Activator cost per m³ at the grade matching the design's mixing mode.
pub fn activator_cost(
    design: &MixDesign,
    registry: &Registry,
    binder_mass: f64,
) -> Result<CostBreakdown, MixError> {
    activator_cost_with_basis(design, registry, binder_mass, CostBasis::for_mode(design.mode))
}

pub fn activator_cost_with_basis(
    design: &MixDesign,
    registry: &Registry,
    binder_mass: f64,
    basis: CostBasis,
) -> Result<CostBreakdown, MixError> {
    let stoich = match design.mode {
        MixMode::ControlNaohSolution => activator_dosage(design.target_naoh)?,
        MixMode::SolidActivators | MixMode::PremixedSodaAsh => ActivatorDosage {
            hydrated_lime: design.hl_dosage,
            soda_ash: design.sa_dosage,
        },
    };
    let doses: Vec<(&str, f64)> = match basis {
        CostBasis::Industrial => vec![("HL", stoich.hydrated_lime), ("SA", stoich.soda_ash)],
        CostBasis::ControlNaoh => vec![("NaOH", design.target_naoh)],
        CostBasis::AnalyticalPowder => vec![
            ("CaOH2_AR", stoich.hydrated_lime),
            ("Na2CO3_AR", stoich.soda_ash),
        ],
    };
    let mut lines = Vec::with_capacity(doses.len());
    for (id, dosage) in doses {
        let material = registry
            .get(id)
            .ok_or_else(|| MixError::UnknownMaterial(id.to_string()))?;
        let unit_cost = material
            .unit_cost_per_kg
            .ok_or_else(|| MixError::MissingUnitCost(id.to_string()))?;
        lines.push(CostLine {
            material: id.to_string(),
            dosage,
            unit_cost,
            cost: binder_mass * dosage / 100.0 * unit_cost,
        });
    }
    Ok(CostBreakdown {
        design: design.id.clone(),
        basis,
        total: lines.iter().map(|l| l.cost).sum(),
        lines,
        binder_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dosage_examples() {
        let d = activator_dosage(10.0).unwrap();
        assert!((d.hydrated_lime - 9.25).abs() < 1e-12);
        assert!((d.soda_ash - 13.25).abs() < 1e-12);
        let d = activator_dosage(0.0).unwrap();
        assert_eq!((d.hydrated_lime, d.soda_ash), (0.0, 0.0));
        let d = activator_dosage(6.0).unwrap();
        assert!((d.hydrated_lime - 5.55).abs() < 1e-12);
        assert!((d.soda_ash - 7.95).abs() < 1e-12);
        assert_eq!(activator_dosage(-1.0), Err(MixError::NegativeDosage(-1.0)));
    }

    #[test]
    fn water_mass_examples() {
        let nh10 = MixDesign::new(10.0, 10.0, 0.45, MixMode::SolidActivators).unwrap();
        // 100 kg binder + 9.25 + 13.25 kg activators = 122.5 kg solids.
        assert!((water_mass(&nh10, 100.0) - 0.45 * 122.5).abs() < 1e-9);
        assert!((water_mass(&nh10, 100.0) - 55.13).abs() <= 0.01);

        let mut dry = nh10.clone();
        dry.w_s = 0.0;
        assert_eq!(water_mass(&dry, 100.0), 0.0);

        let nh8 = MixDesign::new(10.0, 8.0, 0.50, MixMode::SolidActivators).unwrap();
        assert!((water_mass(&nh8, 100.0) - 59.0).abs() <= 0.05);

        let control = MixDesign::new(10.0, 8.0, 0.50, MixMode::ControlNaohSolution).unwrap();
        assert!((water_mass(&control, 100.0) - 50.0).abs() < 1e-12);
        let pm = MixDesign::new(10.0, 8.0, 0.50, MixMode::PremixedSodaAsh).unwrap();
        assert_eq!(water_mass(&pm, 100.0), water_mass(&nh8, 100.0));
    }

    #[test]
    fn ids_follow_naming_scheme() {
        assert_eq!(mix_id(10.0, 6.0, MixMode::SolidActivators), "SF10NH6");
        assert_eq!(mix_id(20.0, 8.0, MixMode::ControlNaohSolution), "SF20NH8_C");
        assert_eq!(mix_id(10.0, 10.0, MixMode::PremixedSodaAsh), "SF10NH10_PM");
        assert_eq!(mix_id(12.5, 7.0, MixMode::SolidActivators), "SF12.5NH7");
        let d = MixDesign::from_id("SF20NH10_PM", 0.45).unwrap();
        assert_eq!((d.sf_frac, d.target_naoh, d.mode), (20.0, 10.0, MixMode::PremixedSodaAsh));
        assert!(MixDesign::from_id("SF10", 0.45).is_err());
        assert!(MixDesign::from_id("SF10NH08", 0.45).is_err());
    }

    #[test]
    fn solid_mode_table() {
        let t = build_mix_table(&[10.0, 20.0], &[6.0, 8.0, 10.0, 12.0], &[0.45], &[MixMode::SolidActivators])
            .unwrap();
        let ids: Vec<_> = t.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(
            ids,
            ["SF10NH6", "SF20NH6", "SF10NH8", "SF20NH8", "SF10NH10", "SF20NH10", "SF10NH12", "SF20NH12"]
        );
        assert!((t[3].hl_dosage - 7.41).abs() <= 0.01);
        assert!((t[3].sa_dosage - 10.59).abs() <= 0.01);
        assert_eq!(t[1].ggbfs_frac, 80.0);
    }

    #[test]
    fn control_row_has_no_solid_activators() {
        let t = build_mix_table(&[10.0], &[8.0], &[0.45], &[MixMode::ControlNaohSolution]).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].id, "SF10NH8_C");
        assert_eq!((t[0].hl_dosage, t[0].sa_dosage), (0.0, 0.0));
    }

    #[test]
    fn table_errors() {
        assert_eq!(
            build_mix_table(&[10.0], &[], &[0.45], &[MixMode::SolidActivators]),
            Err(MixError::EmptyInput("target NaOH"))
        );
        assert_eq!(
            build_mix_table(&[10.0], &[8.0], &[0.45, 0.5], &[MixMode::SolidActivators]),
            Err(MixError::DuplicateId("SF10NH8".into()))
        );
        assert!(matches!(
            build_mix_table(&[10.0], &[8.0], &[0.0], &[MixMode::SolidActivators]),
            Err(MixError::InvalidDesign { .. })
        ));
    }

    #[test]
    fn cost_examples() {
        let reg = Registry::builtin();
        let solid = MixDesign::new(10.0, 10.0, 0.45, MixMode::SolidActivators).unwrap();
        let c = activator_cost(&solid, &reg, 571.4).unwrap();
        assert_eq!(c.basis, CostBasis::Industrial);
        assert!((c.total - 3428.0).abs() <= 10.0, "{}", c.total);

        let control = MixDesign::new(10.0, 10.0, 0.45, MixMode::ControlNaohSolution).unwrap();
        let c = activator_cost(&control, &reg, 571.4).unwrap();
        assert!((c.total - 39427.0).abs() <= 5.0, "{}", c.total);

        let c = activator_cost(&solid, &reg, 0.0).unwrap();
        assert_eq!(c.total, 0.0);
    }

    #[test]
    fn missing_unit_cost_names_material() {
        let reg = Registry::parse(
            "[material]\nid=HL\nrole=activator\ndensity_kg_m3=2240\nunit_cost_per_kg=14\nCaO=72.8\nloi=25.69\n\
             [material]\nid=SA\nrole=activator\ndensity_kg_m3=2540\nNa2O=58.4\n",
        )
        .unwrap();
        let solid = MixDesign::new(10.0, 10.0, 0.45, MixMode::SolidActivators).unwrap();
        assert_eq!(
            activator_cost(&solid, &reg, 500.0),
            Err(MixError::MissingUnitCost("SA".into()))
        );
    }

    #[test]
    fn material_parts_by_mode() {
        let solid = MixDesign::new(20.0, 8.0, 0.45, MixMode::SolidActivators).unwrap();
        let parts = solid.material_parts();
        assert_eq!(parts["GGBFS"], 80.0);
        assert!((parts["SA"] - 10.6).abs() < 1e-12);
        let control = MixDesign::new(20.0, 8.0, 0.45, MixMode::ControlNaohSolution).unwrap();
        assert_eq!(control.material_parts()["NaOH"], 8.0);
    }

    proptest! {
        #[test]
        fn dosage_is_linear(a in 0.0..20.0f64, b in 0.0..20.0f64) {
            let da = activator_dosage(a).unwrap();
            let db = activator_dosage(b).unwrap();
            let dab = activator_dosage(a + b).unwrap();
            prop_assert!((dab.hydrated_lime - da.hydrated_lime - db.hydrated_lime).abs() < 1e-12);
            prop_assert!((dab.soda_ash - da.soda_ash - db.soda_ash).abs() < 1e-12);
        }

        #[test]
        fn soda_ash_to_lime_ratio(target in 0.01..30.0f64, sf in 0.0..50.0f64) {
            let d = MixDesign::new(sf, target, 0.45, MixMode::SolidActivators).unwrap();
            prop_assert!((d.sa_dosage / d.hl_dosage - 106.0 / 74.0).abs() < 1e-9);
        }

        #[test]
        fn cost_is_homogeneous(binder in 1.0..1000.0f64, k in 0.1..10.0f64, target in 1.0..15.0f64) {
            let reg = Registry::builtin();
            let d = MixDesign::new(10.0, target, 0.45, MixMode::SolidActivators).unwrap();
            let base = activator_cost(&d, &reg, binder).unwrap().total;
            let scaled = activator_cost(&d, &reg, binder * k).unwrap().total;
            prop_assert!((scaled - k * base).abs() <= 1e-9 * scaled.abs().max(1.0));
        }

        #[test]
        fn grade_ordering(binder in 1.0..1000.0f64, target in 0.5..15.0f64) {
            let reg = Registry::builtin();
            let d = MixDesign::new(10.0, target, 0.45, MixMode::SolidActivators).unwrap();
            let ind = activator_cost_with_basis(&d, &reg, binder, CostBasis::Industrial).unwrap().total;
            let naoh = activator_cost_with_basis(&d, &reg, binder, CostBasis::ControlNaoh).unwrap().total;
            let ana = activator_cost_with_basis(&d, &reg, binder, CostBasis::AnalyticalPowder).unwrap().total;
            prop_assert!(ana > naoh && naoh > ind);
        }
    }
}

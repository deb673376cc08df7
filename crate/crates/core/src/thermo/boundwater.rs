use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::hydroxides::CarbonationTerms;
use super::{MassLossProfile, ThermoError};
use crate::materials::Registry;
use crate::mixdesign::{MixDesign, MixMode};

/// Largest residual accepted when matching reported present-study values.
pub const CALIBRATION_TOLERANCE: f64 = 0.05;

/// Converts a CO2 loss from carbonated portlandite back to its water.
const CARBONATED_CH_FACTOR: f64 = 0.41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundWaterMethod {
    Bhatty,
    PaneHansen,
    Monteagudo,
    Deboucha,
    PresentStudy,
}

impl BoundWaterMethod {
    pub const ALL: [BoundWaterMethod; 5] = [
        BoundWaterMethod::Bhatty,
        BoundWaterMethod::PaneHansen,
        BoundWaterMethod::Monteagudo,
        BoundWaterMethod::Deboucha,
        BoundWaterMethod::PresentStudy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundWaterMethod::Bhatty => "bhatty",
            BoundWaterMethod::PaneHansen => "pane_hansen",
            BoundWaterMethod::Monteagudo => "monteagudo",
            BoundWaterMethod::Deboucha => "deboucha",
            BoundWaterMethod::PresentStudy => "present_study",
        }
    }

    pub fn needs_loi(self) -> bool {
        matches!(self, BoundWaterMethod::Deboucha | BoundWaterMethod::PresentStudy)
    }
}

impl fmt::Display for BoundWaterMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundWaterMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown bound-water method `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoiUnit {
    /// LOIs enter the mass balance as fractions; the deduction is scaled
    /// back to percent.
    Fraction,
    /// LOIs enter as percentages throughout.
    Percent,
}

/// Inputs to the LOI deduction. Masses are per unit sample mass; the `x`
/// values are replacement levels of each material relative to the binder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoiContext {
    pub sample_mass: f64,
    pub binder_mass: f64,
    pub water_binder: f64,
    pub x_ggbfs: f64,
    pub x_sf: f64,
    pub x_sa: f64,
    pub x_hl: f64,
    /// LOIs in percent.
    pub loi_ggbfs: f64,
    pub loi_sf: f64,
    pub loi_sa: f64,
    pub loi_hl: f64,
    pub unit: LoiUnit,
    /// Multiplier on `Ldc − Ldc_a` for the present-study estimate.
    pub correction_factor: f64,
    /// Mass drift added back in the Deboucha estimate, percent.
    pub mass_drift: f64,
}

impl LoiContext {
    fn lois(&self) -> (f64, f64) {
        let additives = self.loi_sf + self.loi_sa + self.loi_hl;
        match self.unit {
            LoiUnit::Fraction => (self.loi_ggbfs / 100.0, additives / 100.0),
            LoiUnit::Percent => (self.loi_ggbfs, additives),
        }
    }

    fn as_percent(&self, v: f64) -> f64 {
        match self.unit {
            LoiUnit::Fraction => 100.0 * v,
            LoiUnit::Percent => v,
        }
    }

    /// `m_precursor·LOI_precursor + m_additive·ΣLOI_additives`, in percent.
    pub fn present_study_deduction(&self) -> f64 {
        let (lp, la) = self.lois();
        let wb = self.water_binder;
        let mp = (self.sample_mass - self.binder_mass * (self.x_sf + self.x_sa + self.x_hl + wb))
            / (1.0 + lp);
        let ma = (self.sample_mass - self.binder_mass * (self.x_ggbfs + wb)) / (1.0 + la);
        self.as_percent(mp * lp + ma * la)
    }

    /// `m_c·LOI_c + m_A·LOI_A` with the additive share `x = x_SF + x_SA + x_HL`
    /// and the precursor as the cement-like component.
    pub fn deboucha_deduction(&self) -> f64 {
        let (lc, la) = self.lois();
        let wb = self.water_binder;
        let x = self.x_sf + self.x_sa + self.x_hl;
        let mc = (self.sample_mass - self.binder_mass * (x + wb)) / (1.0 + lc);
        let ma = (self.sample_mass - self.binder_mass * ((1.0 - x) + wb)) / (1.0 + la);
        self.as_percent(mc * lc + ma * la)
    }

    /// Builds the context for a mix under one reading of the mass balance.
    pub fn from_design(
        design: &MixDesign,
        registry: &Registry,
        interp: Interpretation,
    ) -> Result<Self, ThermoError> {
        let loi = |id: &str| -> Result<f64, ThermoError> {
            registry
                .get(id)
                .and_then(|m| m.loi())
                .ok_or_else(|| ThermoError::InvalidMix {
                    mix: design.id.clone(),
                    reason: format!("registry has no LOI for `{id}`"),
                })
        };
        let (loi_sa, loi_hl) = match design.mode {
            MixMode::ControlNaohSolution => (0.0, 0.0),
            _ => (loi("SA")?, loi("HL")?),
        };
        let solids_pb = design.solids_per_binder();
        let denom = match interp.fractions {
            FractionBasis::Binder => 100.0,
            FractionBasis::TotalSolids => 100.0 * solids_pb,
        };
        let water_solids_pb = design.w_s * solids_pb;
        let water_binder = match interp.water {
            WaterBasis::WaterToSolids => design.w_s,
            WaterBasis::WaterToBinder => water_solids_pb,
        };
        let binder_mass = 1.0
            / match interp.sample {
                SampleBasis::BinderOnly => 1.0,
                SampleBasis::Paste => solids_pb + water_solids_pb,
                SampleBasis::DriedPaste => solids_pb,
                SampleBasis::Mortar => solids_pb + design.binder_sand + water_solids_pb,
                SampleBasis::DriedMortar => solids_pb + design.binder_sand,
            };
        Ok(LoiContext {
            sample_mass: 1.0,
            binder_mass,
            water_binder,
            x_ggbfs: design.ggbfs_frac / denom,
            x_sf: design.sf_frac / denom,
            x_sa: design.sa_dosage / denom,
            x_hl: design.hl_dosage / denom,
            loi_ggbfs: loi("GGBFS")?,
            loi_sf: loi("SF")?,
            loi_sa,
            loi_hl,
            unit: interp.unit,
            correction_factor: CarbonationTerms::Full.base(),
            mass_drift: 0.0,
        })
    }
}

/// One bound-water estimate with the terms that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundWaterEstimate {
    pub method: BoundWaterMethod,
    /// Percent.
    pub w_b: f64,
    pub ldc_a: f64,
    /// Multiplier applied to the decarbonation term.
    pub carbonate_factor: f64,
    pub loi_deduction: Option<f64>,
}

/// Bound water by one method. Ldh and Ldx are the window totals, so free
/// water never enters.
pub fn bound_water(
    profile: &MassLossProfile,
    ldc_a: f64,
    method: BoundWaterMethod,
    loi: Option<&LoiContext>,
) -> Result<BoundWaterEstimate, ThermoError> {
    let base = profile.ldh_total() + profile.ldx_total();
    let net = profile.ldc - ldc_a;
    let ctx = if method.needs_loi() {
        Some(loi.ok_or(ThermoError::MissingLoiContext(method))?)
    } else {
        None
    };
    let (factor, carbonate, deduction) = match method {
        BoundWaterMethod::Bhatty => (CARBONATED_CH_FACTOR, CARBONATED_CH_FACTOR * profile.ldc, None),
        BoundWaterMethod::PaneHansen => (1.0, net, None),
        BoundWaterMethod::Monteagudo => (CARBONATED_CH_FACTOR, CARBONATED_CH_FACTOR * net, None),
        BoundWaterMethod::Deboucha => {
            let c = ctx.expect("checked above");
            (
                CARBONATED_CH_FACTOR,
                CARBONATED_CH_FACTOR * net + c.mass_drift,
                Some(c.deboucha_deduction()),
            )
        }
        BoundWaterMethod::PresentStudy => {
            let c = ctx.expect("checked above");
            (c.correction_factor, c.correction_factor * net, Some(c.present_study_deduction()))
        }
    };
    Ok(BoundWaterEstimate {
        method,
        w_b: base + carbonate - deduction.unwrap_or(0.0),
        ldc_a,
        carbonate_factor: factor,
        loi_deduction: deduction,
    })
}

/// All methods side by side. Methods that need an LOI context are listed
/// as skipped when none is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundWaterReport {
    pub ldc_a: f64,
    pub estimates: Vec<BoundWaterEstimate>,
    pub skipped: Vec<BoundWaterMethod>,
    pub loi_context: Option<LoiContext>,
}

impl BoundWaterReport {
    pub fn get(&self, method: BoundWaterMethod) -> Option<f64> {
        self.estimates
            .iter()
            .find(|e| e.method == method)
            .map(|e| e.w_b)
    }
}

pub fn bound_water_report(
    profile: &MassLossProfile,
    ldc_a: f64,
    loi: Option<&LoiContext>,
) -> BoundWaterReport {
    let mut estimates = Vec::new();
    let mut skipped = Vec::new();
    for method in BoundWaterMethod::ALL {
        match bound_water(profile, ldc_a, method, loi) {
            Ok(e) => estimates.push(e),
            Err(_) => skipped.push(method),
        }
    }
    BoundWaterReport {
        ldc_a,
        estimates,
        skipped,
        loi_context: loi.copied(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FractionBasis {
    /// Replacement levels per unit binder (GGBFS + SF).
    Binder,
    /// Per unit of all dry solids, activators included.
    TotalSolids,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaterBasis {
    /// The mix's w/s used as W/B directly.
    WaterToSolids,
    /// w/s converted to water per unit binder.
    WaterToBinder,
}

/// What one unit of tested sample mass contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleBasis {
    BinderOnly,
    Paste,
    DriedPaste,
    Mortar,
    DriedMortar,
}

/// One reading of how the mass-balance inputs map onto a mix design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interpretation {
    pub fractions: FractionBasis,
    pub water: WaterBasis,
    pub sample: SampleBasis,
    pub unit: LoiUnit,
}

impl Interpretation {
    /// The reading that reproduces the reported present-study values.
    pub const CALIBRATED: Interpretation = Interpretation {
        fractions: FractionBasis::Binder,
        water: WaterBasis::WaterToBinder,
        sample: SampleBasis::DriedMortar,
        unit: LoiUnit::Percent,
    };

    pub fn all() -> Vec<Interpretation> {
        let mut out = Vec::with_capacity(40);
        for fractions in [FractionBasis::Binder, FractionBasis::TotalSolids] {
            for water in [WaterBasis::WaterToSolids, WaterBasis::WaterToBinder] {
                for sample in [
                    SampleBasis::BinderOnly,
                    SampleBasis::Paste,
                    SampleBasis::DriedPaste,
                    SampleBasis::Mortar,
                    SampleBasis::DriedMortar,
                ] {
                    for unit in [LoiUnit::Fraction, LoiUnit::Percent] {
                        out.push(Interpretation {
                            fractions,
                            water,
                            sample,
                            unit,
                        });
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fractions={:?} water={:?} sample={:?} loi={:?}",
            self.fractions, self.water, self.sample, self.unit
        )
    }
}

/// A mix with its measured profile and the value it should reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCase {
    pub design: MixDesign,
    pub profile: MassLossProfile,
    pub ldc_a: f64,
    pub reported: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateFit {
    pub interpretation: Interpretation,
    pub predicted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
}

/// Deduction each case would need for the uncorrected estimate to hit its
/// reported value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub implied: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub tolerance: f64,
    /// Sorted by worst residual, best first.
    pub candidates: Vec<CandidateFit>,
    pub matched: bool,
    pub gap: GapSummary,
}

impl CalibrationReport {
    pub fn best(&self) -> &CandidateFit {
        &self.candidates[0]
    }
}

/// Tries every [`Interpretation`] against reported present-study values and
/// reports the closest, whether it is within `tolerance`, and the deduction
/// gap implied by the data.
pub fn calibrate_present_study(
    cases: &[CalibrationCase],
    registry: &Registry,
    tolerance: f64,
) -> Result<CalibrationReport, ThermoError> {
    if cases.is_empty() {
        return Err(ThermoError::NoCases);
    }
    let mut candidates = Vec::new();
    for interp in Interpretation::all() {
        let mut predicted = Vec::with_capacity(cases.len());
        for case in cases {
            let ctx = LoiContext::from_design(&case.design, registry, interp)?;
            let e = bound_water(&case.profile, case.ldc_a, BoundWaterMethod::PresentStudy, Some(&ctx))?;
            predicted.push(e.w_b);
        }
        let residuals: Vec<f64> = predicted
            .iter()
            .zip(cases)
            .map(|(p, c)| p - c.reported)
            .collect();
        let max_abs_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        candidates.push(CandidateFit {
            interpretation: interp,
            predicted,
            residuals,
            max_abs_residual,
        });
    }
    candidates.sort_by(|a, b| a.max_abs_residual.total_cmp(&b.max_abs_residual));

    let factor = CarbonationTerms::Full.base();
    let implied: Vec<f64> = cases
        .iter()
        .map(|c| {
            c.profile.ldh_total() + c.profile.ldx_total() + factor * (c.profile.ldc - c.ldc_a)
                - c.reported
        })
        .collect();
    let gap = GapSummary {
        mean: implied.iter().sum::<f64>() / implied.len() as f64,
        min: implied.iter().copied().fold(f64::INFINITY, f64::min),
        max: implied.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        implied,
    };
    let matched = candidates[0].max_abs_residual <= tolerance;
    Ok(CalibrationReport {
        tolerance,
        candidates,
        matched,
        gap,
    })
}

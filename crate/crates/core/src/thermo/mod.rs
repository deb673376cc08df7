//! Thermogravimetric analysis of hardened binder samples.
//!
//! A [`Thermogram`] is cut into dehydration (Ldh), dehydroxylation (Ldx) and
//! decarbonation (Ldc) windows by a [`SegmentationScheme`]. The resulting
//! [`MassLossProfile`] feeds the bound-water estimators and the free
//! hydroxide balance. The anhydrous decarbonation `Ldc_a` of the raw blend
//! corrects the Ldc window for carbonates that were never hydrated.

mod boundwater;
mod dtg;
mod hydroxides;
mod segment;
mod thermogram;

use thiserror::Error;

pub use boundwater::{
    bound_water, bound_water_report, calibrate_present_study, BoundWaterEstimate,
    BoundWaterMethod, BoundWaterReport, CalibrationCase, CalibrationReport, CandidateFit,
    FractionBasis, GapSummary, Interpretation, LoiContext, LoiUnit, SampleBasis, WaterBasis,
    CALIBRATION_TOLERANCE,
};
pub use dtg::{dtg_curve, dtg_peaks, DtgPeak, DtgPoint, DEFAULT_DTG_WINDOW};
pub use hydroxides::{
    correction_factor, free_hydroxides, CarbonationTerms, HydroxideReport, MhVariant,
    CA_OH2_MOLAR_MASS, CO2_MOLAR_MASS, H2O_MOLAR_MASS, MG_OH2_MOLAR_MASS, AL_OH3_MOLAR_MASS,
};
pub use segment::{
    anhydrous_ldca, mix_ldca, segment_losses, MassLossProfile, Normalization, SchemeName,
    SegmentationScheme, TempRange, REFERENCE_TEMPERATURE,
};
pub use thermogram::{ThermoSample, Thermogram, MASS_NOISE_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error("thermogram needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid thermogram at sample {index}: {reason}")]
    InvalidThermogram { index: usize, reason: String },
    #[error("{temperature} °C is outside the recorded span {lo}–{hi} °C")]
    OutOfRange { temperature: f64, lo: f64, hi: f64 },
    #[error("invalid segmentation scheme: {0}")]
    InvalidScheme(String),
    #[error("mass increases over {lo}–{hi} °C")]
    NegativeLoss { lo: f64, hi: f64 },
    #[error("no LdCa value for material `{0}`")]
    UnknownMaterial(String),
    #[error("negative parts for material `{0}`")]
    NegativeParts(String),
    #[error("{0} needs an LOI context")]
    MissingLoiContext(BoundWaterMethod),
    #[error("profile has {got} Ldx segments; the hydroxide balance needs exactly 2")]
    UnsplitProfile { got: usize },
    #[error("smoothing window {window} °C exceeds the {span} °C span")]
    WindowTooLarge { window: f64, span: f64 },
    #[error("smoothing window must be finite and non-negative, got {0}")]
    InvalidWindow(f64),
    #[error("calibration needs at least one case")]
    NoCases,
    #[error("mix `{mix}`: {reason}")]
    InvalidMix { mix: String, reason: String },
}

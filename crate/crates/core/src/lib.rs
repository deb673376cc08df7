//! Analytics for one-part alkali-activated slag binders.
//!
//! The crate covers five areas that share a small set of domain types:
//!
//! * [`materials`]: raw-material registry, oxide chemistry and precursor indices.
//! * [`mixdesign`]: equivalent-NaOH activator dosing, water demand, mix tables and costing.
//! * [`rheology`]: stepped-ramp flow curves, yield-stress model fits and hysteresis.
//! * [`thermo`]: thermogram segmentation, bound-water estimates and free hydroxides.
//! * [`microanalysis`]: EDS molar ratios and compressive-strength development.
//!
//! Everything is a pure function over immutable inputs.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod csvio;
pub mod keyvalue;
mod linalg;
pub mod materials;
pub mod microanalysis;
pub mod mixdesign;
pub mod rheology;
pub mod thermo;

pub use materials::{
    AnhydrousTgaRef, MaterialRole, MaterialSpec, Oxide, OxideComposition, PrecursorReport,
    Registry,
};
pub use microanalysis::{EdsComposition, Element, StrengthRecord, StrengthSeries};
pub use mixdesign::{CostBasis, CostBreakdown, MixDesign, MixMode};
pub use rheology::{Branch, FlowCurve, FlowPoint, RheoFit, RheoModel, ShearBehavior};
pub use thermo::{
    BoundWaterMethod, BoundWaterReport, HydroxideReport, LoiContext, MassLossProfile,
    SegmentationScheme, Thermogram,
};

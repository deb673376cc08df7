//! Stepped-ramp flow curves and yield-stress models.
//!
//! The descending branch of a 0 → 100 → 0 s⁻¹ ramp is fitted with
//!
//! * Bingham: `τ = τ₀ + μ_p·γ̇`
//! * Modified Bingham: `τ = τ₀ + μ_p·γ̇ + C·γ̇²`
//! * Herschel–Bulkley: `τ = τ₀ + K·γ̇ⁿ`
//!
//! and the sign of `C/μ_p` classifies the paste as shear thinning or
//! thickening. Hysteresis between the two branches measures thixotropy.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Singular};

pub const MIN_POINTS: usize = 4;
pub const MIN_HB_POINTS: usize = 5;

/// Fits with R² at or below this are flagged as poor.
pub const R2_QUALITY_BAR: f64 = 0.95;

const BEHAVIOR_TOLERANCE: f64 = 1e-9;

pub const HB_EXPONENT_RANGE: (f64, f64) = (0.1, 2.0);
const HB_SEARCH_TOLERANCE: f64 = 1e-4;
const HB_GRID_STEPS: usize = 38;
/// HB exponents this close to 1 classify as Bingham-plastic.
const HB_BEHAVIOR_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RheoError {
    #[error("flow curve needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("point {index}: {reason}")]
    InvalidPoint { index: usize, reason: String },
    #[error("shear rate is not strictly {expected} at point {index}")]
    NonMonotone { index: usize, expected: &'static str },
    #[error("{0} branch is empty")]
    EmptyBranch(Branch),
    #[error("model must be fitted on the {expected} branch, got {got}")]
    WrongBranch { expected: Branch, got: Branch },
    #[error("shear rates are not distinct enough to fit the model")]
    SingularSystem,
    #[error("exponent search could not bracket a minimum")]
    NoConvergence,
    #[error("up and down branches share no shear-rate range")]
    NoOverlap,
    #[error("{rates} shear rates but {stresses} stresses")]
    LengthMismatch { rates: usize, stresses: usize },
    #[error("cannot aggregate an empty set of fits")]
    NoFits,
    #[error("cannot aggregate fits of different models")]
    MixedModels,
}

impl From<Singular> for RheoError {
    fn from(_: Singular) -> Self {
        RheoError::SingularSystem
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Up,
    Down,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Up => "up",
            Branch::Down => "down",
        })
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "up" => Ok(Branch::Up),
            "down" => Ok(Branch::Down),
            other => Err(format!("unknown branch `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowPoint {
    /// s⁻¹
    pub shear_rate: f64,
    /// Pa
    pub shear_stress: f64,
    /// s
    pub hold_time: f64,
}

impl FlowPoint {
    pub fn new(shear_rate: f64, shear_stress: f64, hold_time: f64) -> Self {
        Self {
            shear_rate,
            shear_stress,
            hold_time,
        }
    }
}

/// One branch of a stepped ramp. Shear rate rises strictly on the up branch
/// and falls strictly on the down branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveRepr", into = "CurveRepr")]
pub struct FlowCurve {
    points: Vec<FlowPoint>,
    branch: Branch,
}

#[derive(Serialize, Deserialize)]
struct CurveRepr {
    branch: Branch,
    points: Vec<FlowPoint>,
}

impl TryFrom<CurveRepr> for FlowCurve {
    type Error = RheoError;

    fn try_from(r: CurveRepr) -> Result<Self, Self::Error> {
        FlowCurve::new(r.points, r.branch)
    }
}

impl From<FlowCurve> for CurveRepr {
    fn from(c: FlowCurve) -> Self {
        CurveRepr {
            branch: c.branch,
            points: c.points,
        }
    }
}

impl FlowCurve {
    pub fn new(points: Vec<FlowPoint>, branch: Branch) -> Result<Self, RheoError> {
        if points.len() < MIN_POINTS {
            return Err(RheoError::TooFewPoints {
                needed: MIN_POINTS,
                got: points.len(),
            });
        }
        for (index, p) in points.iter().enumerate() {
            let reason = if !(p.shear_rate >= 0.0) || !p.shear_rate.is_finite() {
                "shear rate must be finite and non-negative"
            } else if !(p.shear_stress >= 0.0) || !p.shear_stress.is_finite() {
                "shear stress must be finite and non-negative"
            } else if !(p.hold_time > 0.0) {
                "hold time must be positive"
            } else {
                continue;
            };
            return Err(RheoError::InvalidPoint {
                index,
                reason: reason.into(),
            });
        }
        for (i, w) in points.windows(2).enumerate() {
            let ok = match branch {
                Branch::Up => w[1].shear_rate > w[0].shear_rate,
                Branch::Down => w[1].shear_rate < w[0].shear_rate,
            };
            if !ok {
                return Err(RheoError::NonMonotone {
                    index: i + 1,
                    expected: match branch {
                        Branch::Up => "increasing",
                        Branch::Down => "decreasing",
                    },
                });
            }
        }
        Ok(Self { points, branch })
    }

    /// Builds a curve from `(shear_rate, shear_stress)` pairs with a uniform hold.
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (f64, f64)>,
        hold_time: f64,
        branch: Branch,
    ) -> Result<Self, RheoError> {
        let points = pairs
            .into_iter()
            .map(|(r, s)| FlowPoint::new(r, s, hold_time))
            .collect();
        Self::new(points, branch)
    }

    pub fn points(&self) -> &[FlowPoint] {
        &self.points
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn rates(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.shear_rate).collect()
    }

    pub fn stresses(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.shear_stress).collect()
    }

    pub fn min_rate(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.shear_rate)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_rate(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.shear_rate)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Points in ascending shear-rate order.
    fn ascending(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<_> = self
            .points
            .iter()
            .map(|p| (p.shear_rate, p.shear_stress))
            .collect();
        if self.branch == Branch::Down {
            pts.reverse();
        }
        pts
    }
}

/// Target shear protocol. Pre-shear and rest are recorded as metadata; the
/// ramp endpoints and per-step hold are checked against data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShearProtocol {
    pub pre_shear_rate: f64,
    pub pre_shear_time: f64,
    pub rest_time: f64,
    pub ramp_floor: f64,
    pub ramp_ceiling: f64,
    pub step_hold: f64,
    pub rate_tolerance: f64,
    pub hold_tolerance: f64,
}

impl Default for ShearProtocol {
    fn default() -> Self {
        Self {
            pre_shear_rate: 100.0,
            pre_shear_time: 30.0,
            rest_time: 45.0,
            ramp_floor: 0.0,
            ramp_ceiling: 100.0,
            step_hold: 20.0,
            rate_tolerance: 0.5,
            hold_tolerance: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Deviation {
    RampCeiling {
        branch: Branch,
        observed: f64,
        expected: f64,
    },
    RampFloor {
        branch: Branch,
        observed: f64,
        expected: f64,
    },
    HoldTime {
        branch: Branch,
        step: usize,
        shear_rate: f64,
        observed: f64,
        expected: f64,
    },
}

impl fmt::Display for Deviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deviation::RampCeiling {
                branch,
                observed,
                expected,
            } => write!(f, "{branch} branch: ramp ceiling {observed} < {expected}"),
            Deviation::RampFloor {
                branch,
                observed,
                expected,
            } => write!(f, "{branch} branch: ramp floor {observed} > {expected}"),
            Deviation::HoldTime {
                branch,
                step,
                shear_rate,
                observed,
                expected,
            } => write!(
                f,
                "{branch} branch step {step} at {shear_rate} 1/s: hold {observed} s != {expected} s"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolVerdict {
    pub deviations: Vec<Deviation>,
}

impl ProtocolVerdict {
    pub fn conforms(&self) -> bool {
        self.deviations.is_empty()
    }
}

/// Compares both branches with the target protocol. Deviations are reported,
/// never used to reject data.
pub fn validate_protocol(
    up: Option<&FlowCurve>,
    down: Option<&FlowCurve>,
    protocol: &ShearProtocol,
) -> Result<ProtocolVerdict, RheoError> {
    let up = up.ok_or(RheoError::EmptyBranch(Branch::Up))?;
    let down = down.ok_or(RheoError::EmptyBranch(Branch::Down))?;
    let mut deviations = Vec::new();
    for curve in [up, down] {
        let branch = curve.branch();
        let (lo, hi) = (curve.min_rate(), curve.max_rate());
        if hi < protocol.ramp_ceiling - protocol.rate_tolerance {
            deviations.push(Deviation::RampCeiling {
                branch,
                observed: hi,
                expected: protocol.ramp_ceiling,
            });
        }
        if lo > protocol.ramp_floor + protocol.rate_tolerance {
            deviations.push(Deviation::RampFloor {
                branch,
                observed: lo,
                expected: protocol.ramp_floor,
            });
        }
        for (step, p) in curve.points().iter().enumerate() {
            if (p.hold_time - protocol.step_hold).abs() > protocol.hold_tolerance {
                deviations.push(Deviation::HoldTime {
                    branch,
                    step,
                    shear_rate: p.shear_rate,
                    observed: p.hold_time,
                    expected: protocol.step_hold,
                });
            }
        }
    }
    Ok(ProtocolVerdict { deviations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RheoModel {
    Bingham,
    ModifiedBingham,
    HerschelBulkley,
}

impl fmt::Display for RheoModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RheoModel::Bingham => "bingham",
            RheoModel::ModifiedBingham => "modified_bingham",
            RheoModel::HerschelBulkley => "herschel_bulkley",
        })
    }
}

impl FromStr for RheoModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bingham" => Ok(RheoModel::Bingham),
            "mb" | "modified_bingham" => Ok(RheoModel::ModifiedBingham),
            "hb" | "herschel_bulkley" => Ok(RheoModel::HerschelBulkley),
            other => Err(format!("unknown model `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShearBehavior {
    ShearThinning,
    ShearThickening,
    BinghamPlastic,
}

/// Classifies by the sign of `c / mu_p`. With `mu_p = 0` the sign of `c`
/// decides.
pub fn classify(mu_p: f64, c: f64) -> ShearBehavior {
    let ratio = if mu_p != 0.0 {
        c / mu_p
    } else if c == 0.0 {
        0.0
    } else {
        c.signum()
    };
    if ratio.abs() <= BEHAVIOR_TOLERANCE {
        ShearBehavior::BinghamPlastic
    } else if ratio < 0.0 {
        ShearBehavior::ShearThinning
    } else {
        ShearBehavior::ShearThickening
    }
}

/// A fitted flow model.
///
/// For Herschel–Bulkley the consistency `K` is stored in `c`, the flow index
/// in `flow_index`, and `mu_p` is zero; behaviour then follows `n` vs 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RheoFit {
    pub model: RheoModel,
    /// Pa
    pub tau0: f64,
    /// Pa·s
    pub mu_p: f64,
    /// Pa·s² (MB), Pa·sⁿ (HB)
    pub c: f64,
    pub flow_index: Option<f64>,
    pub r2: f64,
    pub behavior: ShearBehavior,
    /// HB only: yield stress came out negative.
    pub negative_yield: bool,
    /// R² at or below the 0.95 quality bar.
    pub low_r2: bool,
    pub n_points: usize,
}

impl RheoFit {
    pub fn predict(&self, shear_rate: f64) -> f64 {
        match self.model {
            RheoModel::Bingham | RheoModel::ModifiedBingham => {
                self.tau0 + self.mu_p * shear_rate + self.c * shear_rate * shear_rate
            }
            RheoModel::HerschelBulkley => {
                let n = self.flow_index.unwrap_or(1.0);
                self.tau0 + self.c * power(shear_rate, n)
            }
        }
    }

    /// `c / mu_p`, the thinning/thickening indicator.
    pub fn curvature_ratio(&self) -> Option<f64> {
        (self.mu_p != 0.0).then(|| self.c / self.mu_p)
    }
}

/// `x^n` with `0^n = 0` for the exponents the HB search visits.
fn power(x: f64, n: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(n)
    }
}

/// Coefficient of determination, clamped to [0, 1]. A constant response
/// that the model reproduces counts as a perfect fit.
pub fn r_squared(observed: &[f64], predicted: &[f64]) -> f64 {
    let n = observed.len() as f64;
    let mean = observed.iter().sum::<f64>() / n;
    let ss_tot: f64 = observed.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = observed
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p).powi(2))
        .sum();
    let scale = observed.iter().map(|y| y * y).sum::<f64>().max(f64::MIN_POSITIVE);
    if ss_tot <= 1e-24 * scale {
        return if ss_res <= 1e-20 * scale { 1.0 } else { 0.0 };
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Polynomial least squares of the given degree on `γ̇ / max γ̇`, returned in
/// the original units. Scaling keeps the normal equations well conditioned
/// over a 0–100 s⁻¹ ramp.
fn fit_polynomial(rates: &[f64], stresses: &[f64], degree: usize) -> Result<Vec<f64>, RheoError> {
    let scale = rates.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if !(scale > 0.0) {
        return Err(RheoError::SingularSystem);
    }
    let design: Vec<Vec<f64>> = rates
        .iter()
        .map(|r| {
            let x = r / scale;
            (0..=degree).map(|k| x.powi(k as i32)).collect()
        })
        .collect();
    let coeffs = linalg::least_squares(&design, stresses)?;
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| a / scale.powi(k as i32))
        .collect())
}

fn fit_polynomial_model(
    model: RheoModel,
    rates: &[f64],
    stresses: &[f64],
) -> Result<RheoFit, RheoError> {
    let degree = if model == RheoModel::Bingham { 1 } else { 2 };
    let coeffs = fit_polynomial(rates, stresses, degree)?;
    let (tau0, mu_p) = (coeffs[0], coeffs[1]);
    let c = coeffs.get(2).copied().unwrap_or(0.0);
    let predicted: Vec<f64> = rates.iter().map(|r| tau0 + mu_p * r + c * r * r).collect();
    let r2 = r_squared(stresses, &predicted);
    Ok(RheoFit {
        model,
        tau0,
        mu_p,
        c,
        flow_index: None,
        r2,
        behavior: classify(mu_p, c),
        negative_yield: false,
        low_r2: r2 <= R2_QUALITY_BAR,
        n_points: rates.len(),
    })
}

fn require_down(curve: &FlowCurve) -> Result<(), RheoError> {
    if curve.branch() != Branch::Down {
        return Err(RheoError::WrongBranch {
            expected: Branch::Down,
            got: curve.branch(),
        });
    }
    Ok(())
}

/// Modified Bingham fit on a descending branch.
pub fn fit_modified_bingham(curve: &FlowCurve) -> Result<RheoFit, RheoError> {
    require_down(curve)?;
    fit_points(RheoModel::ModifiedBingham, &curve.rates(), &curve.stresses())
}

/// Bingham fit on a descending branch.
pub fn fit_bingham(curve: &FlowCurve) -> Result<RheoFit, RheoError> {
    require_down(curve)?;
    fit_points(RheoModel::Bingham, &curve.rates(), &curve.stresses())
}

/// Herschel–Bulkley fit on a descending branch. A negative yield stress is
/// flagged, not rejected.
pub fn fit_herschel_bulkley(curve: &FlowCurve) -> Result<RheoFit, RheoError> {
    require_down(curve)?;
    fit_points(RheoModel::HerschelBulkley, &curve.rates(), &curve.stresses())
}

pub fn fit_curve(model: RheoModel, curve: &FlowCurve) -> Result<RheoFit, RheoError> {
    match model {
        RheoModel::Bingham => fit_bingham(curve),
        RheoModel::ModifiedBingham => fit_modified_bingham(curve),
        RheoModel::HerschelBulkley => fit_herschel_bulkley(curve),
    }
}

/// Fits raw `(γ̇, τ)` samples without branch checks.
pub fn fit_points(model: RheoModel, rates: &[f64], stresses: &[f64]) -> Result<RheoFit, RheoError> {
    if rates.len() != stresses.len() {
        return Err(RheoError::LengthMismatch {
            rates: rates.len(),
            stresses: stresses.len(),
        });
    }
    match model {
        RheoModel::Bingham | RheoModel::ModifiedBingham => {
            let needed = if model == RheoModel::Bingham { 2 } else { 3 };
            if rates.len() < needed {
                return Err(RheoError::TooFewPoints {
                    needed,
                    got: rates.len(),
                });
            }
            fit_polynomial_model(model, rates, stresses)
        }
        RheoModel::HerschelBulkley => fit_hb_points(rates, stresses),
    }
}

struct HbTrial {
    n: f64,
    tau0: f64,
    k: f64,
    sse: f64,
}

fn hb_inner(xs: &[f64], stresses: &[f64], scale: f64, n: f64) -> Result<HbTrial, Singular> {
    let design: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, power(x, n)]).collect();
    let b = linalg::least_squares(&design, stresses)?;
    let sse = design
        .iter()
        .zip(stresses)
        .map(|(row, y)| (y - b[0] - b[1] * row[1]).powi(2))
        .sum();
    Ok(HbTrial {
        n,
        tau0: b[0],
        k: b[1] / scale.powf(n),
        sse,
    })
}

fn fit_hb_points(rates: &[f64], stresses: &[f64]) -> Result<RheoFit, RheoError> {
    if rates.len() < MIN_HB_POINTS {
        return Err(RheoError::TooFewPoints {
            needed: MIN_HB_POINTS,
            got: rates.len(),
        });
    }
    let zeros = rates.iter().filter(|&&r| r == 0.0).count();
    if zeros > 1 || rates.iter().any(|&r| !(r >= 0.0)) {
        return Err(RheoError::InvalidPoint {
            index: rates.iter().position(|&r| !(r > 0.0)).unwrap_or(0),
            reason: "HB needs positive shear rates, with at most one zero".into(),
        });
    }
    let scale = rates.iter().fold(0.0f64, |m, &r| m.max(r));
    let xs: Vec<f64> = rates.iter().map(|r| r / scale).collect();
    let (lo, hi) = HB_EXPONENT_RANGE;

    // Coarse grid to bracket the minimum, then golden-section inside it.
    let step = (hi - lo) / HB_GRID_STEPS as f64;
    let grid: Vec<Option<HbTrial>> = (0..=HB_GRID_STEPS)
        .map(|i| hb_inner(&xs, stresses, scale, lo + step * i as f64).ok())
        .collect();
    if grid.iter().all(Option::is_none) {
        return Err(RheoError::SingularSystem);
    }
    let best_idx = grid
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.as_ref().filter(|t| t.sse.is_finite()).map(|t| (i, t.sse)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .ok_or(RheoError::NoConvergence)?;

    let mut a = lo + step * best_idx.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_idx + 1) as f64).min(hi);
    let sse_at = |n: f64| {
        hb_inner(&xs, stresses, scale, n)
            .map(|t| t.sse)
            .unwrap_or(f64::INFINITY)
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (sse_at(c), sse_at(d));
    while b - a > HB_SEARCH_TOLERANCE {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sse_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sse_at(d);
        }
    }

    let mut best = grid.into_iter().nth(best_idx).flatten().expect("finite grid minimum");
    for n in [a, b, c, d, 0.5 * (a + b)] {
        if let Ok(t) = hb_inner(&xs, stresses, scale, n) {
            if t.sse < best.sse {
                best = t;
            }
        }
    }
    if !best.sse.is_finite() {
        return Err(RheoError::NoConvergence);
    }

    let predicted: Vec<f64> = rates.iter().map(|&r| best.tau0 + best.k * power(r, best.n)).collect();
    let r2 = r_squared(stresses, &predicted);
    let behavior = if (best.n - 1.0).abs() <= HB_BEHAVIOR_TOLERANCE {
        ShearBehavior::BinghamPlastic
    } else if best.n < 1.0 {
        ShearBehavior::ShearThinning
    } else {
        ShearBehavior::ShearThickening
    };
    Ok(RheoFit {
        model: RheoModel::HerschelBulkley,
        tau0: best.tau0,
        mu_p: 0.0,
        c: best.k,
        flow_index: Some(best.n),
        r2,
        behavior,
        negative_yield: best.tau0 < 0.0,
        low_r2: r2 <= R2_QUALITY_BAR,
        n_points: rates.len(),
    })
}

/// Mean and sample standard deviation of one coefficient across runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    /// `None` for a single run.
    pub std_dev: Option<f64>,
}

impl Spread {
    fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_dev = (values.len() > 1).then(|| {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        });
        Spread { mean, std_dev }
    }
}

/// Mean-of-coefficients summary over repeated runs of one mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub model: RheoModel,
    pub runs: usize,
    pub tau0: Spread,
    pub mu_p: Spread,
    pub c: Spread,
    pub flow_index: Option<Spread>,
    pub behavior: ShearBehavior,
}

pub fn aggregate_fits(fits: &[RheoFit]) -> Result<FitSummary, RheoError> {
    let first = fits.first().ok_or(RheoError::NoFits)?;
    if fits.iter().any(|f| f.model != first.model) {
        return Err(RheoError::MixedModels);
    }
    let collect = |f: fn(&RheoFit) -> f64| fits.iter().map(f).collect::<Vec<_>>();
    let tau0 = Spread::of(&collect(|f| f.tau0));
    let mu_p = Spread::of(&collect(|f| f.mu_p));
    let c = Spread::of(&collect(|f| f.c));
    let flow_index = (first.model == RheoModel::HerschelBulkley)
        .then(|| Spread::of(&collect(|f| f.flow_index.unwrap_or(f64::NAN))));
    let behavior = match &flow_index {
        Some(n) if (n.mean - 1.0).abs() <= HB_BEHAVIOR_TOLERANCE => ShearBehavior::BinghamPlastic,
        Some(n) if n.mean < 1.0 => ShearBehavior::ShearThinning,
        Some(_) => ShearBehavior::ShearThickening,
        None => classify(mu_p.mean, c.mean),
    };
    Ok(FitSummary {
        model: first.model,
        runs: fits.len(),
        tau0,
        mu_p,
        c,
        flow_index,
        behavior,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    /// Up branch above the down branch.
    Thixotropic,
    Rheopectic,
    NoLoop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HysteresisResult {
    /// Signed ∫(τ_up − τ_down) dγ̇ over the shared range, Pa/s.
    pub loop_area: f64,
    pub kind: LoopKind,
    pub rate_range: (f64, f64),
}

fn interpolate(pts: &[(f64, f64)], x: f64) -> f64 {
    let i = pts.partition_point(|p| p.0 < x);
    if i == 0 {
        return pts[0].1;
    }
    if i == pts.len() {
        return pts[pts.len() - 1].1;
    }
    let (x0, y0) = pts[i - 1];
    let (x1, y1) = pts[i];
    if x1 == x0 {
        return y1;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Area between the up and down branches. Both branches are linearly
/// interpolated onto the union of their shear rates inside the shared
/// range and integrated with the trapezoid rule, so the result is the exact
/// integral of the piecewise-linear difference and flips sign when the
/// branches are swapped.
pub fn hysteresis_area(up: &FlowCurve, down: &FlowCurve) -> Result<HysteresisResult, RheoError> {
    let a = up.ascending();
    let b = down.ascending();
    let lo = a[0].0.max(b[0].0);
    let hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
    if !(hi > lo) {
        return Err(RheoError::NoOverlap);
    }
    let mut xs: Vec<f64> = a
        .iter()
        .chain(&b)
        .map(|p| p.0)
        .filter(|&x| x > lo && x < hi)
        .chain([lo, hi])
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let diff: Vec<f64> = xs
        .iter()
        .map(|&x| interpolate(&a, x) - interpolate(&b, x))
        .collect();
    let area: f64 = xs
        .windows(2)
        .zip(diff.windows(2))
        .map(|(x, d)| 0.5 * (d[0] + d[1]) * (x[1] - x[0]))
        .sum();
    let scale = a.iter().chain(&b).map(|p| p.1.abs()).fold(0.0, f64::max) * (hi - lo);
    let kind = if area.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        LoopKind::NoLoop
    } else if area > 0.0 {
        LoopKind::Thixotropic
    } else {
        LoopKind::Rheopectic
    };
    Ok(HysteresisResult {
        loop_area: area,
        kind,
        rate_range: (lo, hi),
    })
}

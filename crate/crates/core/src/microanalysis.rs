//! EDS atomic-percent bookkeeping and compressive-strength development.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the element total. Spot averages of real samples overshoot
/// 100 by a few percent.
pub const EDS_CLOSURE_LIMIT: f64 = 110.0;

pub const STRENGTH_AGES: [u32; 3] = [7, 28, 120];
pub const DEFAULT_CUBES: u32 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MicroError {
    #[error("{0} is zero in the denominator")]
    ZeroDenominator(Element),
    #[error("early {num}/{den} ratio is zero")]
    ZeroEarlyRatio { num: Element, den: Element },
    #[error("{sample}: {element} = {value} must be finite and non-negative")]
    NegativeElement {
        sample: String,
        element: Element,
        value: f64,
    },
    #[error("{sample}: element total {total:.2} exceeds {limit}")]
    ClosureExceeded {
        sample: String,
        total: f64,
        limit: f64,
    },
    #[error("{sample}: age {age} d is not one of 7, 28, 120")]
    InvalidAge { sample: String, age: u32 },
    #[error("{sample}: strength must be positive, got {value}")]
    InvalidStrength { sample: String, value: f64 },
    #[error("records belong to `{a}` and `{b}`")]
    MismatchedSample { a: String, b: String },
    #[error("expected ages {expected:?}, got {got:?}")]
    WrongAges { expected: (u32, u32), got: (u32, u32) },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("bad ratio `{0}`, expected e.g. Ca/Si")]
    BadPair(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    C,
    O,
    Na,
    Mg,
    Al,
    Si,
    Ca,
    Mn,
    Fe,
}

impl Element {
    pub const ALL: [Element; 9] = [
        Element::C,
        Element::O,
        Element::Na,
        Element::Mg,
        Element::Al,
        Element::Si,
        Element::Ca,
        Element::Mn,
        Element::Fe,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Element::C => "C",
            Element::O => "O",
            Element::Na => "Na",
            Element::Mg => "Mg",
            Element::Al => "Al",
            Element::Si => "Si",
            Element::Ca => "Ca",
            Element::Mn => "Mn",
            Element::Fe => "Fe",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Element {
    type Err = MicroError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Element::ALL
            .into_iter()
            .find(|e| e.symbol() == s.trim())
            .ok_or_else(|| MicroError::UnknownElement(s.to_string()))
    }
}

/// A numerator/denominator element pair written `Ca/Si`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatioPair {
    pub num: Element,
    pub den: Element,
}

impl fmt::Display for RatioPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RatioPair {
    type Err = MicroError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| MicroError::BadPair(s.to_string()))?;
        Ok(RatioPair {
            num: a.parse()?,
            den: b.parse()?,
        })
    }
}

/// Averaged EDS spot analysis, atomic percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EdsRepr", into = "EdsRepr")]
pub struct EdsComposition {
    sample_id: String,
    age_days: u32,
    atomic: [f64; 9],
    n_points: u32,
}

#[derive(Serialize, Deserialize)]
struct EdsRepr {
    sample_id: String,
    age_days: u32,
    atomic_percent: BTreeMap<Element, f64>,
    n_points: u32,
}

impl TryFrom<EdsRepr> for EdsComposition {
    type Error = MicroError;

    fn try_from(r: EdsRepr) -> Result<Self, Self::Error> {
        let values: Vec<(Element, f64)> = r.atomic_percent.into_iter().collect();
        EdsComposition::new(r.sample_id, r.age_days, &values, r.n_points)
    }
}

impl From<EdsComposition> for EdsRepr {
    fn from(c: EdsComposition) -> Self {
        EdsRepr {
            atomic_percent: Element::ALL.iter().map(|&e| (e, c.get(e))).collect(),
            sample_id: c.sample_id,
            age_days: c.age_days,
            n_points: c.n_points,
        }
    }
}

impl EdsComposition {
    /// Elements not listed are zero.
    pub fn new(
        sample_id: impl Into<String>,
        age_days: u32,
        values: &[(Element, f64)],
        n_points: u32,
    ) -> Result<Self, MicroError> {
        let sample_id = sample_id.into();
        let mut atomic = [0.0; 9];
        for &(e, v) in values {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(MicroError::NegativeElement {
                    sample: sample_id,
                    element: e,
                    value: v,
                });
            }
            atomic[e.index()] = v;
        }
        let total: f64 = atomic.iter().sum();
        if total > EDS_CLOSURE_LIMIT + 1e-6 {
            return Err(MicroError::ClosureExceeded {
                sample: sample_id,
                total,
                limit: EDS_CLOSURE_LIMIT,
            });
        }
        Ok(Self {
            sample_id,
            age_days,
            atomic,
            n_points,
        })
    }

    /// Values in [`Element::ALL`] order.
    pub fn from_array(
        sample_id: impl Into<String>,
        age_days: u32,
        atomic: [f64; 9],
        n_points: u32,
    ) -> Result<Self, MicroError> {
        let values: Vec<(Element, f64)> = Element::ALL.into_iter().zip(atomic).collect();
        Self::new(sample_id, age_days, &values, n_points)
    }

    pub fn sample_id(&self) -> &str {
        &self.sample_id
    }

    pub fn age_days(&self) -> u32 {
        self.age_days
    }

    pub fn n_points(&self) -> u32 {
        self.n_points
    }

    pub fn get(&self, e: Element) -> f64 {
        self.atomic[e.index()]
    }

    pub fn total(&self) -> f64 {
        self.atomic.iter().sum()
    }

    pub fn scaled(&self, k: f64) -> Result<Self, MicroError> {
        Self::from_array(
            self.sample_id.clone(),
            self.age_days,
            self.atomic.map(|v| v * k),
            self.n_points,
        )
    }
}

pub fn molar_ratio(comp: &EdsComposition, num: Element, den: Element) -> Result<f64, MicroError> {
    let d = comp.get(den);
    if d == 0.0 {
        return Err(MicroError::ZeroDenominator(den));
    }
    Ok(comp.get(num) / d)
}

/// Percent change of `num/den` from `early` to `late`.
pub fn ratio_delta(
    early: &EdsComposition,
    late: &EdsComposition,
    num: Element,
    den: Element,
) -> Result<f64, MicroError> {
    let r0 = molar_ratio(early, num, den)?;
    let r1 = molar_ratio(late, num, den)?;
    if r0 == 0.0 {
        return Err(MicroError::ZeroEarlyRatio { num, den });
    }
    Ok(100.0 * (r1 - r0) / r0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthRecord {
    pub sample_id: String,
    pub age_days: u32,
    /// MPa
    pub strength: f64,
    pub n_cubes: u32,
}

impl StrengthRecord {
    pub fn new(sample_id: impl Into<String>, age_days: u32, strength: f64) -> Result<Self, MicroError> {
        Self::with_cubes(sample_id, age_days, strength, DEFAULT_CUBES)
    }

    pub fn with_cubes(
        sample_id: impl Into<String>,
        age_days: u32,
        strength: f64,
        n_cubes: u32,
    ) -> Result<Self, MicroError> {
        let sample_id = sample_id.into();
        if !STRENGTH_AGES.contains(&age_days) {
            return Err(MicroError::InvalidAge {
                sample: sample_id,
                age: age_days,
            });
        }
        if !(strength > 0.0) || !strength.is_finite() {
            return Err(MicroError::InvalidStrength {
                sample: sample_id,
                value: strength,
            });
        }
        Ok(Self {
            sample_id,
            age_days,
            strength,
            n_cubes,
        })
    }
}

/// Percent gain from 28 to 120 days.
pub fn strength_increment(rec28: &StrengthRecord, rec120: &StrengthRecord) -> Result<f64, MicroError> {
    if rec28.sample_id != rec120.sample_id {
        return Err(MicroError::MismatchedSample {
            a: rec28.sample_id.clone(),
            b: rec120.sample_id.clone(),
        });
    }
    if (rec28.age_days, rec120.age_days) != (28, 120) {
        return Err(MicroError::WrongAges {
            expected: (28, 120),
            got: (rec28.age_days, rec120.age_days),
        });
    }
    Ok(100.0 * (rec120.strength - rec28.strength) / rec28.strength)
}

/// Age-sorted strengths of one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthSeries {
    pub sample_id: String,
    /// `(age_days, MPa)`
    pub points: Vec<(u32, f64)>,
    /// False when strength drops between consecutive ages.
    pub monotone: bool,
}

impl StrengthSeries {
    pub fn at(&self, age: u32) -> Option<f64> {
        self.points.iter().find(|p| p.0 == age).map(|p| p.1)
    }
}

/// Groups records by sample, sorted by sample id then age.
pub fn development_curve(records: &[StrengthRecord]) -> Vec<StrengthSeries> {
    let mut by_sample: BTreeMap<&str, Vec<(u32, f64)>> = BTreeMap::new();
    for r in records {
        by_sample
            .entry(&r.sample_id)
            .or_default()
            .push((r.age_days, r.strength));
    }
    by_sample
        .into_iter()
        .map(|(id, mut points)| {
            points.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let monotone = points.windows(2).all(|w| w[1].1 >= w[0].1);
            StrengthSeries {
                sample_id: id.to_string(),
                points,
                monotone,
            }
        })
        .collect()
}

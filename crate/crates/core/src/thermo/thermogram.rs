use serde::{Deserialize, Serialize};

use super::ThermoError;

/// A sample may gain up to this fraction of mass over one step (buoyancy,
/// balance noise) before the trace is rejected.
pub const MASS_NOISE_TOLERANCE: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoSample {
    pub temperature_c: f64,
    pub mass_ug: f64,
}

/// Mass against temperature for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Repr", into = "Repr")]
pub struct Thermogram {
    sample_id: String,
    samples: Vec<ThermoSample>,
}

#[derive(Serialize, Deserialize)]
struct Repr {
    sample_id: String,
    samples: Vec<ThermoSample>,
}

impl TryFrom<Repr> for Thermogram {
    type Error = ThermoError;

    fn try_from(r: Repr) -> Result<Self, Self::Error> {
        Thermogram::new(r.sample_id, r.samples)
    }
}

impl From<Thermogram> for Repr {
    fn from(t: Thermogram) -> Self {
        Repr {
            sample_id: t.sample_id,
            samples: t.samples,
        }
    }
}

impl Thermogram {
    pub fn new(sample_id: impl Into<String>, samples: Vec<ThermoSample>) -> Result<Self, ThermoError> {
        if samples.len() < 2 {
            return Err(ThermoError::TooFewSamples {
                needed: 2,
                got: samples.len(),
            });
        }
        let invalid = |index: usize, reason: &str| ThermoError::InvalidThermogram {
            index,
            reason: reason.to_string(),
        };
        for (i, s) in samples.iter().enumerate() {
            if !s.temperature_c.is_finite() {
                return Err(invalid(i, "temperature must be finite"));
            }
            if !(s.mass_ug > 0.0) || !s.mass_ug.is_finite() {
                return Err(invalid(i, "mass must be finite and positive"));
            }
            if i > 0 {
                let prev = samples[i - 1];
                if !(s.temperature_c > prev.temperature_c) {
                    return Err(invalid(i, "temperature must be strictly increasing"));
                }
                if s.mass_ug > prev.mass_ug * (1.0 + MASS_NOISE_TOLERANCE) {
                    return Err(invalid(i, "mass rises by more than the noise tolerance"));
                }
            }
        }
        if samples[samples.len() - 1].mass_ug > samples[0].mass_ug {
            return Err(invalid(samples.len() - 1, "net mass gain over the run"));
        }
        Ok(Self {
            sample_id: sample_id.into(),
            samples,
        })
    }

    pub fn from_pairs(
        sample_id: impl Into<String>,
        pairs: impl IntoIterator<Item = (f64, f64)>,
    ) -> Result<Self, ThermoError> {
        let samples = pairs
            .into_iter()
            .map(|(temperature_c, mass_ug)| ThermoSample {
                temperature_c,
                mass_ug,
            })
            .collect();
        Self::new(sample_id, samples)
    }

    pub fn sample_id(&self) -> &str {
        &self.sample_id
    }

    pub fn samples(&self) -> &[ThermoSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn span(&self) -> (f64, f64) {
        (
            self.samples[0].temperature_c,
            self.samples[self.samples.len() - 1].temperature_c,
        )
    }

    /// Mass at `t` by linear interpolation, exact at sample points.
    pub fn mass_at(&self, t: f64) -> Result<f64, ThermoError> {
        let (lo, hi) = self.span();
        if !(t >= lo && t <= hi) {
            return Err(ThermoError::OutOfRange {
                temperature: t,
                lo,
                hi,
            });
        }
        let i = self.samples.partition_point(|s| s.temperature_c < t);
        let s1 = self.samples[i];
        if s1.temperature_c == t || i == 0 {
            return Ok(s1.mass_ug);
        }
        let s0 = self.samples[i - 1];
        let f = (t - s0.temperature_c) / (s1.temperature_c - s0.temperature_c);
        Ok(s0.mass_ug + f * (s1.mass_ug - s0.mass_ug))
    }

    /// Same trace with every mass multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self, ThermoError> {
        let samples = self
            .samples
            .iter()
            .map(|s| ThermoSample {
                temperature_c: s.temperature_c,
                mass_ug: s.mass_ug * k,
            })
            .collect();
        Self::new(self.sample_id.clone(), samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf10nh8() -> Thermogram {
        Thermogram::from_pairs(
            "SF10NH8",
            [
                (32.0, 12866.57),
                (105.0, 12539.35),
                (150.0, 12364.07),
                (230.0, 12205.64),
                (420.0, 11715.84),
                (635.0, 11187.45),
                (1000.0, 10825.05),
            ],
        )
        .unwrap()
    }

    #[test]
    fn mass_at_sample_points_and_midpoints() {
        assert_eq!(sf10nh8().mass_at(105.0).unwrap(), 12539.35);
        assert_eq!(sf10nh8().mass_at(32.0).unwrap(), 12866.57);
        assert_eq!(sf10nh8().mass_at(1000.0).unwrap(), 10825.05);
        let g = Thermogram::from_pairs("m", [(100.0, 10.0), (110.0, 8.0)]).unwrap();
        assert!((g.mass_at(105.0).unwrap() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn mass_at_outside_span() {
        let g = Thermogram::from_pairs("m", [(27.0, 10.0), (1000.0, 8.0)]).unwrap();
        assert!(matches!(g.mass_at(1100.0), Err(ThermoError::OutOfRange { .. })));
        assert!(matches!(g.mass_at(20.0), Err(ThermoError::OutOfRange { .. })));
    }

    #[test]
    fn construction_rules() {
        assert!(matches!(
            Thermogram::from_pairs("m", [(30.0, 10.0)]),
            Err(ThermoError::TooFewSamples { .. })
        ));
        assert!(Thermogram::from_pairs("m", [(30.0, 10.0), (30.0, 9.0)]).is_err());
        assert!(Thermogram::from_pairs("m", [(30.0, 10.0), (40.0, 0.0)]).is_err());
        // Small upward noise is tolerated, a real gain is not.
        assert!(Thermogram::from_pairs("m", [(30.0, 10.0), (40.0, 10.04), (50.0, 9.0)]).is_ok());
        assert!(Thermogram::from_pairs("m", [(30.0, 10.0), (40.0, 10.1), (50.0, 9.0)]).is_err());
        assert!(Thermogram::from_pairs("m", [(30.0, 10.0), (40.0, 10.03)]).is_err());
    }
}

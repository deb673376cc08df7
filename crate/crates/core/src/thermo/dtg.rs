use serde::{Deserialize, Serialize};

use super::{ThermoError, Thermogram};

/// °C. Default moving-average width for the derivative.
pub const DEFAULT_DTG_WINDOW: f64 = 10.0;

/// Peaks shallower than this share of the largest |dm/dT| are noise.
const PROMINENCE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtgPoint {
    pub temperature_c: f64,
    /// dm/dT, μg/°C.
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtgPeak {
    pub temperature_c: f64,
    pub rate: f64,
    /// `-rate`, the mass-loss rate at the peak.
    pub magnitude: f64,
}

/// Smoothed derivative dm/dT. Central differences on the sample grid
/// (one-sided at the ends), then a moving average over all samples within
/// `window / 2` of each point. A zero window skips smoothing.
pub fn dtg_curve(gram: &Thermogram, window: f64) -> Result<Vec<DtgPoint>, ThermoError> {
    let s = gram.samples();
    if s.len() < 3 {
        return Err(ThermoError::TooFewSamples {
            needed: 3,
            got: s.len(),
        });
    }
    if !(window >= 0.0) || !window.is_finite() {
        return Err(ThermoError::InvalidWindow(window));
    }
    let (lo, hi) = gram.span();
    if window > hi - lo {
        return Err(ThermoError::WindowTooLarge {
            window,
            span: hi - lo,
        });
    }
    let n = s.len();
    let t: Vec<f64> = s.iter().map(|p| p.temperature_c).collect();
    let m: Vec<f64> = s.iter().map(|p| p.mass_ug).collect();
    let raw: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (m[b] - m[a]) / (t[b] - t[a])
        })
        .collect();

    let half = window / 2.0;
    let (mut start, mut end) = (0usize, 0usize);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        while end < n && t[end] <= t[i] + half {
            end += 1;
        }
        while t[start] < t[i] - half {
            start += 1;
        }
        let avg = raw[start..end].iter().sum::<f64>() / (end - start) as f64;
        out.push(DtgPoint {
            temperature_c: t[i],
            rate: avg,
        });
    }
    Ok(out)
}

/// Interior local minima of the smoothed derivative, i.e. mass-loss peaks.
/// Flat runs count once, at their midpoint.
pub fn dtg_peaks(gram: &Thermogram, window: f64) -> Result<Vec<DtgPeak>, ThermoError> {
    let curve = dtg_curve(gram, window)?;
    let d: Vec<f64> = curve.iter().map(|p| p.rate).collect();
    let n = d.len();
    let scale = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = PROMINENCE_FLOOR * scale;
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let mut j = i;
        while j + 1 < n && d[j + 1] == d[i] {
            j += 1;
        }
        if j + 1 >= n {
            break;
        }
        let v = d[i];
        if d[i - 1] > v && d[j + 1] > v && v < 0.0 {
            let left = d[..i]
                .iter()
                .rev()
                .take_while(|&&x| x >= v)
                .fold(v, |a, &x| a.max(x));
            let right = d[j + 1..]
                .iter()
                .take_while(|&&x| x >= v)
                .fold(v, |a, &x| a.max(x));
            if left.min(right) - v > floor {
                let temperature_c = 0.5 * (curve[i].temperature_c + curve[j].temperature_c);
                peaks.push(DtgPeak {
                    temperature_c,
                    rate: v,
                    magnitude: -v,
                });
            }
        }
        i = j + 1;
    }
    Ok(peaks)
}

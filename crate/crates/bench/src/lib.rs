//! Synthetic inputs shared by the benchmarks.

use slagbind::rheology::{Branch, FlowCurve};
use slagbind::Thermogram;

/// Descending stepped ramp 100 → 5 s⁻¹ in `steps` equal steps.
pub fn down_curve(steps: usize, tau0: f64, mu_p: f64, c: f64) -> FlowCurve {
    let pairs = (0..steps).map(|i| {
        let rate = 100.0 - 95.0 * i as f64 / (steps - 1) as f64;
        (rate, tau0 + mu_p * rate + c * rate * rate)
    });
    FlowCurve::from_pairs(pairs, 20.0, Branch::Down).expect("valid synthetic curve")
}

/// Two logistic mass-loss steps sampled every `step` °C from 30 to 1000 °C.
pub fn two_step_thermogram(step: f64) -> Thermogram {
    let logistic = |t: f64, c: f64, w: f64| 1.0 / (1.0 + (-(t - c) / w).exp());
    let n = ((1000.0 - 30.0) / step).floor() as usize;
    let pairs = (0..=n).map(|i| {
        let t = 30.0 + i as f64 * step;
        (t, 12000.0 - 300.0 * logistic(t, 120.0, 15.0) - 500.0 * logistic(t, 450.0, 25.0) - 0.2 * t)
    });
    Thermogram::from_pairs("bench", pairs).expect("valid synthetic thermogram")
}

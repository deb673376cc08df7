//! Measured lab data shared by the integration tests.
#![allow(dead_code, clippy::approx_constant)]

use slagbind::Thermogram;

pub const MIXES: [&str; 4] = ["SF10NH8", "SF20NH8", "SF10NH10", "SF20NH10"];

/// Thermogram sampling temperatures, °C.
pub const TGA_TEMPS: [f64; 7] = [32.0, 105.0, 150.0, 230.0, 420.0, 635.0, 1000.0];

/// 28-day paste masses (μg) at [`TGA_TEMPS`].
pub const TGA_MASSES: [[f64; 7]; 4] = [
    [12866.57, 12539.35, 12364.07, 12205.64, 11715.84, 11187.45, 10825.05],
    [12454.08, 12062.84, 11910.97, 11788.55, 11576.26, 11167.40, 11037.15],
    [12408.41, 11791.61, 11544.55, 11345.30, 10998.91, 10347.33, 10137.07],
    [12547.22, 12123.28, 11967.29, 11813.33, 11518.06, 11047.50, 10671.72],
];

/// Ldh_a, Ldh_b, Ldh_c, Ldx_a, Ldx_b, Ldc (%).
pub const LOSSES: [[f64; 6]; 4] = [
    [2.543, 1.398, 1.264, 3.906, 4.214, 2.890],
    [3.141, 1.259, 1.015, 1.760, 3.389, 1.080],
    [4.971, 2.095, 1.690, 2.938, 5.526, 1.783],
    [3.379, 1.287, 1.270, 2.436, 3.882, 3.100],
];

/// Bhatty, Pane–Hansen, Monteagudo and present-study bound water (%).
pub const BOUND_WATER: [[f64; 4]; 4] = [
    [11.966, 11.773, 11.188, 10.578],
    [7.866, 6.650, 7.106, 5.408],
    [12.979, 11.994, 12.144, 10.783],
    [10.145, 9.981, 9.328, 8.802],
];

/// GGBFS, SF, HL, SA parts per 100 binder parts, as batched for the TGA samples.
pub const TGA_PARTS: [[f64; 4]; 4] = [
    [90.0, 10.0, 7.4, 10.4],
    [80.0, 20.0, 7.4, 10.4],
    [90.0, 10.0, 9.25, 13.25],
    [80.0, 20.0, 9.25, 13.25],
];

pub const LDC_A: [f64; 4] = [1.889, 1.843, 2.038, 1.993];

/// Anhydrous decarbonation loss for GGBFS, SF, SA, HL.
pub const ANHYDROUS_LDCA: [(&str, f64); 4] =
    [("GGBFS", 1.387), ("SF", 0.934), ("SA", 4.902), ("HL", 0.508)];

/// Anhydrous raw masses (μg) at 105, 635 and 1000 °C.
pub const ANHYDROUS_MASSES: [(&str, [f64; 3]); 4] = [
    ("GGBFS", [10945.2253, 10860.1317, 10708.356]),
    ("SF", [14627.3584, 14306.9814, 14170.3682]),
    ("SA", [14241.13, 14219.17, 13521.13]),
    ("HL", [5433.272, 4110.166, 4082.571]),
];

/// Free CH, MH, AH (%).
pub const HYDROXIDES: [[f64; 3]; 4] = [
    [18.91, 27.51, 10.59],
    [12.72, 15.73, 8.11],
    [22.34, 27.10, 14.38],
    [17.69, 21.78, 11.24],
];

/// Compressive strength (MPa) at 28 and 120 days, and the percent gain.
pub const STRENGTH: [[f64; 3]; 4] = [
    [29.76, 31.37, 5.41],
    [30.74, 31.57, 2.70],
    [35.10, 41.33, 17.75],
    [32.82, 39.17, 19.35],
];

/// C, O, Na, Mg, Al, Si, Ca, Mn, Fe at 7 days.
pub const EDS_7D: [[f64; 9]; 4] = [
    [4.72, 23.00, 4.48, 3.14, 8.40, 24.31, 26.66, 1.52, 1.62],
    [6.85, 29.45, 2.18, 2.55, 6.17, 18.85, 29.17, 1.17, 1.44],
    [4.52, 26.39, 4.36, 0.29, 12.39, 20.22, 29.00, 1.37, 1.89],
    [7.28, 14.21, 0.23, 0.12, 0.51, 48.94, 26.62, 1.23, 0.87],
];

/// As [`EDS_7D`], at 28 days.
pub const EDS_28D: [[f64; 9]; 4] = [
    [13.56, 21.46, 4.64, 2.43, 7.01, 18.41, 16.76, 12.87, 0.11],
    [6.29, 13.08, 2.16, 2.91, 5.99, 23.85, 21.58, 20.62, 0.16],
    [19.07, 16.16, 5.53, 3.63, 7.93, 20.87, 17.03, 15.71, 0.15],
    [8.24, 26.73, 3.51, 1.47, 4.40, 24.57, 21.92, 9.13, 0.04],
];

/// 7-day strength of the EDS samples, then 28-day.
pub const EDS_STRENGTH: [[f64; 2]; 4] = [[25.93, 29.76], [25.23, 30.74], [29.97, 35.1], [27.9, 32.82]];

/// Yield stress (Pa) and plastic viscosity (Pa·s) at w/s 0.45, 0.50, 0.55.
pub const FLOW_PARAMS: [(&str, [(f64, f64); 3]); 16] = [
    ("SF10NH6", [(13.670, 1.7921), (5.2872, 1.1514), (5.7786, 0.8912)]),
    ("SF20NH6", [(99.057, 1.3574), (7.5545, 1.2688), (6.6450, 1.0709)]),
    ("SF10NH8", [(6.9667, 1.7423), (6.1014, 1.1531), (3.7026, 0.9852)]),
    ("SF20NH8", [(92.088, 3.2337), (5.7648, 1.1832), (5.0219, 1.1694)]),
    ("SF10NH10", [(10.231, 1.5137), (5.8478, 1.3813), (2.7162, 1.2179)]),
    ("SF20NH10", [(18.722, 1.6466), (6.8152, 1.5281), (6.7686, 1.5171)]),
    ("SF10NH12", [(9.4698, 1.7864), (8.2813, 1.8957), (4.4944, 1.2847)]),
    ("SF20NH12", [(133.75, 1.5327), (7.5419, 1.9569), (4.9631, 1.2491)]),
    ("SF10NH8_C", [(5.4832, 0.7999), (2.8210, 0.7005), (2.2628, 0.4725)]),
    ("SF20NH8_C", [(5.7023, 1.5795), (4.5702, 0.7267), (2.8948, 0.5879)]),
    ("SF10NH10_C", [(3.2784, 0.7557), (2.0629, 0.4402), (1.5821, 0.3054)]),
    ("SF20NH10_C", [(5.2526, 0.9813), (2.4287, 0.6145), (1.9799, 0.4659)]),
    ("SF10NH8_PM", [(13.367, 1.8331), (4.9781, 1.1472), (7.0143, 1.0463)]),
    ("SF20NH8_PM", [(309.310, 1.1645), (15.524, 1.2020), (11.642, 1.0941)]),
    ("SF10NH10_PM", [(57.758, 2.5642), (21.817, 1.5183), (4.5705, 0.9636)]),
    ("SF20NH10_PM", [(314.35, 2.5600), (36.834, 3.9219), (67.173, 2.6414)]),
];

pub fn thermogram(i: usize) -> Thermogram {
    Thermogram::from_pairs(MIXES[i], TGA_TEMPS.iter().copied().zip(TGA_MASSES[i])).unwrap()
}

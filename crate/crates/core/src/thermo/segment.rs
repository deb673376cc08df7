use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ThermoError, Thermogram};
use crate::materials::AnhydrousTgaRef;

/// Losses after free-water removal are expressed per mass at this
/// temperature.
pub const REFERENCE_TEMPERATURE: f64 = 105.0;

/// Decarbonation loss of an unhydrated raw material, percent of its 105 °C
/// mass.
pub fn anhydrous_ldca(r: &AnhydrousTgaRef) -> f64 {
    100.0 * (r.w635() - r.w1000()) / r.w105()
}

/// Blend `Ldc_a`: `Σ parts_i · LdCa_i / 100`, with parts per 100 binder
/// parts. Activator parts sit on top of the 100.
pub fn mix_ldca(
    parts: &BTreeMap<String, f64>,
    ldca: &BTreeMap<String, f64>,
) -> Result<f64, ThermoError> {
    let mut total = 0.0;
    for (id, &p) in parts {
        if !(p >= 0.0) {
            return Err(ThermoError::NegativeParts(id.clone()));
        }
        if p == 0.0 {
            continue;
        }
        let l = ldca
            .get(id)
            .ok_or_else(|| ThermoError::UnknownMaterial(id.clone()))?;
        total += p * l;
    }
    Ok(total / 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TempRange {
    pub lo: f64,
    pub hi: f64,
}

impl TempRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }
}

impl fmt::Display for TempRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}–{} °C", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Bhatty,
    PaneHansen,
    Monteagudo,
    Deboucha,
    PresentStudy,
}

impl SchemeName {
    pub const ALL: [SchemeName; 5] = [
        SchemeName::Bhatty,
        SchemeName::PaneHansen,
        SchemeName::Monteagudo,
        SchemeName::Deboucha,
        SchemeName::PresentStudy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeName::Bhatty => "bhatty",
            SchemeName::PaneHansen => "pane_hansen",
            SchemeName::Monteagudo => "monteagudo",
            SchemeName::Deboucha => "deboucha",
            SchemeName::PresentStudy => "present_study",
        }
    }
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

/// Temperature windows for each loss family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationScheme {
    pub name: SchemeName,
    pub free_water: Option<TempRange>,
    pub ldh: Vec<TempRange>,
    pub ldx: Vec<TempRange>,
    pub ldc: TempRange,
}

impl SegmentationScheme {
    pub fn standard(name: SchemeName) -> Self {
        let r = TempRange::new;
        let (free_water, ldh, ldx, ldc) = match name {
            SchemeName::Bhatty => (None, vec![r(105.0, 440.0)], vec![r(440.0, 580.0)], r(580.0, 1000.0)),
            SchemeName::PaneHansen => {
                (None, vec![r(140.0, 440.0)], vec![r(440.0, 520.0)], r(520.0, 1100.0))
            }
            SchemeName::Monteagudo => {
                (None, vec![r(105.0, 410.0)], vec![r(430.0, 530.0)], r(530.0, 1100.0))
            }
            SchemeName::Deboucha => (None, vec![r(105.0, 400.0)], vec![r(400.0, 600.0)], r(600.0, 1000.0)),
            SchemeName::PresentStudy => (
                Some(r(32.0, 105.0)),
                vec![r(105.0, 150.0), r(150.0, 230.0)],
                vec![r(230.0, 420.0), r(420.0, 635.0)],
                r(635.0, 1000.0),
            ),
        };
        let scheme = Self {
            name,
            free_water,
            ldh,
            ldx,
            ldc,
        };
        debug_assert!(scheme.validate().is_ok());
        scheme
    }

    /// All windows in ascending order.
    pub fn ranges(&self) -> Vec<TempRange> {
        self.free_water
            .iter()
            .chain(&self.ldh)
            .chain(&self.ldx)
            .chain(std::iter::once(&self.ldc))
            .copied()
            .collect()
    }

    pub fn validate(&self) -> Result<(), ThermoError> {
        if self.ldh.is_empty() || self.ldx.is_empty() {
            return Err(ThermoError::InvalidScheme(
                "Ldh and Ldx need at least one window each".into(),
            ));
        }
        let ranges = self.ranges();
        for r in &ranges {
            if !(r.hi > r.lo) {
                return Err(ThermoError::InvalidScheme(format!("empty window {r}")));
            }
        }
        for w in ranges.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(ThermoError::InvalidScheme(format!(
                    "windows {} and {} overlap or are out of order",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceMass {
    pub temperature_c: f64,
    pub mass_ug: f64,
}

/// Which mass each loss is divided by. Free water uses the mass at the start
/// of its window; everything later uses the 105 °C mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub free_water_reference: Option<ReferenceMass>,
    pub reference: ReferenceMass,
}

/// Losses in percent by mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassLossProfile {
    pub scheme: SchemeName,
    /// Ldh_a, present only for schemes with a free-water window.
    pub free_water: Option<f64>,
    pub ldh: Vec<f64>,
    pub ldx: Vec<f64>,
    pub ldc: f64,
    /// Absent when the profile was built from tabulated losses.
    pub normalization: Option<Normalization>,
}

impl MassLossProfile {
    /// A five-window profile from already computed losses
    /// (free water, two Ldh, two Ldx, Ldc).
    pub fn from_losses(
        ldh_a: f64,
        ldh_b: f64,
        ldh_c: f64,
        ldx_a: f64,
        ldx_b: f64,
        ldc: f64,
    ) -> Self {
        Self {
            scheme: SchemeName::PresentStudy,
            free_water: Some(ldh_a),
            ldh: vec![ldh_b, ldh_c],
            ldx: vec![ldx_a, ldx_b],
            ldc,
            normalization: None,
        }
    }

    pub fn ldh_total(&self) -> f64 {
        self.ldh.iter().sum()
    }

    pub fn ldx_total(&self) -> f64 {
        self.ldx.iter().sum()
    }

    /// Every loss re-expressed as a percentage of `reference_mass`, in
    /// window order. Needs the normalization record.
    pub fn renormalized(&self, reference_mass: f64) -> Option<Vec<f64>> {
        let norm = self.normalization?;
        let mut out = Vec::new();
        if let Some(fw) = self.free_water {
            out.push(fw * norm.free_water_reference?.mass_ug / reference_mass);
        }
        let k = norm.reference.mass_ug / reference_mass;
        out.extend(self.ldh.iter().chain(&self.ldx).map(|l| l * k));
        out.push(self.ldc * k);
        Some(out)
    }
}

fn loss(gram: &Thermogram, r: TempRange, reference: f64) -> Result<f64, ThermoError> {
    let drop = gram.mass_at(r.lo)? - gram.mass_at(r.hi)?;
    if drop < 0.0 {
        return Err(ThermoError::NegativeLoss { lo: r.lo, hi: r.hi });
    }
    Ok(100.0 * drop / reference)
}

/// Cuts a thermogram into the scheme's windows.
pub fn segment_losses(
    gram: &Thermogram,
    scheme: &SegmentationScheme,
) -> Result<MassLossProfile, ThermoError> {
    scheme.validate()?;
    let reference = ReferenceMass {
        temperature_c: REFERENCE_TEMPERATURE,
        mass_ug: gram.mass_at(REFERENCE_TEMPERATURE)?,
    };
    let (free_water, free_water_reference) = match scheme.free_water {
        Some(r) => {
            let m0 = gram.mass_at(r.lo)?;
            let fw = loss(gram, r, m0)?;
            (
                Some(fw),
                Some(ReferenceMass {
                    temperature_c: r.lo,
                    mass_ug: m0,
                }),
            )
        }
        None => (None, None),
    };
    let ref_mass = reference.mass_ug;
    let ldh = scheme
        .ldh
        .iter()
        .map(|&r| loss(gram, r, ref_mass))
        .collect::<Result<_, _>>()?;
    let ldx = scheme
        .ldx
        .iter()
        .map(|&r| loss(gram, r, ref_mass))
        .collect::<Result<_, _>>()?;
    let ldc = loss(gram, scheme.ldc, ref_mass)?;
    Ok(MassLossProfile {
        scheme: scheme.name,
        free_water,
        ldh,
        ldx,
        ldc,
        normalization: Some(Normalization {
            free_water_reference,
            reference,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TEMPS: [f64; 7] = [32.0, 105.0, 150.0, 230.0, 420.0, 635.0, 1000.0];

    fn gram(masses: [f64; 7]) -> Thermogram {
        Thermogram::from_pairs("t", TEMPS.into_iter().zip(masses)).unwrap()
    }

    fn present() -> SegmentationScheme {
        SegmentationScheme::standard(SchemeName::PresentStudy)
    }

    #[test]
    fn ldca_from_anhydrous_masses() {
        let ggbfs = AnhydrousTgaRef::new(10945.2253, 10860.1317, 10708.356).unwrap();
        assert!((anhydrous_ldca(&ggbfs) - 1.387).abs() < 0.002);
        let sa = AnhydrousTgaRef::new(14241.13, 14219.17, 13521.13).unwrap();
        assert!((anhydrous_ldca(&sa) - 4.902).abs() < 0.002);
        let flat = AnhydrousTgaRef::new(100.0, 100.0, 100.0).unwrap();
        assert_eq!(anhydrous_ldca(&flat), 0.0);
    }

    fn map(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
        items.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn blend_ldca() {
        let ldca = map(&[("GGBFS", 1.387), ("SF", 0.934), ("SA", 4.902), ("HL", 0.508)]);
        let v = mix_ldca(&map(&[("GGBFS", 90.0), ("SF", 10.0), ("HL", 7.4), ("SA", 10.4)]), &ldca).unwrap();
        assert!((v - 1.889).abs() < 0.003, "{v}");
        let v = mix_ldca(&map(&[("GGBFS", 80.0), ("SF", 20.0), ("HL", 9.25), ("SA", 13.25)]), &ldca).unwrap();
        assert!((v - 1.993).abs() < 0.003, "{v}");
        assert!((mix_ldca(&map(&[("GGBFS", 100.0)]), &ldca).unwrap() - 1.387).abs() < 1e-12);
        assert_eq!(
            mix_ldca(&map(&[("FA", 10.0)]), &ldca),
            Err(ThermoError::UnknownMaterial("FA".into()))
        );
        assert!(matches!(
            mix_ldca(&map(&[("GGBFS", -1.0)]), &ldca),
            Err(ThermoError::NegativeParts(_))
        ));
    }

    #[test]
    fn single_material_blend_matches_anhydrous_value() {
        for (id, r) in [
            ("GGBFS", (10945.2253, 10860.1317, 10708.356)),
            ("SF", (14627.3584, 14306.9814, 14170.3682)),
            ("SA", (14241.13, 14219.17, 13521.13)),
            ("HL", (5433.272, 4110.166, 4082.571)),
        ] {
            let v = anhydrous_ldca(&AnhydrousTgaRef::new(r.0, r.1, r.2).unwrap());
            let blended = mix_ldca(&map(&[(id, 100.0)]), &map(&[(id, v)])).unwrap();
            assert!((blended - v).abs() < 1e-12);
        }
    }

    #[test]
    fn segments_with_split_normalization() {
        let g = gram([12866.57, 12539.35, 12364.07, 12205.64, 11715.84, 11187.45, 10825.05]);
        let p = segment_losses(&g, &present()).unwrap();
        let expect = [2.543, 1.398, 1.264, 3.906, 4.214, 2.890];
        let got = [p.free_water.unwrap(), p.ldh[0], p.ldh[1], p.ldx[0], p.ldx[1], p.ldc];
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 0.005, "{got:?}");
        }
        let norm = p.normalization.unwrap();
        assert_eq!(norm.free_water_reference.unwrap().mass_ug, 12866.57);
        assert_eq!(norm.reference.mass_ug, 12539.35);
    }

    #[test]
    fn flat_trace_has_no_losses() {
        let p = segment_losses(&gram([100.0; 7]), &present()).unwrap();
        assert_eq!(p.free_water, Some(0.0));
        assert!(p.ldh.iter().chain(&p.ldx).all(|&l| l == 0.0));
        assert_eq!(p.ldc, 0.0);
    }

    #[test]
    fn ldc_window_for_another_mix() {
        let g = gram([12547.22, 12123.28, 11967.29, 11813.33, 11518.06, 11047.50, 10671.72]);
        let p = segment_losses(&g, &present()).unwrap();
        assert!((p.ldc - 3.100).abs() < 0.005);
    }

    #[test]
    fn schemes_reaching_1100_need_the_span() {
        let g = gram([12547.22, 12123.28, 11967.29, 11813.33, 11518.06, 11047.50, 10671.72]);
        let s = SegmentationScheme::standard(SchemeName::PaneHansen);
        assert!(matches!(segment_losses(&g, &s), Err(ThermoError::OutOfRange { .. })));
        let s = SegmentationScheme::standard(SchemeName::Bhatty);
        let p = segment_losses(&g, &s).unwrap();
        assert!(p.free_water.is_none() && p.ldh.len() == 1);
    }

    #[test]
    fn local_mass_gain_in_a_window_is_rejected() {
        let g = gram([100.0, 99.0, 99.2, 98.0, 97.0, 96.0, 95.0]);
        assert_eq!(
            segment_losses(&g, &present()),
            Err(ThermoError::NegativeLoss { lo: 105.0, hi: 150.0 })
        );
    }

    #[test]
    fn standard_schemes_are_valid() {
        for name in SchemeName::ALL {
            SegmentationScheme::standard(name).validate().unwrap();
            assert_eq!(name.as_str().parse::<SchemeName>().unwrap(), name);
        }
        let mut bad = present();
        bad.ldx[0].lo = 200.0;
        assert!(bad.validate().is_err());
    }

    fn trace() -> impl Strategy<Value = Thermogram> {
        (
            proptest::collection::vec(0.0..1.0f64, 60),
            1000.0..20000.0f64,
            0.05..0.4f64,
        )
            .prop_map(|(steps, m0, total_frac)| {
                let sum: f64 = steps.iter().sum::<f64>().max(1e-9);
                let mut m = m0;
                let mut pts = vec![(32.0, m)];
                for (i, s) in steps.iter().enumerate() {
                    m -= m0 * total_frac * s / sum;
                    pts.push((32.0 + (i as f64 + 1.0) * 968.0 / 60.0, m));
                }
                Thermogram::from_pairs("p", pts).unwrap()
            })
    }

    proptest! {
        #[test]
        fn renormalized_losses_conserve_mass(g in trace()) {
            let p = segment_losses(&g, &present()).unwrap();
            let m0 = g.mass_at(32.0).unwrap();
            let total = 100.0 * (m0 - g.mass_at(1000.0).unwrap()) / m0;
            let sum: f64 = p.renormalized(m0).unwrap().iter().sum();
            prop_assert!((sum - total).abs() < 1e-9);
        }

        #[test]
        fn losses_ignore_uniform_rescaling(g in trace(), k in 0.01..100.0f64) {
            let a = segment_losses(&g, &present()).unwrap();
            let b = segment_losses(&g.scaled(k).unwrap(), &present()).unwrap();
            prop_assert!((a.free_water.unwrap() - b.free_water.unwrap()).abs() < 1e-9);
            for (x, y) in a.ldh.iter().chain(&a.ldx).zip(b.ldh.iter().chain(&b.ldx)) {
                prop_assert!((x - y).abs() < 1e-9);
            }
            prop_assert!((a.ldc - b.ldc).abs() < 1e-9);
        }
    }
}

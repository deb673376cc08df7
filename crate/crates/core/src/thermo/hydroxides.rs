use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{MassLossProfile, ThermoError};

pub const CA_OH2_MOLAR_MASS: f64 = 74.09;
pub const MG_OH2_MOLAR_MASS: f64 = 58.32;
pub const AL_OH3_MOLAR_MASS: f64 = 78.0;
pub const H2O_MOLAR_MASS: f64 = 18.01;
pub const CO2_MOLAR_MASS: f64 = 44.01;

/// Which carbonated phases the decarbonation correction accounts for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarbonationTerms {
    /// Carbonated portlandite only: 0.41.
    PortlanditeOnly,
    /// Portlandite and brucite at full weight: 0.82.
    PortlanditeAndBrucite,
    /// Portlandite, brucite and the half-weight brucite term: 1.025.
    Full,
}

impl CarbonationTerms {
    pub fn base(self) -> f64 {
        match self {
            CarbonationTerms::PortlanditeOnly => 0.41,
            CarbonationTerms::PortlanditeAndBrucite => 0.41 + 0.41,
            CarbonationTerms::Full => 0.41 + 0.41 + 0.205,
        }
    }
}

/// Decarbonation multiplier less the calcite already present from the
/// activator exchange. `calcite_fraction` is expected in [0, 1].
pub fn correction_factor(calcite_fraction: f64, terms: CarbonationTerms) -> f64 {
    terms.base() - calcite_fraction
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MhVariant {
    /// Brucite from the first Ldx window only.
    FirstLdx,
    /// Brucite from both Ldx windows.
    #[default]
    TotalLdx,
}

impl fmt::Display for MhVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MhVariant::FirstLdx => "first_ldx",
            MhVariant::TotalLdx => "total_ldx",
        })
    }
}

impl FromStr for MhVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first_ldx" => Ok(MhVariant::FirstLdx),
            "total_ldx" => Ok(MhVariant::TotalLdx),
            other => Err(format!("unknown MH variant `{other}`")),
        }
    }
}

/// Free hydroxide contents, percent by mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydroxideReport {
    pub ch_free: f64,
    pub mh_free: f64,
    /// Gibbsite as brucite-corrected Ldx_a; may come out negative.
    pub ah_free: f64,
    pub ah_negative: bool,
    pub calcite_fraction: f64,
    pub mh_variant: MhVariant,
    pub diagnostics: Vec<String>,
}

/// Free CH, MH and AH from the two dehydroxylation windows and the net
/// decarbonation `Ldc − Ldc_a`.
///
/// ```text
/// CH = (74.09/18.01)·Ldx_b + (74.09/44.01 − calcite)·(Ldc − Ldc_a)
/// MH = (58.32/18.01)·Ldx + (58.32/44.01)·(Ldc − Ldc_a)
/// AH = (78/18.01)·Ldx_a − MH
/// ```
///
/// `Ldx` in the MH term is `Ldx_a` or `Ldx_a + Ldx_b` per `variant`.
pub fn free_hydroxides(
    profile: &MassLossProfile,
    ldc_a: f64,
    calcite_fraction: f64,
    variant: MhVariant,
) -> Result<HydroxideReport, ThermoError> {
    let [ldx_a, ldx_b] = profile.ldx[..] else {
        return Err(ThermoError::UnsplitProfile {
            got: profile.ldx.len(),
        });
    };
    let net = profile.ldc - ldc_a;
    let ch = CA_OH2_MOLAR_MASS / H2O_MOLAR_MASS * ldx_b
        + (CA_OH2_MOLAR_MASS / CO2_MOLAR_MASS - calcite_fraction) * net;
    let mh_ldx = match variant {
        MhVariant::FirstLdx => ldx_a,
        MhVariant::TotalLdx => ldx_a + ldx_b,
    };
    let mh = MG_OH2_MOLAR_MASS / H2O_MOLAR_MASS * mh_ldx + MG_OH2_MOLAR_MASS / CO2_MOLAR_MASS * net;
    let ah = AL_OH3_MOLAR_MASS / H2O_MOLAR_MASS * ldx_a - mh;
    let mut diagnostics = Vec::new();
    if ah < 0.0 {
        diagnostics.push(format!(
            "AH is negative ({ah:.3}): the brucite estimate exceeds the gibbsite-equivalent Ldx_a"
        ));
    }
    if net < 0.0 {
        diagnostics.push(format!("Ldc is below Ldc_a by {:.3}", -net));
    }
    Ok(HydroxideReport {
        ch_free: ch,
        mh_free: mh,
        ah_free: ah,
        ah_negative: ah < 0.0,
        calcite_fraction,
        mh_variant: variant,
        diagnostics,
    })
}

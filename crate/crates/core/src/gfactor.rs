//! Three-level k·p (Roth) conduction-electron g-factor.
//!
//! ```text
//! g = 2 − (2/3) · E_p·Δ / (E_g·(E_g + Δ))
//! ```
//!
//! The formula describes Γ-valley electrons only. Compositions whose Γ gap
//! lies above the X or L gap are classified indirect and pinned at g = 2.

use serde::Serialize;

use crate::alloy::{alloy_params, AlloyParams};
use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::params::MaterialsDatabase;

/// Free-electron g-factor.
pub const G_FREE: f64 = 2.0;

/// hc/e in eV·μm.
pub const HC_EV_UM: f64 = 1.23984;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GapCharacter {
    Direct,
    Indirect,
}

impl GapCharacter {
    pub fn as_str(self) -> &'static str {
        match self {
            GapCharacter::Direct => "Direct",
            GapCharacter::Indirect => "Indirect",
        }
    }
}

impl std::fmt::Display for GapCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GapCharacter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Direct" => Ok(GapCharacter::Direct),
            "Indirect" => Ok(GapCharacter::Indirect),
            other => Err(Error::InvalidArgument(format!(
                "unknown gap character `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GFactorResult {
    pub g: f64,
    pub character: GapCharacter,
    /// `(2/3)·E_p·Δ/(E_g·(E_g+Δ))`; zero for indirect compositions.
    pub roth_correction: f64,
    pub params_used: AlloyParams,
}

fn check_inputs(eg: f64, delta: f64, ep: f64) -> Result<()> {
    if !(eg > 0.0 && eg.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "band gap must be positive, got {eg}"
        )));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "spin-orbit splitting must be >= 0, got {delta}"
        )));
    }
    if !(ep >= 0.0 && ep.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Kane energy must be >= 0, got {ep}"
        )));
    }
    Ok(())
}

/// The correction term, evaluated as `(2/3)·(ep·delta) / (eg·(eg+delta))`.
pub fn roth_correction(eg: f64, delta: f64, ep: f64) -> Result<f64> {
    check_inputs(eg, delta, ep)?;
    Ok(2.0 / 3.0 * (ep * delta) / (eg * (eg + delta)))
}

/// Electron g-factor from gap, spin-orbit splitting and Kane energy (all eV).
pub fn roth_g(eg: f64, delta: f64, ep: f64) -> Result<f64> {
    Ok(G_FREE - roth_correction(eg, delta, ep)?)
}

/// Analytic partial derivatives `(∂g/∂eg, ∂g/∂delta, ∂g/∂ep)`.
pub fn roth_gradient(eg: f64, delta: f64, ep: f64) -> Result<[f64; 3]> {
    check_inputs(eg, delta, ep)?;
    let s = eg + delta;
    Ok([
        2.0 / 3.0 * ep * delta * (2.0 * eg + delta) / (eg * eg * s * s),
        -2.0 / 3.0 * ep / (s * s),
        -2.0 / 3.0 * delta / (eg * s),
    ])
}

/// Direct iff the Γ gap does not exceed either indirect gap (ties are direct).
pub fn classify_gap(params: &AlloyParams) -> GapCharacter {
    if params.eg_gamma <= params.eg_x.min(params.eg_l) {
        GapCharacter::Direct
    } else {
        GapCharacter::Indirect
    }
}

/// g-factor for already-interpolated parameters.
pub fn g_from_params(params: AlloyParams) -> Result<GFactorResult> {
    let character = classify_gap(&params);
    let roth_correction = match character {
        GapCharacter::Direct => roth_correction(params.eg_gamma, params.delta_so, params.e_p)?,
        GapCharacter::Indirect => 0.0,
    };
    Ok(GFactorResult {
        g: G_FREE - roth_correction,
        character,
        roth_correction,
        params_used: params,
    })
}

pub fn electron_g(comp: &Composition, db: &MaterialsDatabase) -> Result<GFactorResult> {
    g_from_params(alloy_params(comp, db)?)
}

/// Photon wavelength (μm) at the given gap (eV).
pub fn gap_to_wavelength(eg: f64) -> Result<f64> {
    if !(eg > 0.0 && eg.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "gap must be positive, got {eg}"
        )));
    }
    Ok(HC_EV_UM / eg)
}

/// Gap (eV) at the given photon wavelength (μm).
pub fn wavelength_to_gap(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "wavelength must be positive, got {lambda}"
        )));
    }
    Ok(HC_EV_UM / lambda)
}

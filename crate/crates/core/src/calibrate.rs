//! Physical units in, dimensionless couplings out.
//!
//! A thin step of height `ΔV` and width `w` at an interface acts like
//! `ΔV·w·δ(|x| − R)`. Measuring lengths in `L₀` and energies in
//! `E₀ = ħ²/(2m* L₀²)` turns it into a shell of strength `α = (ΔV/E₀)(w/L₀)`.
//! All results are order-of-magnitude estimates of an effective interface
//! model, not fitted parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ShellConfig;

/// `ħ²/(2 m₀ · 1 nm²)` in eV (CODATA 2018 values of ħ, m₀ and e, rounded to six digits).
pub const HBAR2_OVER_2M0_EV_NM2: f64 = 0.0380998;

/// Interface data in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationInput {
    /// Signed band offset `ΔV` in eV.
    pub delta_v: f64,
    /// Interface width in nm.
    pub width: f64,
    /// Effective mass in units of the free electron mass.
    pub mass_ratio: f64,
    /// Reference length in nm.
    pub l0: f64,
}

impl CalibrationInput {
    pub fn validate(&self) -> Result<()> {
        if !self.delta_v.is_finite() {
            return Err(Error::InvalidCalibration("band offset must be finite"));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::InvalidCalibration("width must be positive"));
        }
        check_scale(self.mass_ratio, self.l0)
    }
}

fn check_scale(mass_ratio: f64, l0: f64) -> Result<()> {
    if !(mass_ratio.is_finite() && mass_ratio > 0.0) {
        return Err(Error::InvalidCalibration("mass ratio must be positive"));
    }
    if !(l0.is_finite() && l0 > 0.0) {
        return Err(Error::InvalidCalibration("reference length must be positive"));
    }
    Ok(())
}

/// `E₀ = ħ²/(2 m* L₀²)` in eV.
pub fn reference_energy(mass_ratio: f64, l0: f64) -> Result<f64> {
    check_scale(mass_ratio, l0)?;
    Ok(HBAR2_OVER_2M0_EV_NM2 / (mass_ratio * l0 * l0))
}

/// `α = (ΔV/E₀)(w/L₀)`; carries the sign of `ΔV`.
pub fn coupling_from_interface(inp: &CalibrationInput) -> Result<f64> {
    inp.validate()?;
    Ok(inp.delta_v / reference_energy(inp.mass_ratio, inp.l0)? * (inp.width / inp.l0))
}

/// Band-alignment pattern of a two-shell dot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alignment {
    /// Attractive inner interface, repulsive outer one.
    TypeI,
    /// Repulsive inner interface, attractive outer one.
    TypeII,
    Other,
}

pub fn classify_alignment(alpha1: f64, alpha2: f64) -> Alignment {
    if alpha1 < 0.0 && alpha2 > 0.0 {
        Alignment::TypeI
    } else if alpha1 > 0.0 && alpha2 < 0.0 {
        Alignment::TypeII
    } else {
        Alignment::Other
    }
}

/// A core/shell dot: geometry in nm, a fixed inner coupling and a physical
/// outer interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DotModel {
    pub radii_nm: [f64; 2],
    pub inner_alpha: f64,
    pub outer: CalibrationInput,
}

/// The two representative material sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// CdSe core in ZnS: strong confinement.
    Type1CdseZns,
    /// CdTe/CdSe: shallow outer-shell level.
    Type2CdteCdse,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::Type1CdseZns, Preset::Type2CdteCdse];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Type1CdseZns => "type1-cdse-zns",
            Preset::Type2CdteCdse => "type2-cdte-cdse",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn model(self) -> DotModel {
        match self {
            Preset::Type1CdseZns => DotModel {
                radii_nm: [2.5, 3.5],
                inner_alpha: -2.5,
                outer: CalibrationInput { delta_v: 0.7, width: 0.3, mass_ratio: 0.13, l0: 1.0 },
            },
            Preset::Type2CdteCdse => DotModel {
                radii_nm: [2.5, 3.5],
                inner_alpha: 2.5,
                outer: CalibrationInput { delta_v: -0.8, width: 0.35, mass_ratio: 0.11, l0: 1.0 },
            },
        }
    }
}

/// Dimensionless problem derived from a [`DotModel`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub e0_ev: f64,
    pub alphas: [f64; 2],
    pub classification: Alignment,
    pub config: ShellConfig,
}

impl Calibration {
    /// A dimensionless energy `E = −κ²` in eV.
    pub fn energy_ev(&self, energy: f64) -> f64 {
        energy * self.e0_ev
    }
}

pub fn calibrate(model: &DotModel) -> Result<Calibration> {
    let outer = &model.outer;
    let alpha2 = coupling_from_interface(outer)?;
    if !model.inner_alpha.is_finite() {
        return Err(Error::InvalidCalibration("inner coupling must be finite"));
    }
    let alphas = [model.inner_alpha, alpha2];
    let radii = model.radii_nm.iter().map(|r| r / outer.l0).collect();
    Ok(Calibration {
        e0_ev: reference_energy(outer.mass_ratio, outer.l0)?,
        alphas,
        classification: classify_alignment(alphas[0], alphas[1]),
        config: ShellConfig::new(radii, alphas.to_vec())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inp(delta_v: f64, width: f64, mass_ratio: f64) -> CalibrationInput {
        CalibrationInput { delta_v, width, mass_ratio, l0: 1.0 }
    }

    #[test]
    fn reference_energies() {
        assert!((reference_energy(0.13, 1.0).unwrap() - 0.293075).abs() < 1e-6);
        assert!((reference_energy(0.11, 1.0).unwrap() - 0.346362).abs() < 1e-6);
        assert_eq!(reference_energy(1.0, 1.0).unwrap(), HBAR2_OVER_2M0_EV_NM2);
        assert!((reference_energy(1.0, 2.0).unwrap() * 4.0 - HBAR2_OVER_2M0_EV_NM2).abs() < 1e-18);
        assert!(reference_energy(0.0, 1.0).is_err());
    }

    #[test]
    fn couplings() {
        let a = coupling_from_interface(&inp(0.7, 0.3, 0.13)).unwrap();
        assert!((a - 0.7165).abs() < 1e-4);
        let a = coupling_from_interface(&inp(-0.8, 0.35, 0.11)).unwrap();
        assert!((a + 0.8084).abs() < 1e-4);
        assert_eq!(coupling_from_interface(&inp(0.0, 0.3, 0.13)).unwrap(), 0.0);
        assert!(coupling_from_interface(&inp(1.0, -0.1, 0.13)).is_err());
    }

    #[test]
    fn coupling_is_linear() {
        let base = coupling_from_interface(&inp(0.37, 0.21, 0.2)).unwrap();
        assert_eq!(coupling_from_interface(&inp(0.74, 0.21, 0.2)).unwrap(), 2.0 * base);
        assert_eq!(coupling_from_interface(&inp(0.37, 0.42, 0.2)).unwrap(), 2.0 * base);
    }

    #[test]
    fn alignment() {
        assert_eq!(classify_alignment(-2.5, 0.7), Alignment::TypeI);
        assert_eq!(classify_alignment(2.5, -0.8), Alignment::TypeII);
        assert_eq!(classify_alignment(-1.0, -1.0), Alignment::Other);
        assert_eq!(classify_alignment(0.0, 0.0), Alignment::Other);
    }

    #[test]
    fn presets() {
        for p in Preset::ALL {
            assert_eq!(Preset::from_name(p.name()), Some(p));
        }
        let c = calibrate(&Preset::Type1CdseZns.model()).unwrap();
        assert_eq!(c.classification, Alignment::TypeI);
        assert_eq!(c.config.radii, vec![2.5, 3.5]);
        let c = calibrate(&Preset::Type2CdteCdse.model()).unwrap();
        assert_eq!(c.classification, Alignment::TypeII);
    }

    #[test]
    fn radii_are_rescaled_by_reference_length() {
        let mut m = Preset::Type1CdseZns.model();
        m.outer.l0 = 0.5;
        let c = calibrate(&m).unwrap();
        assert_eq!(c.config.radii, vec![5.0, 7.0]);
    }
}

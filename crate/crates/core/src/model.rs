//! Shell configurations and the small value types shared by the solver.
//!
//! Everything here is dimensionless with ħ²/2m = 1, i.e. the operator is
//! `-Δ + Σ α_j δ(|x| - R_j)`. Physical units only enter through [`crate::calibrate`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radii and constant couplings of N concentric δ-shells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellConfig {
    pub radii: Vec<f64>,
    pub alphas: Vec<f64>,
}

impl ShellConfig {
    /// Builds and validates a configuration.
    pub fn new(radii: Vec<f64>, alphas: Vec<f64>) -> Result<Self> {
        validate_config(ShellConfig { radii, alphas })
    }

    /// Two-shell configuration with `R₂ = R₁ + d`.
    pub fn two_shell(r1: f64, d: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        Self::new(vec![r1, r1 + d], vec![alpha1, alpha2])
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Diagonal of the coupling operator Θ in the angular basis, `α_j R_j²`.
    pub fn theta(&self) -> Vec<f64> {
        self.radii
            .iter()
            .zip(&self.alphas)
            .map(|(r, a)| a * r * r)
            .collect()
    }

    /// Sum of the attractive couplings' magnitudes, `Σ max(-α_j, 0)`.
    pub fn attraction(&self) -> f64 {
        self.alphas.iter().map(|a| (-a).max(0.0)).sum()
    }

    /// Same geometry with every radius multiplied by `s` and every coupling divided by `s`.
    pub fn rescaled(&self, s: f64) -> Self {
        ShellConfig {
            radii: self.radii.iter().map(|r| r * s).collect(),
            alphas: self.alphas.iter().map(|a| a / s).collect(),
        }
    }

    /// The configuration with shell `index` removed.
    pub fn without_shell(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.radii.remove(index);
        out.alphas.remove(index);
        out
    }
}

/// Checks every [`ShellConfig`] invariant and hands the record back unchanged.
pub fn validate_config(cfg: ShellConfig) -> Result<ShellConfig> {
    if cfg.radii.len() != cfg.alphas.len() {
        return Err(Error::LengthMismatch {
            radii: cfg.radii.len(),
            alphas: cfg.alphas.len(),
        });
    }
    if cfg.radii.is_empty() {
        return Err(Error::EmptyConfig);
    }
    for (i, &r) in cfg.radii.iter().enumerate() {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::NonPositiveRadius(i));
        }
        if i > 0 && r <= cfg.radii[i - 1] {
            return Err(Error::NonIncreasingRadii(i));
        }
    }
    if let Some(i) = cfg.alphas.iter().position(|a| !a.is_finite()) {
        return Err(Error::NonFiniteCoupling(i));
    }
    Ok(cfg)
}

/// Shell separation `d = R₂ - R₁` of a two-shell configuration.
pub fn separation(cfg: &ShellConfig) -> Result<f64> {
    match cfg.radii.as_slice() {
        [r1, r2] => Ok(r2 - r1),
        other => Err(Error::WrongShellCount(other.len())),
    }
}

/// Angular momentum channel ℓ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Channel(pub usize);

impl Channel {
    pub fn ell(self) -> usize {
        self.0
    }

    /// Number of magnetic substates, `2ℓ + 1`.
    pub fn degeneracy(self) -> usize {
        2 * self.0 + 1
    }
}

/// Decay rate κ > 0 of a bound state with energy `E = -κ²`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Kappa(f64);

impl Kappa {
    pub fn new(kappa: f64) -> Result<Self> {
        if kappa.is_finite() && kappa > 0.0 {
            Ok(Kappa(kappa))
        } else {
            Err(Error::InvalidArgument(kappa))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn energy(self) -> f64 {
        -self.0 * self.0
    }
}

/// One eigenvalue record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundState {
    pub ell: usize,
    pub kappa: f64,
    pub energy: f64,
    pub degeneracy: usize,
    /// |channel secular function| at the reported root.
    pub residual: f64,
}

impl BoundState {
    pub fn new(channel: Channel, kappa: Kappa, residual: f64) -> Self {
        BoundState {
            ell: channel.ell(),
            kappa: kappa.value(),
            energy: kappa.energy(),
            degeneracy: channel.degeneracy(),
            residual,
        }
    }
}

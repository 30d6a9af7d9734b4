//! Per-channel boundary matrices.
//!
//! For constant couplings every spherical harmonic `Y_ℓm` diagonalises the
//! single-layer operators between shells, so the boundary operator reduces in
//! channel ℓ to the N×N matrix `I + m_ℓ(z) Θ` with
//! `m_ℓ(z)_ij = ik j_ℓ(k R_<) h⁽¹⁾_ℓ(k R_>)` and `Θ = diag(α_j R_j²)`.
//! `E = -κ²` is an eigenvalue of multiplicity `(2ℓ+1) dim ker` exactly when the
//! determinant vanishes.
//!
//! At `z = 0` and ℓ ≥ 1 the same condition is carried by the threshold matrix
//! `A_ℓ = D (I + m_ℓ(0) Θ) D⁻¹`, `D = diag(R_j)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ShellConfig;
use crate::specfun::green_factor;

/// An N×N matrix attached to one angular momentum channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub ell: usize,
    /// `None` for the zero-energy threshold matrix.
    pub kappa: Option<f64>,
    pub entries: DMatrix<f64>,
}

impl ChannelMatrix {
    pub fn determinant(&self) -> f64 {
        determinant(&self.entries)
    }
}

/// Determinant by LU with partial pivoting.
fn determinant(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        1 => m[(0, 0)],
        _ => m.clone().lu().determinant(),
    }
}

/// Single-layer matrix `m_ℓ(-κ²)`.
pub fn m_matrix(cfg: &ShellConfig, ell: usize, kappa: f64) -> Result<ChannelMatrix> {
    let n = cfg.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g = green_factor(ell, kappa, cfg.radii[i], cfg.radii[j])?.value;
            entries[(i, j)] = g;
            entries[(j, i)] = g;
        }
    }
    Ok(ChannelMatrix {
        ell,
        kappa: Some(kappa),
        entries,
    })
}

/// `K_ℓ(κ) = I + m_ℓ(-κ²) Θ`.
pub fn boundary_matrix(cfg: &ShellConfig, ell: usize, kappa: f64) -> Result<ChannelMatrix> {
    let mut k = m_matrix(cfg, ell, kappa)?;
    let theta = cfg.theta();
    for (j, t) in theta.iter().enumerate() {
        let mut col = k.entries.column_mut(j);
        col *= *t;
    }
    for i in 0..cfg.len() {
        k.entries[(i, i)] += 1.0;
    }
    Ok(k)
}

/// `det(I + m_ℓ(-κ²) Θ)`; its positive zeros are the decay rates of channel ℓ.
pub fn secular_det(cfg: &ShellConfig, ell: usize, kappa: f64) -> Result<f64> {
    Ok(boundary_matrix(cfg, ell, kappa)?.determinant())
}

/// Explicit 1×1 / 2×2 expansion of [`secular_det`], used to cross-check the LU path.
pub fn secular_det_closed_form(cfg: &ShellConfig, ell: usize, kappa: f64) -> Result<f64> {
    let t = cfg.theta();
    let g = |a: f64, b: f64| green_factor(ell, kappa, a, b).map(|g| g.value);
    match cfg.radii.as_slice() {
        [r] => Ok(1.0 + g(*r, *r)? * t[0]),
        [r1, r2] => {
            let (m11, m12, m22) = (g(*r1, *r1)?, g(*r1, *r2)?, g(*r2, *r2)?);
            Ok((1.0 + m11 * t[0]) * (1.0 + m22 * t[1]) - m12 * m12 * t[0] * t[1])
        }
        other => Err(Error::WrongShellCount(other.len())),
    }
}

/// Zero-energy matrix `a_ij = δ_ij + α_j/(2ℓ+1) · R_<^{ℓ+1} / R_>^ℓ` for ℓ ≥ 1.
pub fn threshold_matrix(cfg: &ShellConfig, ell: usize) -> Result<ChannelMatrix> {
    if ell == 0 {
        return Err(Error::SWaveThresholdForbidden);
    }
    let n = cfg.len();
    let l = ell as i32;
    let denom = (2 * ell + 1) as f64;
    let entries = DMatrix::from_fn(n, n, |i, j| {
        let (lo, hi) = if cfg.radii[i] <= cfg.radii[j] {
            (cfg.radii[i], cfg.radii[j])
        } else {
            (cfg.radii[j], cfg.radii[i])
        };
        let delta = if i == j { 1.0 } else { 0.0 };
        // R_<^{ℓ+1}/R_>^ℓ = R_< (R_</R_>)^ℓ
        delta + cfg.alphas[j] / denom * lo * (lo / hi).powi(l)
    });
    Ok(ChannelMatrix {
        ell,
        kappa: None,
        entries,
    })
}

/// `det A_ℓ`; zero iff `E = 0` is an L² eigenvalue in channel ℓ ≥ 1.
pub fn threshold_det(cfg: &ShellConfig, ell: usize) -> Result<f64> {
    Ok(threshold_matrix(cfg, ell)?.determinant())
}

/// Zero-energy analysis of one channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub ell: usize,
    pub det: f64,
    pub kernel_dim: usize,
    /// `(2ℓ+1) · kernel_dim`.
    pub multiplicity: usize,
    pub singular_values: Vec<f64>,
}

/// Singular values below this (relative to `max(1, σ_max)`) count towards the kernel.
pub const KERNEL_TOL: f64 = 1e-10;

pub fn threshold_report(cfg: &ShellConfig, ell: usize) -> Result<ThresholdReport> {
    let a = threshold_matrix(cfg, ell)?;
    let det = a.determinant();
    let mut singular_values: Vec<f64> = a.entries.clone().svd(false, false).singular_values.iter().copied().collect();
    singular_values.sort_by(|x, y| y.total_cmp(x));
    let scale = singular_values.first().copied().unwrap_or(1.0).max(1.0);
    let kernel_dim = singular_values
        .iter()
        .filter(|s| **s < KERNEL_TOL * scale)
        .count();
    Ok(ThresholdReport {
        ell,
        det,
        kernel_dim,
        multiplicity: (2 * ell + 1) * kernel_dim,
        singular_values,
    })
}

/// `α₂` for which the two-shell `A_ℓ` is singular, i.e. the solution of
/// `α₁α₂ R₁^{2ℓ+2} R₂^{-2ℓ} = (α₁R₁ + 2ℓ+1)(α₂R₂ + 2ℓ+1)` for given `(R₁, R₂, α₁)`.
///
/// `None` when the identity has no solution in `α₂`.
pub fn critical_outer_coupling(r1: f64, r2: f64, alpha1: f64, ell: usize) -> Option<f64> {
    let c = (2 * ell + 1) as f64;
    let p = r1.powi(2 * ell as i32 + 2) / r2.powi(2 * ell as i32);
    let inner = alpha1 * r1 + c;
    // α₂ (α₁ p - inner R₂) = c · inner
    let coeff = alpha1 * p - inner * r2;
    if coeff == 0.0 {
        return None;
    }
    Some(c * inner / coeff)
}

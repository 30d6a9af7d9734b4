//! Transfer-matrix verifier.
//!
//! Between shells the reduced radial function is `u = a·P(r) + b·Q(r)` with the
//! regular solution `P = r i_ℓ(κr)` and the decaying one `Q = r k_ℓ(κr)`. Starting
//! from the regular interior piece, each interface imposes continuity of `u` and
//! the jump `u'(R+) − u'(R−) = α u(R)` through a local 2×2 solve. A level sits at
//! `κ` exactly when the exterior piece has no growing component.
//!
//! Nothing here touches the single-layer matrix, so agreement with
//! [`crate::boundary`] is a genuine cross-check.
//!
//! Amplitudes are stored as contributions `g = a·P(ρ)`, `h = b·Q(ρ)` at a
//! reference radius `ρ`, normalised to unit max-norm with the log of the
//! dropped scale kept alongside.

use crate::error::{Error, Result};
use crate::model::ShellConfig;
use crate::specfun::{coth_stable, ln_sph_i, ln_sph_k, sph_i_ratio, sph_k_ratio};

/// `|mismatch|` above this means the supplied `κ` is not a level.
const ROOT_MISMATCH: f64 = 1e-6;

/// A pair of radial solutions used between interfaces.
pub trait RadialBasis {
    fn ln_growing(&self, r: f64) -> Result<f64>;
    fn ln_decaying(&self, r: f64) -> Result<f64>;
    /// `P'/P`.
    fn dlog_growing(&self, r: f64) -> Result<f64>;
    /// `Q'/Q`.
    fn dlog_decaying(&self, r: f64) -> Result<f64>;
}

/// `r i_ℓ(κr)` and `r k_ℓ(κr)`.
#[derive(Debug, Clone, Copy)]
pub struct BesselBasis {
    pub ell: usize,
    pub kappa: f64,
}

impl RadialBasis for BesselBasis {
    fn ln_growing(&self, r: f64) -> Result<f64> {
        Ok(r.ln() + ln_sph_i(self.ell, self.kappa * r)?)
    }

    fn ln_decaying(&self, r: f64) -> Result<f64> {
        Ok(r.ln() + ln_sph_k(self.ell, self.kappa * r)?)
    }

    fn dlog_growing(&self, r: f64) -> Result<f64> {
        let x = self.kappa * r;
        Ok((self.ell + 1) as f64 / r + self.kappa * sph_i_ratio(self.ell, x)?)
    }

    fn dlog_decaying(&self, r: f64) -> Result<f64> {
        let x = self.kappa * r;
        Ok((self.ell + 1) as f64 / r - self.kappa * sph_k_ratio(self.ell, x)?)
    }
}

/// `sinh(κr)` and `e^{−κr}`, the s-wave pieces written without Bessel functions.
#[derive(Debug, Clone, Copy)]
pub struct ExponentialBasis {
    pub kappa: f64,
}

impl RadialBasis for ExponentialBasis {
    fn ln_growing(&self, r: f64) -> Result<f64> {
        let x = self.kappa * r;
        Ok(x + (-(-2.0 * x).exp_m1() / 2.0).ln())
    }

    fn ln_decaying(&self, r: f64) -> Result<f64> {
        Ok(-self.kappa * r)
    }

    fn dlog_growing(&self, r: f64) -> Result<f64> {
        Ok(self.kappa * coth_stable(self.kappa * r))
    }

    fn dlog_decaying(&self, _r: f64) -> Result<f64> {
        Ok(-self.kappa)
    }
}

/// Normalised contributions of the two basis functions in one region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionAmplitudes {
    /// Radius at which the contributions are quoted.
    pub reference: f64,
    pub growing: f64,
    pub decaying: f64,
    /// Natural log of the factor removed by normalisation.
    pub log_scale: f64,
}

impl RegionAmplitudes {
    fn normalised(reference: f64, growing: f64, decaying: f64, log_scale: f64) -> Self {
        let m = growing.abs().max(decaying.abs());
        if m > 0.0 && m.is_finite() {
            RegionAmplitudes {
                reference,
                growing: growing / m,
                decaying: decaying / m,
                log_scale: log_scale + m.ln(),
            }
        } else {
            RegionAmplitudes { reference, growing, decaying, log_scale }
        }
    }

    /// The same solution quoted at another radius of the same region.
    fn moved<B: RadialBasis>(&self, basis: &B, to: f64) -> Result<Self> {
        let lg = ln_abs(self.growing) + basis.ln_growing(to)? - basis.ln_growing(self.reference)?;
        let lh = ln_abs(self.decaying) + basis.ln_decaying(to)? - basis.ln_decaying(self.reference)?;
        let top = lg.max(lh);
        Ok(RegionAmplitudes {
            reference: to,
            growing: self.growing.signum() * (lg - top).exp(),
            decaying: self.decaying.signum() * (lh - top).exp(),
            log_scale: self.log_scale + top,
        })
    }
}

fn ln_abs(x: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        x.abs().ln()
    }
}

/// Amplitudes for the `N + 1` regions cut out by `N` shells, innermost first.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCoefficients {
    pub ell: usize,
    pub kappa: f64,
    pub regions: Vec<RegionAmplitudes>,
}

impl RegionCoefficients {
    pub fn exterior(&self) -> &RegionAmplitudes {
        self.regions.last().expect("at least the interior region")
    }

    /// Unnormalised `(a, b)` multiplying `(r i_ℓ(κr), r k_ℓ(κr))` in each region,
    /// or `None` where they are not representable.
    pub fn raw(&self) -> Result<Vec<Option<(f64, f64)>>> {
        let basis = BesselBasis { ell: self.ell, kappa: self.kappa };
        self.regions
            .iter()
            .map(|reg| {
                let a = reg.growing * (reg.log_scale - basis.ln_growing(reg.reference)?).exp();
                let b = reg.decaying * (reg.log_scale - basis.ln_decaying(reg.reference)?).exp();
                Ok((a.is_finite() && b.is_finite()).then_some((a, b)))
            })
            .collect()
    }
}

fn propagate_in<B: RadialBasis>(cfg: &ShellConfig, basis: &B) -> Result<Vec<RegionAmplitudes>> {
    let mut regions = Vec::with_capacity(cfg.len() + 1);
    let mut current = RegionAmplitudes { reference: cfg.radii[0], growing: 1.0, decaying: 0.0, log_scale: 0.0 };
    regions.push(current);
    for (j, (&radius, &alpha)) in cfg.radii.iter().zip(&cfg.alphas).enumerate() {
        if j > 0 {
            current = current.moved(basis, radius)?;
        }
        let lp = basis.dlog_growing(radius)?;
        let lq = basis.dlog_decaying(radius)?;
        let u = current.growing + current.decaying;
        let du = current.growing * lp + current.decaying * lq + alpha * u;
        // [1 1; lp lq] (g, h)ᵀ = (u, du)ᵀ
        let det = lq - lp;
        if !(det.abs() > 8.0 * f64::EPSILON * (lp.abs() + lq.abs())) {
            return Err(Error::SingularWronskian(radius));
        }
        let g = (u * lq - du) / det;
        let h = (du - u * lp) / det;
        current = RegionAmplitudes::normalised(radius, g, h, current.log_scale);
        regions.push(current);
    }
    Ok(regions)
}

fn check(cfg: &ShellConfig, kappa: f64) -> Result<()> {
    if cfg.is_empty() {
        return Err(Error::EmptyConfig);
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidArgument(kappa));
    }
    Ok(())
}

/// Region-by-region amplitudes of the solution that is regular at the origin.
pub fn propagate(cfg: &ShellConfig, ell: usize, kappa: f64) -> Result<RegionCoefficients> {
    check(cfg, kappa)?;
    let regions = propagate_in(cfg, &BesselBasis { ell, kappa })?;
    Ok(RegionCoefficients { ell, kappa, regions })
}

fn normalised_growing(ext: &RegionAmplitudes) -> f64 {
    ext.growing / ext.growing.abs().max(ext.decaying.abs())
}

/// Exterior growing amplitude over the larger of the two exterior amplitudes
/// at `R_N`; vanishes exactly at a level.
pub fn mismatch(cfg: &ShellConfig, ell: usize, kappa: f64) -> Result<f64> {
    let coeffs = propagate(cfg, ell, kappa)?;
    Ok(normalised_growing(coeffs.exterior()))
}

/// The s-wave mismatch computed with `sinh`/`e^{−κr}` pieces only.
pub fn mismatch_s_wave_elementary(cfg: &ShellConfig, kappa: f64) -> Result<f64> {
    check(cfg, kappa)?;
    let regions = propagate_in(cfg, &ExponentialBasis { kappa })?;
    Ok(normalised_growing(regions.last().expect("nonempty")))
}

/// One point of a radial profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub r: f64,
    pub u: f64,
    pub du: f64,
}

/// The bound-state profile `u(r)` at a level, normalised to `max |u| = 1` over
/// the supplied grid. Samples exactly on a shell take the inner-side derivative.
pub fn eigenfunction_samples(
    cfg: &ShellConfig,
    ell: usize,
    kappa_root: f64,
    r_grid: &[f64],
) -> Result<Vec<ProfileSample>> {
    let mut coeffs = propagate(cfg, ell, kappa_root)?;
    let m = normalised_growing(coeffs.exterior());
    if m.abs() > ROOT_MISMATCH {
        return Err(Error::NotARoot { kappa: kappa_root, mismatch: m });
    }
    let last = coeffs.regions.len() - 1;
    coeffs.regions[last].growing = 0.0;

    let basis = BesselBasis { ell, kappa: kappa_root };
    // (sign·exp(ln_mag), log-derivative) per sample, magnitudes kept in logs
    let mut raw = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidArgument(r));
        }
        let k = cfg.radii.partition_point(|&radius| radius < r);
        let reg = &coeffs.regions[k];
        let lg = ln_abs(reg.growing) + basis.ln_growing(r)? - basis.ln_growing(reg.reference)?;
        let lh = ln_abs(reg.decaying) + basis.ln_decaying(r)? - basis.ln_decaying(reg.reference)?;
        let top = lg.max(lh);
        let wg = reg.growing.signum() * (lg - top).exp();
        let wh = reg.decaying.signum() * (lh - top).exp();
        let u = wg + wh;
        let du = wg * basis.dlog_growing(r)? + wh * basis.dlog_decaying(r)?;
        raw.push((r, u, du, reg.log_scale + top));
    }
    let peak = raw
        .iter()
        .filter(|s| s.1 != 0.0)
        .map(|s| s.1.abs().ln() + s.3)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(raw
        .into_iter()
        .map(|(r, u, du, ln)| {
            let f = (ln - peak).exp();
            ProfileSample { r, u: u * f, du: du * f }
        })
        .collect())
}

/// Sign changes of `u` over a profile, ignoring exact zeros.
pub fn count_nodes(samples: &[ProfileSample]) -> usize {
    let signs: Vec<f64> = samples.iter().filter(|s| s.u != 0.0).map(|s| s.u.signum()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

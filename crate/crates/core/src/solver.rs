//! Bracketing and refinement of channel roots, spectrum enumeration across
//! channels, and the tuned two-shell splitting sweep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::secular_det;
use crate::error::{Error, Result};
use crate::model::{BoundState, Channel, Kappa, ShellConfig};
use crate::roots::{brent, fit_line, golden_min, Tolerance};
use crate::secular::{double_root_residual, splitting_constant, TwoShell};

/// Minima of `|f|` below this without a sign change are flagged as tangencies.
const TANGENCY_LEVEL: f64 = 1e-6;
/// Sub-intervals per pair of grid cells in the refinement pass (4× resolution).
const REFINE_POINTS: usize = 8;

/// Where and how finely to look for roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPlan {
    pub kappa_min: f64,
    pub kappa_max: f64,
    /// Geometrically spaced sample count.
    pub grid_points: usize,
    pub ell_max: usize,
    /// Relative tolerance on κ for refined roots.
    pub tol: f64,
    /// Largest acceptable `|secular|` at a refined root.
    pub residual_tol: f64,
}

impl Default for ScanPlan {
    fn default() -> Self {
        ScanPlan {
            kappa_min: 1e-6,
            kappa_max: 10.0,
            grid_points: 2000,
            ell_max: 32,
            tol: 1e-12,
            residual_tol: 1e-9,
        }
    }
}

impl ScanPlan {
    /// Defaults with `kappa_max` safely above the largest possible decay rate.
    ///
    /// In every channel a level needs `‖|Θ|^{1/2} m_ℓ |Θ|^{1/2}‖ ≥ 1`, and since
    /// `R² m_ℓ(−κ²)_jj < 1/(2κ)` that forces `κ < Σ_j max(−α_j, 0)/2`.
    pub fn for_config(cfg: &ShellConfig) -> Self {
        ScanPlan {
            kappa_max: 1.1 * cfg.attraction() / 2.0 + 1.0,
            ..ScanPlan::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidPlan(m.to_string()));
        if !(self.kappa_min.is_finite() && self.kappa_min > 0.0) {
            return bad("kappa_min must be positive");
        }
        if !(self.kappa_max.is_finite() && self.kappa_max > self.kappa_min) {
            return bad("kappa_max must exceed kappa_min");
        }
        if self.grid_points < 16 {
            return bad("grid_points must be at least 16");
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if !(self.residual_tol.is_finite() && self.residual_tol > 0.0) {
            return bad("residual_tol must be positive");
        }
        Ok(())
    }

    /// Log-spaced κ samples from `kappa_min` to `kappa_max` inclusive.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_points;
        let ratio = (self.kappa_max / self.kappa_min).ln() / (n - 1) as f64;
        (0..n)
            .map(|i| match i {
                0 => self.kappa_min,
                i if i == n - 1 => self.kappa_max,
                i => self.kappa_min * (ratio * i as f64).exp(),
            })
            .collect()
    }
}

/// Diagnostics raised during a scan; none of them is fatal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum ScanHint {
    /// Two roots were found inside a pair of grid cells with no sign change at
    /// the grid points.
    GridTooCoarse { ell: usize, kappa_lo: f64, kappa_hi: f64 },
    /// A near-zero minimum without a sign change. `residual` holds
    /// `(F_d, F_d')` for the two-shell s-wave.
    DoubleRootCandidate {
        ell: usize,
        kappa: f64,
        value: f64,
        residual: Option<(f64, f64)>,
    },
}

/// A refined root of a channel function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelRoot {
    pub kappa: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelRoots {
    pub ell: usize,
    pub roots: Vec<ChannelRoot>,
    pub hints: Vec<ScanHint>,
}

/// The function whose zeros are the decay rates of channel ℓ: the scaled
/// closed form for the two-shell s-wave, the boundary determinant otherwise.
pub fn channel_function(cfg: &ShellConfig, ell: usize, kappa: f64) -> Result<f64> {
    if cfg.len() == 2 && ell == 0 {
        Ok(TwoShell::from_config(cfg)?.scaled(kappa))
    } else {
        secular_det(cfg, ell, kappa)
    }
}

/// All roots of `f` on the plan's grid: sign-change brackets refined by Brent,
/// plus a second look at every pronounced local minimum of `|f|`.
///
/// `residual` is consulted at tangency candidates only.
pub fn find_roots_of<F, R>(f: F, ell: usize, plan: &ScanPlan, residual: R) -> Result<ChannelRoots>
where
    F: Fn(f64) -> Result<f64> + Sync,
    R: Fn(f64) -> Option<(f64, f64)>,
{
    plan.validate()?;
    let grid = plan.grid();
    let values: Vec<f64> = grid.par_iter().map(|&k| f(k)).collect::<Result<_>>()?;
    let tol = Tolerance::relative(plan.tol);

    let mut roots = Vec::new();
    let mut hints = Vec::new();
    let refine = |lo: f64, hi: f64, flo: f64, fhi: f64, roots: &mut Vec<ChannelRoot>| -> Result<()> {
        if let Some(r) = brent(&f, lo, hi, flo, fhi, tol)? {
            roots.push(ChannelRoot { kappa: r.x, residual: r.fx.abs() });
        }
        Ok(())
    };

    for i in 0..grid.len() - 1 {
        let (a, b) = (values[i], values[i + 1]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        if a == 0.0 {
            roots.push(ChannelRoot { kappa: grid[i], residual: 0.0 });
        } else if a * b < 0.0 {
            refine(grid[i], grid[i + 1], a, b, &mut roots)?;
        }
    }
    if values[grid.len() - 1] == 0.0 {
        roots.push(ChannelRoot { kappa: grid[grid.len() - 1], residual: 0.0 });
    }

    for i in 1..grid.len() - 1 {
        let (l, m, r) = (values[i - 1], values[i], values[i + 1]);
        if !(l.is_finite() && m.is_finite() && r.is_finite()) || m == 0.0 {
            continue;
        }
        let sigma = m.signum();
        let (sl, sm, sr) = (sigma * l, sigma * m, sigma * r);
        if !(sl > 0.0 && sr > 0.0 && sm < sl && sm < sr) {
            continue;
        }
        // ignore rounding-level ripples
        if sl.min(sr) - sm <= 1e-10 * sm.max(1.0) && sm > TANGENCY_LEVEL {
            continue;
        }
        let (lo, hi) = (grid[i - 1], grid[i + 1]);
        let sub: Vec<f64> = (0..=REFINE_POINTS)
            .map(|j| lo * (hi / lo).powf(j as f64 / REFINE_POINTS as f64))
            .collect();
        let sub_vals: Vec<f64> = sub.iter().map(|&k| f(k)).collect::<Result<_>>()?;
        let crossings: Vec<usize> = (0..REFINE_POINTS)
            .filter(|&j| sub_vals[j] * sub_vals[j + 1] < 0.0)
            .collect();
        if !crossings.is_empty() {
            for j in crossings {
                refine(sub[j], sub[j + 1], sub_vals[j], sub_vals[j + 1], &mut roots)?;
            }
            hints.push(ScanHint::GridTooCoarse { ell, kappa_lo: lo, kappa_hi: hi });
            continue;
        }
        let best = (0..=REFINE_POINTS)
            .min_by(|&x, &y| (sigma * sub_vals[x]).total_cmp(&(sigma * sub_vals[y])))
            .expect("nonempty");
        let (wlo, whi) = (sub[best.saturating_sub(1)], sub[(best + 1).min(REFINE_POINTS)]);
        let (x, v) = golden_min(|k| f(k).map(|y| sigma * y), wlo, whi, 1e-14)?;
        if v < 0.0 {
            let fl = f(lo)?;
            let fx = f(x)?;
            let fh = f(hi)?;
            refine(lo, x, fl, fx, &mut roots)?;
            refine(x, hi, fx, fh, &mut roots)?;
            hints.push(ScanHint::GridTooCoarse { ell, kappa_lo: lo, kappa_hi: hi });
        } else if v < TANGENCY_LEVEL {
            hints.push(ScanHint::DoubleRootCandidate {
                ell,
                kappa: x,
                value: sigma * v,
                residual: residual(x),
            });
        }
    }

    roots.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
    let mut merged: Vec<ChannelRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last_mut() {
            Some(prev) if (r.kappa - prev.kappa).abs() <= 10.0 * plan.tol * r.kappa => {
                if r.residual < prev.residual {
                    *prev = r;
                }
            }
            _ => merged.push(r),
        }
    }
    Ok(ChannelRoots { ell, roots: merged, hints })
}

/// Decay rates in channel ℓ, ascending.
pub fn find_channel_roots(cfg: &ShellConfig, ell: usize, plan: &ScanPlan) -> Result<ChannelRoots> {
    let two_shell_s = cfg.len() == 2 && ell == 0;
    find_roots_of(
        |k| channel_function(cfg, ell, k),
        ell,
        plan,
        |k| two_shell_s.then(|| double_root_residual(k, cfg).ok()).flatten(),
    )
}

/// All negative eigenvalues found up to the stopping channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Sorted by energy, lowest first.
    pub states: Vec<BoundState>,
    /// `(ℓ, number of distinct decay rates)` for every scanned channel.
    pub per_channel_counts: Vec<(usize, usize)>,
    pub hints: Vec<ScanHint>,
    /// The last scanned channel (`ell_max`) still had roots.
    pub truncated: bool,
}

impl Spectrum {
    pub fn ground_state(&self) -> Option<&BoundState> {
        self.states.first()
    }

    /// Fails if the scan hit `ell_max` before an empty channel.
    pub fn require_complete(&self, ell_max: usize) -> Result<&Self> {
        if self.truncated {
            Err(Error::EllMaxReached(ell_max))
        } else {
            Ok(self)
        }
    }
}

fn check_counts(cfg: &ShellConfig, counts: &[(usize, usize)], states: &[BoundState]) -> Result<()> {
    let s_wave = counts.first().map_or(0, |c| c.1);
    if s_wave > cfg.len() {
        return Err(Error::CountingViolation(format!(
            "{s_wave} s-wave levels for {} shells",
            cfg.len()
        )));
    }
    for w in counts.windows(2) {
        if w[1].1 > w[0].1 {
            return Err(Error::CountingViolation(format!(
                "channel {} has {} levels, channel {} only {}",
                w[1].0, w[1].1, w[0].0, w[0].1
            )));
        }
    }
    if let Some(g) = states.first() {
        if g.ell != 0 {
            return Err(Error::CountingViolation(format!(
                "lowest level lies in channel {}",
                g.ell
            )));
        }
    }
    Ok(())
}

/// Scans ℓ = 0, 1, … and stops at the first empty channel (the centrifugal
/// term only raises the radial form), or at `plan.ell_max`.
pub fn enumerate_spectrum(cfg: &ShellConfig, plan: &ScanPlan) -> Result<Spectrum> {
    plan.validate()?;
    let mut states = Vec::new();
    let mut counts = Vec::new();
    let mut hints = Vec::new();
    let mut truncated = false;
    for ell in 0..=plan.ell_max {
        let found = find_channel_roots(cfg, ell, plan)?;
        counts.push((ell, found.roots.len()));
        hints.extend(found.hints);
        if found.roots.is_empty() {
            break;
        }
        for r in &found.roots {
            states.push(BoundState::new(Channel(ell), Kappa::new(r.kappa)?, r.residual));
        }
        if ell == plan.ell_max {
            truncated = true;
        }
    }
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.ell.cmp(&b.ell)));
    check_counts(cfg, &counts, &states)?;
    Ok(Spectrum { states, per_channel_counts: counts, hints, truncated })
}

/// One separation of the tuned splitting sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplittingRow {
    pub d: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    /// `|κ₊² − κ₋²|`.
    pub gap: f64,
    /// `4κ₀ C e^{−κ₀d}`.
    pub predicted_gap: f64,
    pub ratio: f64,
    /// `(κ₊ + κ₋)/2 − κ₀`.
    pub midpoint_shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingReport {
    pub kappa0: f64,
    pub alpha2_tuned: f64,
    pub c_const: f64,
    pub rows: Vec<SplittingRow>,
    /// Least-squares slope of `ln gap` against `d`.
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
    /// First separation at which the pair could not be told apart.
    pub d_cutoff: Option<f64>,
}

impl SplittingReport {
    /// Decay rate of the gap, to be compared with `κ₀`.
    pub fn fitted_exponent(&self) -> f64 {
        -self.fitted_slope
    }
}

/// Brackets `S` around a point where it is negative.
fn pair_around(shell: &TwoShell, k0: f64, w0: f64) -> Option<(f64, f64)> {
    let s = |k: f64| Ok::<_, Error>(shell.scaled(k));
    let s0 = shell.scaled(k0);
    if !(s0 < 0.0) {
        return None;
    }
    let cap = 0.99 * k0;
    let mut w = w0.min(cap);
    while shell.scaled(k0 - w) <= 0.0 || shell.scaled(k0 + w) <= 0.0 {
        if w >= cap {
            return None;
        }
        w = (2.0 * w).min(cap);
    }
    let tol = Tolerance::relative(0.0);
    let lo = brent(s, k0 - w, k0, shell.scaled(k0 - w), s0, tol).ok()??;
    let hi = brent(s, k0, k0 + w, s0, shell.scaled(k0 + w), tol).ok()??;
    // both ends must be told apart well beyond the refinement tolerance
    let floor = 1e3 * 4.0 * f64::EPSILON * k0;
    (hi.x - lo.x > floor).then_some((hi.x, lo.x))
}

/// Tunes the outer coupling so both decoupled levels sit at `κ₀` and tracks
/// the split pair over `d_grid`.
pub fn splitting_curve(r1: f64, alpha1: f64, d_grid: &[f64], plan: &ScanPlan) -> Result<SplittingReport> {
    plan.validate()?;
    if d_grid.is_empty() || d_grid.windows(2).any(|w| !(w[1] > w[0])) || !(d_grid[0] > 0.0) {
        return Err(Error::InvalidPlan("d grid must be positive and increasing".into()));
    }
    let c = splitting_constant(r1, alpha1)?;
    let c_const = c.value();
    let tuning = crate::secular::tune_for_splitting(r1, alpha1)?;
    let k0 = tuning.kappa0;
    let w0 = 10.0 * c_const * (-k0 * d_grid[0]).exp();

    let pairs: Vec<Option<(f64, f64)>> = d_grid
        .par_iter()
        .map(|&d| {
            let shell = TwoShell { r1, d, alpha1, alpha2: tuning.alpha2 };
            pair_around(&shell, k0, w0)
        })
        .collect();

    let mut rows = Vec::new();
    let mut d_cutoff = None;
    for (&d, pair) in d_grid.iter().zip(pairs) {
        let Some((kp, km)) = pair else {
            d_cutoff = Some(d);
            break;
        };
        let gap = (kp - km) * (kp + km);
        let predicted_gap = 4.0 * k0 * c_const * (-k0 * d).exp();
        rows.push(SplittingRow {
            d,
            kappa_plus: kp,
            kappa_minus: km,
            gap,
            predicted_gap,
            ratio: gap / predicted_gap,
            midpoint_shift: 0.5 * (kp + km) - k0,
        });
    }
    if rows.len() < 4 {
        return Err(Error::RootsNotResolved {
            d_cutoff: d_cutoff.unwrap_or(d_grid[d_grid.len() - 1]),
            usable: rows.len(),
        });
    }
    let ds: Vec<f64> = rows.iter().map(|r| r.d).collect();
    let logs: Vec<f64> = rows.iter().map(|r| r.gap.ln()).collect();
    let (fitted_slope, fitted_intercept) = fit_line(&ds, &logs);
    Ok(SplittingReport {
        kappa0: k0,
        alpha2_tuned: tuning.alpha2,
        c_const,
        rows,
        fitted_slope,
        fitted_intercept,
        d_cutoff,
    })
}

/// Forbidden-region action `κ₀ (R₂ − R₁)` at the tuned energy.
pub fn agmon_distance(kappa0: f64, r1: f64, r2: f64) -> f64 {
    kappa0 * (r2 - r1)
}

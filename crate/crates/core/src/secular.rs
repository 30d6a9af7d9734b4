//! Closed forms for the s-wave channel of two concentric shells.
//!
//! With `γ₁(κ) = α₁ + κ coth(κR₁)` and `d = R₂ − R₁`, the s-wave levels are the
//! positive zeros of
//!
//! ```text
//! F_d(κ) = A(κ) cosh(κd) + B(κ) sinh(κd),   A = γ₁ + α₂ + κ,   B = κ + γ₁ + α₂γ₁/κ
//!        = ½ [F_∞(κ) e^{κd} + G(κ) e^{−κd}],
//! F_∞(κ) = (κ + γ₁)(2κ + α₂)/κ,              G(κ) = α₂(1 − γ₁/κ).
//! ```
//!
//! Root finding works on `S(κ) = 2e^{−κd} F_d(κ) = F_∞ + G e^{−2κd}`, which has the
//! sign of `F_d` and never overflows.

use crate::error::{Error, Result};
use crate::model::ShellConfig;
use crate::roots::{brent, Tolerance};
use crate::specfun::{coth_stable, d2_t_coth_t, d_t_coth_t};

/// Above this `κd` the hyperbolic functions are replaced by the split form.
const DIRECT_LIMIT: f64 = 30.0;
/// `cosh` overflows shortly after this.
const MATRIX_LIMIT: f64 = 700.0;
/// `|F_∞'|` below this makes a one-shell root degenerate.
const DEGENERATE_SLOPE: f64 = 1e-12;

/// The four numbers a two-shell configuration reduces to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoShell {
    pub r1: f64,
    pub d: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl TwoShell {
    pub fn from_config(cfg: &ShellConfig) -> Result<Self> {
        if cfg.len() != 2 {
            return Err(Error::WrongShellCount(cfg.len()));
        }
        Ok(TwoShell {
            r1: cfg.radii[0],
            d: cfg.radii[1] - cfg.radii[0],
            alpha1: cfg.alphas[0],
            alpha2: cfg.alphas[1],
        })
    }

    pub fn r2(&self) -> f64 {
        self.r1 + self.d
    }

    fn gamma1(&self, kappa: f64) -> f64 {
        gamma1(kappa, self.r1, self.alpha1)
    }

    /// `(A, B)` of the hyperbolic form.
    fn coefficients(&self, kappa: f64) -> (f64, f64) {
        let g1 = self.gamma1(kappa);
        let a = g1 + self.alpha2 + kappa;
        let b = kappa + g1 + self.alpha2 * g1 / kappa;
        (a, b)
    }

    pub fn f_inf(&self, kappa: f64) -> f64 {
        (kappa + self.gamma1(kappa)) * (2.0 * kappa + self.alpha2) / kappa
    }

    pub fn g(&self, kappa: f64) -> f64 {
        self.alpha2 * (1.0 - self.gamma1(kappa) / kappa)
    }

    /// `S(κ) = F_∞ + G e^{−2κd}`, arranged so that neither `κ → 0` nor a near
    /// double zero of `F_∞` costs accuracy.
    pub fn scaled(&self, kappa: f64) -> f64 {
        let p = kappa + self.gamma1(kappa);
        let e = (-2.0 * kappa * self.d).exp();
        let one_minus_e = -(-2.0 * kappa * self.d).exp_m1();
        p * (2.0 + self.alpha2 * one_minus_e / kappa) + 2.0 * self.alpha2 * e
    }

    /// `dF_∞/dκ`.
    pub fn f_inf_prime(&self, kappa: f64) -> f64 {
        let p = kappa + self.gamma1(kappa);
        let dp = 1.0 + gamma1_prime(kappa, self.r1);
        let q = 2.0 * kappa + self.alpha2;
        (dp * q + 2.0 * p) / kappa - p * q / (kappa * kappa)
    }

    /// `d²F_∞/dκ²`.
    pub fn f_inf_second(&self, kappa: f64) -> f64 {
        let p = kappa + self.gamma1(kappa);
        let dp = 1.0 + gamma1_prime(kappa, self.r1);
        let ddp = gamma1_second(kappa, self.r1);
        let q = 2.0 * kappa + self.alpha2;
        let n = p * q;
        let dn = dp * q + 2.0 * p;
        let ddn = ddp * q + 4.0 * dp;
        ddn / kappa - 2.0 * dn / (kappa * kappa) + 2.0 * n / (kappa * kappa * kappa)
    }
}

/// `γ₁(κ) = α₁ + κ coth(κR₁)`; tends to `α₁ + 1/R₁` as `κ → 0⁺`.
pub fn gamma1(kappa: f64, r1: f64, alpha1: f64) -> f64 {
    alpha1 + kappa * coth_stable(kappa * r1)
}

/// `γ₁'(κ) = coth(κR₁) − κR₁ csch²(κR₁) > 0`.
pub fn gamma1_prime(kappa: f64, r1: f64) -> f64 {
    d_t_coth_t(kappa * r1)
}

/// `γ₁''(κ)`.
pub fn gamma1_second(kappa: f64, r1: f64) -> f64 {
    r1 * d2_t_coth_t(kappa * r1)
}

/// `F_d(κ)`. Uses the split form once `κd > 30`; may be infinite for huge `κd`.
pub fn secular_f(kappa: f64, cfg: &ShellConfig) -> Result<f64> {
    let shell = TwoShell::from_config(cfg)?;
    let x = kappa * shell.d;
    if x <= DIRECT_LIMIT {
        let (a, b) = shell.coefficients(kappa);
        Ok(a * x.cosh() + b * x.sinh())
    } else {
        Ok(0.5 * x.exp() * shell.scaled(kappa))
    }
}

/// `S(κ) = 2e^{−κd} F_d(κ)`, the function the solver brackets.
pub fn scaled_secular(kappa: f64, cfg: &ShellConfig) -> Result<f64> {
    Ok(TwoShell::from_config(cfg)?.scaled(kappa))
}

/// The matching matrix whose kernel holds the boundary data `(X(R₁), Y(R₁))`;
/// `det M = −κ F_d`.
pub fn matching_matrix(kappa: f64, cfg: &ShellConfig) -> Result<[[f64; 2]; 2]> {
    let shell = TwoShell::from_config(cfg)?;
    let x = kappa * shell.d;
    if x > MATRIX_LIMIT {
        return Err(Error::MatchingOverflow(x));
    }
    let (c, s) = (x.cosh(), x.sinh());
    let a2k = shell.alpha2 + kappa;
    Ok([
        [-shell.gamma1(kappa), kappa],
        [a2k * c + kappa * s, a2k * s + kappa * c],
    ])
}

/// `F_∞`, `G` and the scaled secular value at one `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitForm {
    pub f_inf: f64,
    pub g: f64,
    pub kappa: f64,
    pub d: f64,
    /// `F_∞ + G e^{−2κd}`, evaluated without cancellation.
    pub scaled: f64,
}

impl SplitForm {
    /// `½(F_∞ e^{κd} + G e^{−κd})`.
    pub fn f_d(&self) -> f64 {
        let x = self.kappa * self.d;
        0.5 * (self.f_inf * x.exp() + self.g * (-x).exp())
    }
}

pub fn split_form(kappa: f64, cfg: &ShellConfig) -> Result<SplitForm> {
    let shell = TwoShell::from_config(cfg)?;
    Ok(SplitForm {
        f_inf: shell.f_inf(kappa),
        g: shell.g(kappa),
        kappa,
        d: shell.d,
        scaled: shell.scaled(kappa),
    })
}

/// Decay rates of the two shells taken one at a time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneShellRoots {
    /// Root of `κ + γ₁(κ)`; exists iff `α₁ < −1/R₁`.
    pub kappa_in: Option<f64>,
    /// `−α₂/2`; exists iff `α₂ < 0`.
    pub kappa_out: Option<f64>,
    /// Whether the outer shell alone binds (`α₂ < −1/R₂`).
    pub outer_binds: bool,
}

/// The unique positive zero of `κ + γ₁(κ)`, if any.
pub fn inner_root(r1: f64, alpha1: f64) -> Option<f64> {
    if alpha1 >= -1.0 / r1 {
        return None;
    }
    let h = |k: f64| Ok::<_, Error>(k + gamma1(k, r1, alpha1));
    // κ + γ₁ > α₁ + 2κ, so the upper end is already positive.
    let hi = -alpha1 / 2.0;
    let mut lo = hi * 1e-6;
    let mut h_lo = h(lo).ok()?;
    while h_lo >= 0.0 && lo > f64::MIN_POSITIVE {
        lo *= 1e-6;
        h_lo = h(lo).ok()?;
    }
    let h_hi = h(hi).ok()?;
    brent(h, lo, hi, h_lo, h_hi, Tolerance::relative(0.0))
        .ok()
        .flatten()
        .map(|r| r.x)
}

pub fn one_shell_roots(cfg: &ShellConfig) -> Result<OneShellRoots> {
    let shell = TwoShell::from_config(cfg)?;
    Ok(OneShellRoots {
        kappa_in: inner_root(shell.r1, shell.alpha1),
        kappa_out: (shell.alpha2 < 0.0).then(|| -shell.alpha2 / 2.0),
        outer_binds: shell.alpha2 < -1.0 / shell.r2(),
    })
}

/// Which decoupled level a large-separation expansion starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Inner,
    Outer,
}

/// Prefactor `P` in `κ(d) ≈ κ• + P e^{−2κ• d}`, namely `−G(κ•)/F_∞'(κ•)`.
pub fn large_d_correction(cfg: &ShellConfig, which: Level) -> Result<f64> {
    let shell = TwoShell::from_config(cfg)?;
    let roots = one_shell_roots(cfg)?;
    let kappa = match which {
        Level::Inner => roots.kappa_in,
        Level::Outer => roots.kappa_out,
    }
    .ok_or(Error::MissingRoot)?;
    let slope = shell.f_inf_prime(kappa);
    if slope.abs() < DEGENERATE_SLOPE {
        return Err(Error::DegenerateRoot { kappa, derivative: slope });
    }
    Ok(-shell.g(kappa) / slope)
}

/// Parameters at which the two decoupled levels coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuning {
    pub kappa0: f64,
    pub alpha2: f64,
}

pub fn tune_for_splitting(r1: f64, alpha1: f64) -> Result<Tuning> {
    let kappa0 = inner_root(r1, alpha1).ok_or(Error::NoInnerBoundState { r1, alpha1 })?;
    Ok(Tuning { kappa0, alpha2: -2.0 * kappa0 })
}

/// The splitting constant `C = (−2G(κ₀)/F_∞''(κ₀))^{1/2}` computed twice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingConstant {
    /// `κ₀ √(2/(1+γ₁'(κ₀)))`.
    pub analytic: f64,
    /// From a Richardson-extrapolated second difference of `F_∞`.
    pub numeric: f64,
}

impl SplittingConstant {
    pub fn value(&self) -> f64 {
        self.analytic
    }

    pub fn relative_disagreement(&self) -> f64 {
        ((self.analytic - self.numeric) / self.analytic).abs()
    }
}

pub fn splitting_constant(r1: f64, alpha1: f64) -> Result<SplittingConstant> {
    let tuning = tune_for_splitting(r1, alpha1)?;
    let k0 = tuning.kappa0;
    let analytic = k0 * (2.0 / (1.0 + gamma1_prime(k0, r1))).sqrt();

    let shell = TwoShell { r1, d: 1.0, alpha1, alpha2: tuning.alpha2 };
    let second = |h: f64| {
        (shell.f_inf(k0 + h) - 2.0 * shell.f_inf(k0) + shell.f_inf(k0 - h)) / (h * h)
    };
    let h = 1e-3 * k0;
    let f2 = (4.0 * second(h / 2.0) - second(h)) / 3.0;
    let numeric = (-2.0 * shell.g(k0) / f2).sqrt();
    Ok(SplittingConstant { analytic, numeric })
}

/// `(F_d(κ), F_d'(κ))`; both vanish together exactly at a multiple root.
pub fn double_root_residual(kappa: f64, cfg: &ShellConfig) -> Result<(f64, f64)> {
    let shell = TwoShell::from_config(cfg)?;
    let (a, b) = shell.coefficients(kappa);
    let g1 = shell.gamma1(kappa);
    let dg1 = gamma1_prime(kappa, shell.r1);
    let da = 1.0 + dg1;
    let db = 1.0 + dg1 + shell.alpha2 * (dg1 / kappa - g1 / (kappa * kappa));
    let x = kappa * shell.d;
    let (c, s) = (x.cosh(), x.sinh());
    let value = a * c + b * s;
    let slope = (da + shell.d * b) * c + (db + shell.d * a) * s;
    Ok((value, slope))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(r1: f64, d: f64, a1: f64, a2: f64) -> ShellConfig {
        ShellConfig::two_shell(r1, d, a1, a2).unwrap()
    }

    #[test]
    fn gamma1_examples() {
        assert!((gamma1(1e-9, 1.0, -2.0) + 1.0).abs() < 1e-15);
        assert!((gamma1(1.0, 1.0, 0.0) - 1.3130352854993313036).abs() < 1e-15);
        assert_eq!(gamma1(700.0, 1.0, 0.0), 700.0);
    }

    #[test]
    fn determinant_and_split_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let r1: f64 = rng.random_range(0.2..5.0);
            let d: f64 = rng.random_range(0.1..10.0);
            let a1 = rng.random_range(-10.0..10.0);
            let a2 = rng.random_range(-10.0..10.0);
            let kappa = rng.random_range(1e-3..(30.0 / d).min(20.0));
            let c = cfg(r1, d, a1, a2);
            let m = matching_matrix(kappa, &c).unwrap();
            let f = secular_f(kappa, &c).unwrap();
            let terms = [m[0][0] * m[1][1], m[0][1] * m[1][0]];
            let det = terms[0] - terms[1];
            let scale = terms[0].abs() + terms[1].abs() + (kappa * f).abs();
            assert!((det + kappa * f).abs() <= 1e-12 * scale);

            let sf = split_form(kappa, &c).unwrap();
            let x = kappa * d;
            let (pa, pb) = (sf.f_inf * x.exp(), sf.g * (-x).exp());
            assert!((pa + pb - 2.0 * f).abs() <= 1e-12 * (pa.abs() + pb.abs()));
            assert_eq!(sf.scaled.signum(), f.signum());
        }
    }

    #[test]
    fn outer_row_collapses_when_alpha2_cancels_kappa() {
        let kappa = 0.8;
        let m = matching_matrix(kappa, &cfg(1.0, 1.5, -2.0, -kappa)).unwrap();
        let x = kappa * 1.5f64;
        assert!((m[1][0] - kappa * x.sinh()).abs() < 1e-14);
        assert!((m[1][1] - kappa * x.cosh()).abs() < 1e-14);
    }

    #[test]
    fn matching_matrix_refuses_huge_kd() {
        assert!(matches!(
            matching_matrix(10.0, &cfg(1.0, 100.0, -3.0, -3.0)),
            Err(Error::MatchingOverflow(_))
        ));
        assert!(secular_f(10.0, &cfg(1.0, 100.0, -3.0, -3.0)).unwrap().is_infinite());
    }

    #[test]
    fn free_shells_have_positive_secular_function() {
        let c = cfg(1.0, 1.0, 0.0, 0.0);
        for i in 0..200 {
            let kappa = 1e-4 * 1.06f64.powi(i);
            assert!(secular_f(kappa, &c).unwrap() > 0.0);
            assert!(scaled_secular(kappa, &c).unwrap() > 0.0);
        }
    }

    #[test]
    fn uncoupled_outer_shell_leaves_one_shell_function() {
        let c = cfg(1.0, 2.0, -3.0, 0.0);
        for &kappa in &[0.1, 1.0, 3.0] {
            let sf = split_form(kappa, &c).unwrap();
            assert_eq!(sf.g, 0.0);
            assert!((sf.scaled - sf.f_inf).abs() <= 1e-15 * sf.f_inf.abs());
        }
    }

    #[test]
    fn scaled_form_is_accurate_near_zero() {
        let c = cfg(1.0, 2.0, -0.3, 0.4);
        let kappa = 1e-7;
        let s = scaled_secular(kappa, &c).unwrap();
        let f = secular_f(kappa, &c).unwrap();
        assert!(((s - 2.0 * (-kappa * 2.0f64).exp() * f) / s).abs() < 1e-8);
    }

    #[test]
    fn one_shell_roots_examples() {
        let r = one_shell_roots(&cfg(1.0, 1.0, -1.0, -2.0)).unwrap();
        assert!(r.kappa_in.is_none());
        assert_eq!(r.kappa_out, Some(1.0));
        assert!(r.outer_binds);

        let r = one_shell_roots(&cfg(1.0, 1.0, -3.0, 0.5)).unwrap();
        let k = r.kappa_in.unwrap();
        assert!(k > 1.0 && k < 1.5);
        assert!((k + gamma1(k, 1.0, -3.0)).abs() < 1e-14);
        assert!(r.kappa_out.is_none());

        // barely past threshold: a shallow root
        let k = inner_root(1.0, -1.0 - 1e-6).unwrap();
        assert!(k > 0.0 && k < 1e-2);
        assert!((k + gamma1(k, 1.0, -1.0 - 1e-6)).abs() < 1e-15);
    }

    #[test]
    fn one_shell_function_is_increasing() {
        for &(r1, a1) in &[(1.0, -3.0), (0.3, 5.0), (4.0, -0.1)] {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..300 {
                let k = 1e-4 * 1.05f64.powi(i);
                let v = k + gamma1(k, r1, a1);
                assert!(v > prev);
                prev = v;
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let shell = TwoShell { r1: 1.3, d: 2.0, alpha1: -2.2, alpha2: -0.7 };
        for &k in &[0.05, 0.4, 1.1, 3.0] {
            let h = 1e-5 * k;
            let fd1 = (shell.f_inf(k + h) - shell.f_inf(k - h)) / (2.0 * h);
            assert!((shell.f_inf_prime(k) - fd1).abs() < 1e-6 * (1.0 + fd1.abs()), "k={k}");
            let fd2 = (shell.f_inf_prime(k + h) - shell.f_inf_prime(k - h)) / (2.0 * h);
            assert!((shell.f_inf_second(k) - fd2).abs() < 1e-6 * (1.0 + fd2.abs()), "k={k}");
            let fdg = (gamma1(k + h, 1.3, -2.2) - gamma1(k - h, 1.3, -2.2)) / (2.0 * h);
            assert!((gamma1_prime(k, 1.3) - fdg).abs() < 1e-8);
        }
    }

    #[test]
    fn double_root_residual_slope_matches_difference() {
        let c = cfg(0.9, 1.7, -2.5, -1.1);
        for &k in &[0.2, 0.9, 2.4] {
            let (v, s) = double_root_residual(k, &c).unwrap();
            assert!((v - secular_f(k, &c).unwrap()).abs() < 1e-12 * (1.0 + v.abs()));
            let h = 1e-6 * k;
            let fd = (secular_f(k + h, &c).unwrap() - secular_f(k - h, &c).unwrap()) / (2.0 * h);
            assert!((s - fd).abs() < 1e-6 * (1.0 + fd.abs()), "k={k}: {s} vs {fd}");
        }
    }

    #[test]
    fn no_zero_without_coupling() {
        let c = cfg(1.0, 1.0, 0.0, 0.0);
        for i in 1..100 {
            let (v, _) = double_root_residual(0.05 * i as f64, &c).unwrap();
            assert!(v > 0.0);
        }
    }

    #[test]
    fn tuned_point_properties() {
        let t = tune_for_splitting(1.0, -3.0).unwrap();
        let shell = TwoShell { r1: 1.0, d: 3.0, alpha1: -3.0, alpha2: t.alpha2 };
        let k0 = t.kappa0;
        assert!(shell.f_inf(k0).abs() < 1e-9);
        let h = 1e-5;
        let fd = (shell.f_inf(k0 + h) - shell.f_inf(k0 - h)) / (2.0 * h);
        assert!(fd.abs() < 1e-9);
        assert!(shell.f_inf_second(k0) > 0.0);
        let want = 4.0 * (1.0 + gamma1_prime(k0, 1.0)) / k0;
        assert!((shell.f_inf_second(k0) - want).abs() < 1e-10 * want);
        assert!(((shell.g(k0) + 4.0 * k0) / (4.0 * k0)).abs() < 1e-10);
        // S is negative between the split roots
        assert!(shell.scaled(k0) < 0.0);
    }

    #[test]
    fn tuning_errors_and_monotonicity() {
        assert!(matches!(tune_for_splitting(1.0, -1.0), Err(Error::NoInnerBoundState { .. })));
        assert!(matches!(splitting_constant(1.0, -0.5), Err(Error::NoInnerBoundState { .. })));
        let mut prev = 0.0;
        for i in 0..40 {
            let a1 = -1.05 - 0.25 * i as f64;
            let k0 = tune_for_splitting(1.0, a1).unwrap().kappa0;
            assert!(k0 > prev);
            prev = k0;
        }
    }

    #[test]
    fn splitting_constant_two_ways() {
        for &(r1, a1) in &[(1.0, -3.0), (0.5, -4.0), (2.0, -0.8), (1.0, -1.2)] {
            let c = splitting_constant(r1, a1).unwrap();
            assert!(c.relative_disagreement() < 1e-8, "{r1} {a1}: {c:?}");
            let k0 = tune_for_splitting(r1, a1).unwrap().kappa0;
            assert!(c.value() > 0.0 && c.value() < k0 * 2f64.sqrt());
        }
        // 30-digit reference
        let c = splitting_constant(1.0, -3.0).unwrap().value();
        assert!((c - 1.5094811816938819604).abs() < 1e-14);
        let k0 = tune_for_splitting(1.0, -3.0).unwrap().kappa0;
        assert!((k0 - 1.4107196860610394467).abs() < 1e-14);
    }

    #[test]
    fn flat_interface_limit() {
        for &r1 in &[10.0, 100.0] {
            let k0 = tune_for_splitting(r1, -3.0).unwrap().kappa0;
            assert!((gamma1_prime(k0, r1) - 1.0).abs() < 1e-10);
            let c = splitting_constant(r1, -3.0).unwrap().value();
            assert!((c / k0 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn large_d_prefactor_cases() {
        assert_eq!(large_d_correction(&cfg(1.0, 2.0, -3.0, 0.0), Level::Inner).unwrap(), 0.0);
        let t = tune_for_splitting(1.0, -3.0).unwrap();
        assert!(matches!(
            large_d_correction(&cfg(1.0, 4.0, -3.0, t.alpha2), Level::Inner),
            Err(Error::DegenerateRoot { .. })
        ));
        assert!(matches!(
            large_d_correction(&cfg(1.0, 4.0, -0.5, 1.0), Level::Inner),
            Err(Error::MissingRoot)
        ));
        // an attractive outer shell pulls the inner level deeper
        let p = large_d_correction(&cfg(1.0, 1.0, -3.0, -0.5), Level::Inner).unwrap();
        assert!(p > 0.0);
    }
}

//! Modified spherical Bessel functions at real positive argument and the
//! negative-energy radial Green factor built from them.
//!
//! Conventions (everything real at `k = iκ`):
//!
//! ```text
//! i₀(x) = sinh(x)/x                 i₁(x) = (x cosh x - sinh x)/x²
//! k₀(x) = e^{-x}/x                  k₁(x) = e^{-x}(1 + 1/x)/x
//! i_{ℓ-1} - i_{ℓ+1} = (2ℓ+1) i_ℓ / x
//! k_{ℓ+1} - k_{ℓ-1} = (2ℓ+1) k_ℓ / x
//! ```
//!
//! With these, `ik j_ℓ(k r_<) h⁽¹⁾_ℓ(k r_>)` at `k = iκ` equals
//! `κ i_ℓ(κ r_<) k_ℓ(κ r_>)`, and the Wronskian is `i_ℓ k_ℓ' - i_ℓ' k_ℓ = -1/x²`.
//!
//! Both families are built from ratios of consecutive orders and summed in the
//! log domain, so the Green factor stays finite where `i_ℓ` or `k_ℓ` alone would
//! underflow or overflow.

use crate::error::{Error, Result};

/// Highest supported angular momentum.
pub const ELL_MAX: usize = 64;

const LENTZ_TINY: f64 = 1e-300;
const LENTZ_MAX_ITER: usize = 200_000;

fn check_args(ell: usize, x: f64) -> Result<()> {
    if ell > ELL_MAX {
        return Err(Error::UnsupportedOrder { ell, max: ELL_MAX });
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidArgument(x));
    }
    Ok(())
}

/// `coth(x)` for `x > 0` without overflow at large `x` or cancellation at small `x`.
pub fn coth_stable(x: f64) -> f64 {
    if x < 1e-4 {
        1.0 / x + x / 3.0 - x * x * x / 45.0
    } else {
        1.0 + 2.0 / (2.0 * x).exp_m1()
    }
}

/// Taylor coefficients of `t coth t = Σ c_n t^{2n}`, `c_n = 2^{2n} B_{2n} / (2n)!`.
const T_COTH_T: [f64; 8] = [
    1.0,
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
    -1382.0 / 638512875.0,
    4.0 / 18243225.0,
];

/// `d/dt (t coth t) = coth t - t csch² t`, positive for `t > 0`.
pub fn d_t_coth_t(t: f64) -> f64 {
    if t < 0.1 {
        let t2 = t * t;
        let mut acc = 0.0;
        for n in (1..T_COTH_T.len()).rev() {
            acc = acc * t2 + 2.0 * n as f64 * T_COTH_T[n];
        }
        acc * t
    } else {
        let s = t.sinh();
        coth_stable(t) - t / (s * s)
    }
}

/// `d²/dt² (t coth t) = 2 csch² t (t coth t - 1)`.
pub fn d2_t_coth_t(t: f64) -> f64 {
    if t < 0.1 {
        let t2 = t * t;
        let mut acc = 0.0;
        for n in (1..T_COTH_T.len()).rev() {
            acc = acc * t2 + (2 * n * (2 * n - 1)) as f64 * T_COTH_T[n];
        }
        acc
    } else {
        let s = t.sinh();
        2.0 * (t * coth_stable(t) - 1.0) / (s * s)
    }
}

/// Ratios `i_k(x)/i_{k-1}(x)` for `k = 1..=top` (index `k-1` in the result).
fn i_ratios(top: usize, x: f64) -> Vec<f64> {
    let tf = top as f64;
    if top > 0 && x > tf * (tf + 1.0) {
        i_ratios_forward(top, x)
    } else {
        i_ratios_backward(top, x)
    }
}

// Deep in the oscillation-free regime the forward recurrence loses at most a
// factor ~(i₀/i_top)² ≲ e, and it avoids an O(x)-term continued fraction.
fn i_ratios_forward(top: usize, x: f64) -> Vec<f64> {
    let mut ratios = vec![0.0; top];
    if top == 0 {
        return ratios;
    }
    ratios[0] = coth_stable(x) - 1.0 / x;
    for k in 1..top {
        ratios[k] = 1.0 / ratios[k - 1] - (2 * k + 1) as f64 / x;
    }
    ratios
}

// Continued fraction for i_top/i_{top-1} (modified Lentz), then the backward
// recurrence r_k = 1/((2k+1)/x + r_{k+1}).
fn i_ratios_backward(top: usize, x: f64) -> Vec<f64> {
    let mut ratios = vec![0.0; top];
    if top == 0 {
        return ratios;
    }
    let mut f = LENTZ_TINY;
    let mut c = f;
    let mut d = 0.0;
    for j in 0..LENTZ_MAX_ITER {
        let b = (2 * (top + j) + 1) as f64 / x;
        d += b;
        if d == 0.0 {
            d = LENTZ_TINY;
        }
        c = b + 1.0 / c;
        if c == 0.0 {
            c = LENTZ_TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    ratios[top - 1] = f;
    for k in (1..top).rev() {
        ratios[k - 1] = 1.0 / ((2 * k + 1) as f64 / x + ratios[k]);
    }
    ratios
}

/// Ratios `k_k(x)/k_{k-1}(x)` for `k = 1..=top`, from the forward recurrence.
fn k_ratios(top: usize, x: f64) -> Vec<f64> {
    let mut ratios = Vec::with_capacity(top);
    let mut s = 1.0 + 1.0 / x;
    for k in 1..=top {
        ratios.push(s);
        s = 1.0 / s + (2 * k + 1) as f64 / x;
    }
    ratios
}

/// `ln(i_ℓ(x) e^{-x})`.
fn ln_i_scaled_unchecked(ell: usize, x: f64) -> f64 {
    let base = (-(-2.0 * x).exp_m1() / (2.0 * x)).ln();
    base + i_ratios(ell, x).iter().map(|r| r.ln()).sum::<f64>()
}

/// `ln(k_ℓ(x) e^{x})`.
fn ln_k_scaled_unchecked(ell: usize, x: f64) -> f64 {
    -x.ln() + k_ratios(ell, x).iter().map(|s| s.ln()).sum::<f64>()
}

/// `ln i_ℓ(x)`; finite even where `i_ℓ` itself would under- or overflow.
pub fn ln_sph_i(ell: usize, x: f64) -> Result<f64> {
    check_args(ell, x)?;
    Ok(x + ln_i_scaled_unchecked(ell, x))
}

/// `ln k_ℓ(x)`.
pub fn ln_sph_k(ell: usize, x: f64) -> Result<f64> {
    check_args(ell, x)?;
    Ok(-x + ln_k_scaled_unchecked(ell, x))
}

/// Modified spherical Bessel function of the first kind, `i₀(x) = sinh(x)/x`.
///
/// Computed by a continued fraction plus backward recurrence normalised at `i₀`
/// (the forward recurrence is only used where `x > ℓ(ℓ+1)` and it is stable).
pub fn sph_i(ell: usize, x: f64) -> Result<f64> {
    let ln = ln_sph_i(ell, x)?;
    if ln > f64::MAX.ln() {
        return Err(Error::Overflow { ell, x });
    }
    Ok(ln.exp())
}

/// `i_ℓ(x) e^{-x}`, bounded by `1/(2x)` for large `x`.
pub fn sph_i_scaled(ell: usize, x: f64) -> Result<f64> {
    check_args(ell, x)?;
    Ok(ln_i_scaled_unchecked(ell, x).exp())
}

/// Modified spherical Bessel function of the second kind in the convention
/// `k₀(x) = e^{-x}/x`, by forward recurrence. Returns exactly 0 once `e^{-x}`
/// underflows.
pub fn sph_k(ell: usize, x: f64) -> Result<f64> {
    let ln = ln_sph_k(ell, x)?;
    if ln > f64::MAX.ln() {
        return Err(Error::Overflow { ell, x });
    }
    Ok(ln.exp())
}

/// `k_ℓ(x) e^{x}`.
pub fn sph_k_scaled(ell: usize, x: f64) -> Result<f64> {
    check_args(ell, x)?;
    let ln = ln_k_scaled_unchecked(ell, x);
    if ln > f64::MAX.ln() {
        return Err(Error::Overflow { ell, x });
    }
    Ok(ln.exp())
}

/// `i_{ℓ+1}(x) / i_ℓ(x)`.
pub fn sph_i_ratio(ell: usize, x: f64) -> Result<f64> {
    check_args(ell, x)?;
    Ok(i_ratios(ell + 1, x)[ell])
}

/// `k_{ℓ+1}(x) / k_ℓ(x)`.
pub fn sph_k_ratio(ell: usize, x: f64) -> Result<f64> {
    check_args(ell, x)?;
    Ok(k_ratios(ell + 1, x)[ell])
}

/// `i_ℓ'(x) = i_{ℓ+1}(x) + ℓ i_ℓ(x)/x`.
pub fn sph_i_deriv(ell: usize, x: f64) -> Result<f64> {
    Ok(sph_i(ell, x)? * (sph_i_ratio(ell, x)? + ell as f64 / x))
}

/// `k_ℓ'(x) = ℓ k_ℓ(x)/x - k_{ℓ+1}(x)`.
pub fn sph_k_deriv(ell: usize, x: f64) -> Result<f64> {
    Ok(sph_k(ell, x)? * (ell as f64 / x - sph_k_ratio(ell, x)?))
}

/// One entry of the negative-energy single-layer matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenFactor {
    pub ell: usize,
    pub kappa: f64,
    pub r_small: f64,
    pub r_large: f64,
    pub value: f64,
}

/// `κ i_ℓ(κ r_<) k_ℓ(κ r_>)`, i.e. `ik j_ℓ(k r_<) h⁽¹⁾_ℓ(k r_>)` at `k = iκ`.
///
/// Symmetric in `(a, b)` and strictly positive. As `κ → 0` it tends to
/// `r_<^ℓ / ((2ℓ+1) r_>^{ℓ+1})`.
pub fn green_factor(ell: usize, kappa: f64, a: f64, b: f64) -> Result<GreenFactor> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidArgument(kappa));
    }
    let (r_small, r_large) = if a <= b { (a, b) } else { (b, a) };
    let xs = kappa * r_small;
    let xl = kappa * r_large;
    check_args(ell, xs)?;
    check_args(ell, xl)?;
    let ln = kappa.ln() + ln_i_scaled_unchecked(ell, xs) + ln_k_scaled_unchecked(ell, xl)
        - kappa * (r_large - r_small);
    Ok(GreenFactor {
        ell,
        kappa,
        r_small,
        r_large,
        value: ln.exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // 50-digit reference values (arbitrary precision via I_{ℓ+½}, K_{ℓ+½}).
    const I_REF: &[(usize, f64, f64)] = &[
        (0, 1.0, 1.1752011936438014569),
        (1, 1.0, 0.3678794411714423216),
        (2, 1.0, 0.071562870129474492096),
        (5, 0.1, 9.623710240437368598e-10),
        (10, 3.0, 5.2149461227634169849e-6),
        (3, 700.0, 7.1826402906347257394e+300),
        (20, 25.0, 421966.07426167901835),
        (32, 1e-3, 1.3702548804845032925e-142),
        (64, 50.0, 1986.7792462837645288),
        (1, 1e-8, 3.3333333333333333667e-9),
        (7, 123.456, 1.3330530167559119252e+51),
        (40, 10.0, 2.814715829524123258e-21),
    ];

    const K_REF: &[(usize, f64, f64)] = &[
        (0, 1.0, 0.3678794411714423216),
        (1, 2.0, 0.10150146242745951892),
        (2, 1.0, 2.5751560882000962512),
        (5, 0.1, 944475187.43752601657),
        (10, 3.0, 2925.802385440061144),
        (3, 700.0, 1.4206414735723085232e-307),
        (20, 25.0, 1.4659223958320947037e-9),
        (32, 1e-3, 1.1227557439449539888e+143),
        (64, 50.0, 6.1673504117720831269e-8),
        (1, 1e-8, 9999999999999999.5),
        (7, 123.456, 2.4564148800699553898e-56),
        (40, 10.0, 425816975367008230.57),
    ];

    #[test]
    fn sph_i_matches_reference() {
        for &(ell, x, want) in I_REF {
            let got = sph_i(ell, x).unwrap();
            assert!(rel(got, want) < 1e-12, "i_{ell}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn sph_k_matches_reference() {
        for &(ell, x, want) in K_REF {
            let got = sph_k(ell, x).unwrap();
            assert!(rel(got, want) < 1e-12, "k_{ell}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn closed_forms() {
        let x: f64 = 1.0;
        assert!(rel(sph_i(0, x).unwrap(), x.sinh() / x) < 1e-15);
        let i1 = (x * x.cosh() - x.sinh()) / (x * x);
        assert!(rel(sph_i(1, x).unwrap(), i1) < 1e-14);
        let k2 = (-x).exp() * (1.0 + 3.0 / x + 3.0 / (x * x)) / x;
        assert!(rel(sph_k(2, x).unwrap(), k2) < 1e-14);
        let k0 = sph_k(0, x).unwrap();
        let k1 = sph_k(1, x).unwrap();
        assert!(rel(sph_k(2, x).unwrap(), k0 + 3.0 * k1) < 1e-14);
    }

    #[test]
    fn small_argument_leading_term() {
        let x: f64 = 1e-6;
        let mut dfact = 1.0;
        for ell in 0..=10usize {
            dfact *= (2 * ell + 1) as f64;
            let lead = x.powi(ell as i32) / dfact;
            let ratio = sph_i(ell, x).unwrap() / lead;
            assert!((ratio - 1.0).abs() < 1e-10, "ell={ell} ratio={ratio}");
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(sph_i(65, 1.0), Err(Error::UnsupportedOrder { .. })));
        assert!(matches!(sph_i(0, 800.0), Err(Error::Overflow { .. })));
        assert!(matches!(sph_i(0, 0.0), Err(Error::InvalidArgument(_))));
        assert_eq!(sph_k(0, 800.0).unwrap(), 0.0);
        assert!(sph_i_scaled(0, 800.0).unwrap() > 0.0);
    }

    #[test]
    fn recurrence_consistency() {
        for ell in 1..=30usize {
            for &x in &[0.1, 1.0, 10.0] {
                let lhs = sph_i(ell - 1, x).unwrap() - sph_i(ell + 1, x).unwrap();
                let rhs = (2 * ell + 1) as f64 * sph_i(ell, x).unwrap() / x;
                assert!(rel(lhs, rhs) < 1e-10, "ell={ell} x={x}");
            }
        }
    }

    #[test]
    fn wronskian() {
        for ell in 0..=30usize {
            for &x in &[0.05, 0.1, 1.0, 3.7, 10.0, 40.0] {
                let w = sph_i(ell, x).unwrap() * sph_k_deriv(ell, x).unwrap()
                    - sph_i_deriv(ell, x).unwrap() * sph_k(ell, x).unwrap();
                assert!(rel(w, -1.0 / (x * x)) < 1e-10, "ell={ell} x={x} w={w}");
            }
        }
    }

    #[test]
    fn forward_and_backward_i_ratios_agree() {
        for top in 1..=12usize {
            for factor in [1.0, 2.0, 10.0] {
                let x = factor * (top * (top + 1)) as f64 + 0.5;
                let fwd = i_ratios_forward(top, x);
                let bwd = i_ratios_backward(top, x);
                for (a, b) in fwd.iter().zip(&bwd) {
                    assert!(rel(*a, *b) < 1e-13, "top={top} x={x}");
                }
            }
        }
    }

    #[test]
    fn coth_values() {
        assert!(rel(coth_stable(1.0), 1.3130352854993313036) < 1e-15);
        assert_eq!(coth_stable(700.0), 1.0);
        let x = 1e-9;
        assert!((x * coth_stable(x) - 1.0).abs() < 1e-15);
        // continuity at the series crossover
        assert!(rel(coth_stable(1e-4 * (1.0 - 1e-13)), coth_stable(1e-4)) < 1e-12);
    }

    #[test]
    fn t_coth_t_derivatives() {
        for &t in &[1e-6f64, 1e-3, 0.05, 0.0999, 0.1001, 0.5, 2.0, 30.0, 400.0] {
            let h = 1e-5 * t.max(1e-2);
            let f = |s: f64| s * coth_stable(s);
            let fd = (f(t + h) - f(t - h)) / (2.0 * h);
            assert!((d_t_coth_t(t) - fd).abs() < 1e-8, "t={t}");
            let fd2 = (d_t_coth_t(t + h) - d_t_coth_t(t - h)) / (2.0 * h);
            assert!((d2_t_coth_t(t) - fd2).abs() < 1e-7, "t={t}");
            assert!(d_t_coth_t(t) > 0.0);
        }
        // closed form (sinh 2t - 2t)/(2 sinh² t)
        let t: f64 = 0.7;
        let closed = ((2.0 * t).sinh() - 2.0 * t) / (2.0 * t.sinh().powi(2));
        assert!(rel(d_t_coth_t(t), closed) < 1e-14);
    }

    #[test]
    fn green_factor_values() {
        let g = green_factor(0, 1.0, 1.0, 1.0).unwrap().value;
        assert!(rel(g, 0.43233235838169365405) < 1e-14);
        let g = green_factor(0, 1.0, 1.0, 2.0).unwrap().value;
        assert!(rel(g, 0.079523093200894594654) < 1e-14);
        let cases = [
            (3, 0.7, 1.5, 4.0, 0.0010223913954569936104),
            (1, 2.0, 0.3, 0.9, 0.059224034117714049107),
            (10, 0.05, 2.0, 3.0, 0.00027515925943670611848),
            (0, 30.0, 1.0, 1.2, 0.000034427113564810533653),
        ];
        for (ell, kappa, a, b, want) in cases {
            let g = green_factor(ell, kappa, a, b).unwrap().value;
            assert!(rel(g, want) < 1e-12, "ell={ell}: {g} vs {want}");
        }
    }

    #[test]
    fn green_factor_symmetry_and_zero_energy_limit() {
        for ell in 0..=8usize {
            let g1 = green_factor(ell, 0.3, 1.2, 2.7).unwrap();
            let g2 = green_factor(ell, 0.3, 2.7, 1.2).unwrap();
            assert_eq!(g1.value, g2.value);
            let (a, b) = (0.8f64, 1.9f64);
            let limit = a.powi(ell as i32) / ((2 * ell + 1) as f64 * b.powi(ell as i32 + 1));
            let g = green_factor(ell, 1e-7, a, b).unwrap().value;
            assert!(rel(g, limit) < 1e-6, "ell={ell}");
        }
    }

    #[test]
    fn green_factor_is_positive_across_range() {
        let kappas = [1e-4, 1e-3, 0.01, 0.1, 1.0, 5.0, 20.0, 50.0];
        let radii = [0.1, 0.5, 1.0, 3.3, 10.0];
        for ell in (0..=32).step_by(4) {
            for &kappa in &kappas {
                for &a in &radii {
                    for &b in &radii {
                        let v = green_factor(ell, kappa, a, b).unwrap().value;
                        assert!(v > 0.0 && v.is_finite(), "ell={ell} kappa={kappa} a={a} b={b}");
                    }
                }
            }
        }
    }
}

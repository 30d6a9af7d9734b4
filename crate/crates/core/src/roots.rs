//! Bracketing root refinement and a bounded scalar minimiser.

/// A refined root together with the function value there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Stopping rule for [`brent`]: the bracket half-width must drop below
/// `abs + rel·|x|` (never below a few ulps of `x`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn at(&self, x: f64) -> f64 {
        self.abs + self.rel * x.abs() + 2.0 * f64::EPSILON * x.abs()
    }
}

/// Brent's method (inverse quadratic interpolation, secant, bisection) on a
/// sign-changing bracket `[a, b]` with known end values.
///
/// Returns `None` if the end values do not bracket a root.
pub fn brent<F, E>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, tol: Tolerance) -> Result<Option<Refined>, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    if fa == 0.0 {
        return Ok(Some(Refined { x: a, fx: fa, iterations: 0 }));
    }
    if fb == 0.0 {
        return Ok(Some(Refined { x: b, fx: fb, iterations: 0 }));
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Ok(None);
    }

    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for iter in 0..400 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 0.5 * tol.at(b);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(Some(Refined { x: b, fx: fb, iterations: iter }));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Ok(Some(Refined { x: b, fx: fb, iterations: 400 }))
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_min<F, E>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * (x1.abs() + x2.abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Least-squares line `y = slope·x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

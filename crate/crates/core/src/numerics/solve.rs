use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

use super::ToleranceConfig;

/// Outcome of a bracketed one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexSolveResult {
    pub argmin: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub root: f64,
    /// g(root)
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_848_2;

fn width_floor(x: f64) -> f64 {
    4.0 * f64::EPSILON * x.abs()
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_nan() {
        return domain(format!("objective is NaN at {x}"));
    }
    Ok(v)
}

/// Golden-section search for the minimizer of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol.abs_tol`. `f` is only ever
/// evaluated at interior points and at the two endpoints. Running out of
/// iterations is reported through `converged`, with the best point found.
pub fn minimize_convex_1d<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: &ToleranceConfig,
) -> Result<ConvexSolveResult> {
    tol.validate()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return domain(format!("minimize_convex_1d needs finite lo < hi, got [{lo}, {hi}]"));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = checked(&f, x1)?;
    let mut f2 = checked(&f, x2)?;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < tol.max_iter {
        if b - a <= tol.abs_tol.max(width_floor(a).max(width_floor(b))) {
            converged = true;
            break;
        }
        iterations += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = checked(&f, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = checked(&f, x2)?;
        }
    }
    if !converged && b - a <= tol.abs_tol.max(width_floor(a).max(width_floor(b))) {
        converged = true;
    }
    let (mut argmin, mut value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    // a minimum sitting on the boundary is never strictly inside the bracket
    for edge in [lo, hi] {
        if (edge - argmin).abs() <= 2.0 * (b - a).max(tol.abs_tol) {
            let fe = checked(&f, edge)?;
            if fe < value {
                argmin = edge;
                value = fe;
            }
        }
    }
    Ok(ConvexSolveResult {
        argmin,
        value,
        iterations,
        converged,
    })
}

/// Brent's bracketing root finder (bisection with secant and inverse
/// quadratic steps) for a continuous, sign-changing `g` on `[lo, hi]`.
///
/// Returns once the bracket is narrower than `tol.abs_tol` or `g` hits zero
/// exactly. Equal endpoint signs are an error; exhausting `tol.max_iter` is
/// flagged through `converged`.
pub fn solve_root_monotone<G: Fn(f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    tol: &ToleranceConfig,
) -> Result<RootResult> {
    tol.validate()?;
    if !(lo < hi) {
        return domain(format!("solve_root_monotone needs lo < hi, got [{lo}, {hi}]"));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = checked(&g, a)?;
    let mut fb = checked(&g, b)?;
    if fa == 0.0 {
        return Ok(RootResult { root: a, residual: 0.0, iterations: 0, converged: true });
    }
    if fb == 0.0 {
        return Ok(RootResult { root: b, residual: 0.0, iterations: 0, converged: true });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketSign { lo, hi, g_lo: fa, g_hi: fb });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iteration in 1..=tol.max_iter {
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
        let half_tol = 0.5 * tol.abs_tol.max(width_floor(b));
        let m = 0.5 * (c - b);
        if m.abs() <= half_tol || fb == 0.0 {
            return Ok(RootResult { root: b, residual: fb, iterations: iteration, converged: true });
        }
        if e.abs() >= half_tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0)),
                    (qa - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (half_tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > half_tol { d } else { half_tol.copysign(m) };
        fb = checked(&g, b)?;
    }
    Ok(RootResult { root: b, residual: fb, iterations: tol.max_iter, converged: false })
}

//! The explicit lower bound `R_L(D)` driven by a subregularity certificate.
//!
//! With `a = m/k + 1`, `A = μ(X) Γ(a)` and `B = μ(X) − δ₀^m c`:
//!
//! ```text
//! p(s)    = log((A − B γ(a, s)) / s^{m/k})
//! q(s, D) = s δ₀^{−k} D + p(s)
//! R_L(D)  = h − min_s q(s, D)                       if c < μ(X) δ₀^{−m}
//!         = h + log((m/(kD))^{m/k} / (c Γ(a))) − m/k  otherwise
//! ```
//!
//! `A − B γ(a, s)` is evaluated as `μ(X) Γ(a, s) + δ₀^m c γ(a, s)`, a sum of
//! nonnegative terms, which avoids cancellation when `B ≈ A / γ`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::measures::SubregularityCertificate;
use crate::numerics::{
    adaptive_quadrature, gamma_fn, ln_gamma, lower_incomplete_gamma, minimize_convex_1d, solve_root_monotone,
    upper_incomplete_gamma, ConvexSolveResult, ToleranceConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremOneInput {
    pub h_mu: f64,
    pub cert: SubregularityCertificate,
    pub k: f64,
}

/// Which closed form of `R_L` applies to an input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `c ≥ μ(X) δ₀^{−m}`: no optimization needed.
    Explicit,
    /// `c < μ(X) δ₀^{−m}`: minimize `q(·, D)`.
    Convex,
}

impl TheoremOneInput {
    pub fn new(h_mu: f64, cert: SubregularityCertificate, k: f64) -> Result<Self> {
        let input = Self { h_mu, cert, k };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        self.cert.validate()?;
        if !(self.k > 0.0) || !self.k.is_finite() {
            return domain(format!("distortion exponent k must be positive, got {}", self.k));
        }
        if !self.h_mu.is_finite() {
            return Err(Error::InvalidInput(format!("entropy must be finite, got {}", self.h_mu)));
        }
        if !self.cert.is_bound_ready() {
            return Err(Error::InvalidCertificate(
                "the explicit bound needs delta0 = inf or a finite total mass".into(),
            ));
        }
        Ok(())
    }

    /// `m / k`
    pub fn ratio(&self) -> f64 {
        self.cert.m / self.k
    }

    /// `μ(X) δ₀^{−m}` is read as 0 when `δ₀ = ∞`, including for infinite mass.
    pub fn branch(&self) -> Branch {
        if self.cert.c >= self.cert.mass_over_radius() {
            Branch::Explicit
        } else {
            Branch::Convex
        }
    }

    fn finite_parts(&self) -> Result<(f64, f64)> {
        if !self.cert.delta0.is_finite() || !self.cert.total_mass.is_finite() {
            return domain("p(s) needs a finite delta0 and a finite total mass");
        }
        Ok((self.cert.total_mass, self.cert.delta0.powf(self.cert.m) * self.cert.c))
    }

    /// `A − B γ(a, s)` together with `B`.
    fn log_argument(&self, s: f64) -> Result<(f64, f64)> {
        if !(s > 0.0) {
            return domain(format!("p(s) needs s > 0, got {s}"));
        }
        let (mass, scaled_c) = self.finite_parts()?;
        let a = self.ratio() + 1.0;
        let b = mass - scaled_c;
        let arg = if b == 0.0 {
            mass * gamma_fn(a)?
        } else {
            mass * upper_incomplete_gamma(a, s)? + scaled_c * lower_incomplete_gamma(a, s)?
        };
        if !(arg > 0.0) || !arg.is_finite() {
            return Err(Error::InvalidCertificate(format!(
                "argument of the logarithm in p(s) is {arg} at s = {s}"
            )));
        }
        Ok((arg, b))
    }
}

/// `p(s) = log((μ(X) Γ(a) − (μ(X) − δ₀^m c) γ(a, s)) / s^{m/k})`
pub fn p_of_s(input: &TheoremOneInput, s: f64) -> Result<f64> {
    let (arg, _) = input.log_argument(s)?;
    Ok(arg.ln() - input.ratio() * s.ln())
}

/// `p′(s) = −B s^{a−1} e^{−s} / (A − B γ(a, s)) − (m/k)/s`
pub fn p_prime(input: &TheoremOneInput, s: f64) -> Result<f64> {
    let (arg, b) = input.log_argument(s)?;
    let ratio = input.ratio();
    if b == 0.0 {
        return Ok(-ratio / s);
    }
    let density = (ratio * s.ln() - s).exp();
    Ok(-b * density / arg - ratio / s)
}

/// `q(s, D) = s δ₀^{−k} D + p(s)`
pub fn q_of_s(input: &TheoremOneInput, s: f64, distortion: f64) -> Result<f64> {
    Ok(s * input.cert.delta0.powf(-input.k) * distortion + p_of_s(input, s)?)
}

const S_MIN: f64 = 1e-300;
const S_MAX: f64 = 1e300;

fn check_convex_branch(input: &TheoremOneInput, distortion: f64) -> Result<()> {
    input.validate()?;
    if !(distortion > 0.0) || !distortion.is_finite() {
        return domain(format!("D must be positive and finite, got {distortion}"));
    }
    if input.branch() != Branch::Convex {
        return domain("the certificate satisfies c >= mu(X) delta0^-m; no optimization is needed");
    }
    Ok(())
}

/// Bracket `[lo, hi]` around the root of `g(s) = δ₀^k p′(s) + D`.
fn bracket_s0(input: &TheoremOneInput, distortion: f64) -> Result<(f64, f64)> {
    let scale = input.cert.delta0.powf(input.k);
    let g = |s: f64| -> Result<f64> { Ok(scale * p_prime(input, s)? + distortion) };
    let (mut lo, mut hi) = (1.0, 1.0);
    while g(lo)? > 0.0 {
        lo *= 0.5;
        if lo < S_MIN {
            return Err(Error::OutOfRange {
                d: distortion,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
    }
    while g(hi)? < 0.0 {
        hi *= 2.0;
        if hi > S_MAX {
            return Err(Error::OutOfRange {
                d: distortion,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
    }
    if lo == hi {
        // g(1) == 0 exactly
        return Ok((0.5, 2.0));
    }
    Ok((lo, hi))
}

/// `s₀` with `δ₀^k p′(s₀) = −D`, found by a bracketing root solve.
///
/// `−δ₀^k p′` decreases from `+∞` at `0⁺` to `0` at `∞`, so every `D > 0`
/// has a root. The returned `value` is `q(s₀, D)`.
pub fn solve_s0(input: &TheoremOneInput, distortion: f64, tol: &ToleranceConfig) -> Result<ConvexSolveResult> {
    check_convex_branch(input, distortion)?;
    let (lo, hi) = bracket_s0(input, distortion)?;
    let scale = input.cert.delta0.powf(input.k);
    let root = solve_root_monotone(
        |s| match p_prime(input, s) {
            Ok(v) => scale * v + distortion,
            Err(_) => f64::NAN,
        },
        lo,
        hi,
        &tol.with_abs_tol(tol.abs_tol.min(1e-12 * hi.max(1.0)).max(4.0 * f64::EPSILON * lo)),
    )?;
    Ok(ConvexSolveResult {
        argmin: root.root,
        value: q_of_s(input, root.root, distortion)?,
        iterations: root.iterations,
        converged: root.converged,
    })
}

/// `q(s, D) − q(r, D)` without the cancellation of subtracting two values
/// of `q`: the change in `γ(a, ·)` is integrated directly over `[r, s]`.
fn q_increment(input: &TheoremOneInput, r: f64, arg_r: f64, s: f64, distortion: f64) -> Result<f64> {
    let ratio = input.ratio();
    let step = s - r;
    let linear = step * input.cert.delta0.powf(-input.k) * distortion;
    let (_, b) = input.log_argument(s)?;
    let log_arg = if b == 0.0 || step == 0.0 {
        0.0
    } else {
        let tol = ToleranceConfig::new(f64::MIN_POSITIVE, 1e-15, 64)?;
        let area = adaptive_quadrature(|u| (ratio * u.ln() - u).exp(), r.min(s), r.max(s), &tol)?.value;
        (-b * area.copysign(step) / arg_r).ln_1p()
    };
    Ok(linear + log_arg - ratio * (step / r).ln_1p())
}

/// The same minimizer found by golden-section search on `q(·, D)` directly.
///
/// Near `s₀` the values of `q` agree to within rounding over a relative
/// width of about `1e-7`, so a second pass minimizes the increment
/// `q(s) − q(r)` from the first estimate `r` over a narrow window.
pub fn minimize_q(input: &TheoremOneInput, distortion: f64, tol: &ToleranceConfig) -> Result<ConvexSolveResult> {
    check_convex_branch(input, distortion)?;
    let (lo, hi) = bracket_s0(input, distortion)?;
    let coarse = minimize_convex_1d(
        |s| q_of_s(input, s, distortion).unwrap_or(f64::NAN),
        lo,
        hi,
        tol,
    )?;
    let r = coarse.argmin;
    let (arg_r, _) = input.log_argument(r)?;
    let window = 1e-4 * r;
    let fine = minimize_convex_1d(
        |s| q_increment(input, r, arg_r, s, distortion).unwrap_or(f64::NAN),
        (r - window).max(lo),
        (r + window).min(hi),
        tol,
    )?;
    Ok(ConvexSolveResult {
        argmin: fine.argmin,
        value: coarse.value + fine.value,
        iterations: coarse.iterations + fine.iterations,
        converged: coarse.converged && fine.converged,
    })
}

/// `R_L(D)`, unclamped. It may be negative for large `D`.
pub fn r_lower(input: &TheoremOneInput, distortion: f64, tol: &ToleranceConfig) -> Result<f64> {
    input.validate()?;
    if !(distortion > 0.0) || !distortion.is_finite() {
        return domain(format!("D must be positive and finite, got {distortion}"));
    }
    match input.branch() {
        Branch::Explicit => {
            let r = input.ratio();
            Ok(input.h_mu + r * (r / distortion).ln() - input.cert.c.ln() - ln_gamma(r + 1.0)? - r)
        }
        Branch::Convex => {
            let s0 = solve_s0(input, distortion, tol)?;
            if !s0.converged {
                return Err(Error::NotConverged {
                    iterations: s0.iterations,
                    best: s0.argmin,
                    error: f64::NAN,
                });
            }
            Ok(input.h_mu - s0.value)
        }
    }
}

/// `max(0, R_L(D))`, the reportable rate.
pub fn r_lower_clamped(input: &TheoremOneInput, distortion: f64, tol: &ToleranceConfig) -> Result<f64> {
    r_lower(input, distortion, tol).map(|r| r.max(0.0))
}

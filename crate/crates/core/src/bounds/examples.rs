//! The two worked examples: the uniform distribution on the unit circle and
//! the uniform distribution on the middle-third Cantor set, both with
//! squared-error distortion.

use std::cell::RefCell;

use crate::error::{domain, Error, Result};
use crate::measures::{circle_subregularity, DistortionSpec, UniformCircle};
use crate::numerics::{ln_gamma, log_space, minimize_convex_1d, ToleranceConfig};

use super::explicit::{r_lower, TheoremOneInput};
use super::slb::{nu_numeric_refined, r_slb_numeric};

/// Default `δ̂` grid for [`circle_bound`]: 64 log-spaced points on `[1e-3, 1]`.
pub fn circle_delta_grid() -> Vec<f64> {
    log_space(1e-3, 1.0, 64)
}

/// `R_L^{(δ̂)}(D)` for the circle certificate with parameter `δ̂`.
pub fn circle_bound_at(delta_hat: f64, distortion: f64, tol: &ToleranceConfig) -> Result<f64> {
    let input = TheoremOneInput::new(0.0, circle_subregularity(delta_hat)?, 2.0)?;
    r_lower(&input, distortion, tol)
}

/// `max_{δ̂} R_L^{(δ̂)}(D)` over `grid`, refined by golden-section search in
/// `log δ̂` between the neighbours of the best grid point. Returns the
/// bound and its maximizer.
pub fn circle_bound(distortion: f64, grid: &[f64], tol: &ToleranceConfig) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("delta_hat grid is empty".into()));
    }
    if grid.iter().any(|d| !(*d > 0.0 && *d <= 1.0)) {
        return domain("delta_hat grid must lie in (0, 1]");
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let values = grid
        .iter()
        .map(|&dh| circle_bound_at(dh, distortion, tol))
        .collect::<Result<Vec<_>>>()?;
    let (i, &best) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let mut result = (best, grid[i]);
    if grid.len() > 1 {
        let lo = grid[i.saturating_sub(1)].ln();
        let hi = grid[(i + 1).min(grid.len() - 1)].ln();
        let failure = RefCell::new(None);
        let neg = |t: f64| match circle_bound_at(t.exp().min(1.0), distortion, tol) {
            Ok(v) => -v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let refined = minimize_convex_1d(neg, lo, hi, &tol.with_abs_tol(1e-8));
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let refined = refined?;
        if -refined.value > result.0 {
            result = (-refined.value, refined.argmin.exp().min(1.0));
        }
    }
    Ok(result)
}

/// Numerically evaluated Shannon lower bound for the uniform circle.
///
/// The supremum over reproduction points is searched along the positive
/// first axis (the integral only depends on `|y|`) on a 0.05 grid over
/// `[0, 1.25]`, then refined.
pub fn circle_slb(distortion: f64, tol: &ToleranceConfig) -> Result<f64> {
    let dist = DistortionSpec::euclidean(2.0)?;
    let candidates: Vec<Vec<f64>> = (0..=25).map(|i| vec![0.05 * i as f64, 0.0]).collect();
    let nu = |s: f64| nu_numeric_refined(&UniformCircle, &dist, s, &candidates, 0.05, tol).map(|(v, _)| v);
    r_slb_numeric(0.0, &nu, distortion, tol)
}

/// `σ = log 2 / log 9`
pub fn cantor_sigma() -> f64 {
    2f64.ln() / 9f64.ln()
}

/// Closed form `σ log(σ/D) − σ − log(3 Γ(σ + 1))` for the Cantor source.
pub fn cantor_bound(distortion: f64) -> Result<f64> {
    if !(distortion > 0.0) {
        return domain(format!("D must be positive, got {distortion}"));
    }
    let sigma = cantor_sigma();
    Ok(sigma * (sigma / distortion).ln() - sigma - 3f64.ln() - ln_gamma(sigma + 1.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_closed_form_values() {
        // mpmath, 50 digits
        let cases = [
            (1e-4, 1.238_163_819_020_396),
            (1e-3, 0.511_779_096_370_373_7),
            (1e-2, -0.214_605_626_279_648_62),
            (1e-1, -0.940_990_348_929_670_95),
        ];
        for (d, want) in cases {
            assert!((cantor_bound(d).unwrap() - want).abs() < 1e-13, "D={d}");
        }
        let sigma = cantor_sigma();
        assert!((sigma - 0.315_464_876_785_728_7).abs() < 1e-15);
        assert!((cantor_bound(sigma).unwrap() - -1.303_420_741_987_235_1).abs() < 1e-13);
        let slope = cantor_bound(1e-4).unwrap() - cantor_bound(1e-3).unwrap();
        assert!((slope - sigma * 10f64.ln()).abs() < 1e-13);
        assert!(cantor_bound(0.0).is_err());
    }

    #[test]
    fn circle_slb_against_bessel_oracle() {
        // sup_r e^{−s(1+r²)} I₀(2rs), minimized over s in 40-digit arithmetic
        let tol = ToleranceConfig::default();
        for (d, want) in [(0.1, 1.543_861_555_621_443_5), (0.01, 2.719_011_020_760_294_5)] {
            let got = circle_slb(d, &tol).unwrap();
            assert!((got - want).abs() < 1e-6, "D={d}: {got} vs {want}");
        }
    }

    #[test]
    fn circle_bound_below_slb() {
        let tol = ToleranceConfig::default();
        let grid = circle_delta_grid();
        for d in [0.3, 0.03, 0.003] {
            let (rl, dh) = circle_bound(d, &grid, &tol).unwrap();
            assert!(dh > 0.0 && dh <= 1.0);
            let slb = circle_slb(d, &tol).unwrap();
            assert!(rl <= slb + 1e-4, "D={d}: {rl} > {slb}");
        }
    }

    #[test]
    fn circle_bound_grid_stable() {
        let tol = ToleranceConfig::default();
        let coarse = circle_bound(1e-3, &circle_delta_grid(), &tol).unwrap().0;
        let fine = circle_bound(1e-3, &log_space(1e-3, 1.0, 128), &tol).unwrap().0;
        assert!((coarse - fine).abs() < 1e-4);
    }

    #[test]
    fn circle_bound_rejects_bad_grid() {
        let tol = ToleranceConfig::default();
        assert!(circle_bound(0.1, &[], &tol).is_err());
        assert!(circle_bound(0.1, &[0.5, 1.5], &tol).is_err());
    }
}

use std::cell::RefCell;

use crate::error::{domain, Error, Result};
use crate::measures::{DistortionSpec, MeasureModel};
use crate::numerics::{gamma_fn, minimize_convex_1d, ToleranceConfig};

/// Classical Shannon lower bound for a source on `ℝ^d` with distortion
/// `‖x − y‖^k` (a seminorm whose unit ball has volume `v_d`):
/// `h + log((d/(kD))^{d/k} / (V_d Γ(d/k + 1))) − d/k`.
pub fn classical_slb(h: f64, d: usize, k: f64, v_d: f64, distortion: f64) -> Result<f64> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    if !(k > 0.0) || !(v_d > 0.0) || !(distortion > 0.0) {
        return domain(format!("need k, V_d, D > 0 (got k={k}, V_d={v_d}, D={distortion})"));
    }
    let ratio = d as f64 / k;
    Ok(h + ratio * (ratio / distortion).ln() - v_d.ln() - gamma_fn(ratio + 1.0)?.ln() - ratio)
}

/// `∫ e^{−s ρ(x, y)} dμ(x)` for one reproduction point `y`.
pub fn nu_integral(model: &dyn MeasureModel, dist: &DistortionSpec, s: f64, y: &[f64], tol: &ToleranceConfig) -> Result<f64> {
    if !(s > 0.0) {
        return domain(format!("nu needs s > 0, got {s}"));
    }
    let r = model.integrate(&|x| (-s * dist.distortion(x, y)).exp(), Some(y), tol)?;
    if !r.converged {
        return Err(Error::NotConverged {
            iterations: r.subdivisions,
            best: r.value,
            error: r.error,
        });
    }
    Ok(r.value)
}

/// `ν(s) = sup_y ∫ e^{−s ρ(x, y)} dμ(x)` with the supremum replaced by a
/// maximum over `candidates`.
pub fn nu_numeric(
    model: &dyn MeasureModel,
    dist: &DistortionSpec,
    s: f64,
    candidates: &[Vec<f64>],
    tol: &ToleranceConfig,
) -> Result<f64> {
    nu_numeric_refined(model, dist, s, candidates, 0.0, tol).map(|(v, _)| v)
}

/// [`nu_numeric`] followed, when `step > 0`, by a golden-section pass over
/// each coordinate of the best candidate within `± step`. Returns the value
/// and the maximizing point.
pub fn nu_numeric_refined(
    model: &dyn MeasureModel,
    dist: &DistortionSpec,
    s: f64,
    candidates: &[Vec<f64>],
    step: f64,
    tol: &ToleranceConfig,
) -> Result<(f64, Vec<f64>)> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("nu needs at least one candidate point".into()));
    }
    let mut best = (f64::NEG_INFINITY, candidates[0].clone());
    for y in candidates {
        let v = nu_integral(model, dist, s, y, tol)?;
        if v > best.0 {
            best = (v, y.clone());
        }
    }
    if step > 0.0 {
        let search = tol.with_abs_tol(tol.abs_tol.max(1e-7 * step));
        for j in 0..best.1.len() {
            let failure = RefCell::new(None);
            let base = best.1.clone();
            let neg = |t: f64| {
                let mut y = base.clone();
                y[j] = t;
                match nu_integral(model, dist, s, &y, tol) {
                    Ok(v) => -v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                }
            };
            let r = minimize_convex_1d(neg, base[j] - step, base[j] + step, &search);
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            let r = r?;
            if -r.value > best.0 {
                best.0 = -r.value;
                best.1[j] = r.argmin;
            }
        }
    }
    Ok(best)
}

/// Lower end of the search bracket over `s`.
pub const S_BRACKET_LO: f64 = 1e-12;
const S_BRACKET_CAP: f64 = 1e12;

/// `h − inf_{s ≥ 0} (s D + log ν(s))`.
///
/// The bracket starts at `[1e-12, 1]` and its upper end doubles until the
/// objective increases, after which golden-section search finds the
/// minimizer. `ν` is only evaluated at positive `s`.
pub fn r_slb_numeric(h: f64, nu_eval: &dyn Fn(f64) -> Result<f64>, distortion: f64, tol: &ToleranceConfig) -> Result<f64> {
    if !(distortion > 0.0) {
        return domain(format!("D must be positive, got {distortion}"));
    }
    let failure = RefCell::new(None);
    let objective = |s: f64| match nu_eval(s) {
        Ok(v) if v > 0.0 => s * distortion + v.ln(),
        Ok(v) => {
            failure.borrow_mut().get_or_insert(Error::Domain(format!("nu({s}) = {v} is not positive")));
            f64::NAN
        }
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let check = |v: f64| match failure.borrow_mut().take() {
        Some(e) => Err(e),
        None => Ok(v),
    };

    let mut lo = S_BRACKET_LO;
    let mut hi = 1.0;
    let mut f_hi = check(objective(hi))?;
    loop {
        let next = 2.0 * hi;
        if next > S_BRACKET_CAP {
            return Err(Error::BracketExpansion(format!(
                "objective still decreasing at s = {hi:e}"
            )));
        }
        let f_next = check(objective(next))?;
        if f_next >= f_hi {
            hi = next;
            break;
        }
        lo = 0.5 * hi;
        hi = next;
        f_hi = f_next;
    }
    let search = tol.with_abs_tol(tol.abs_tol.max(1e-12 * hi));
    let r = minimize_convex_1d(&objective, lo, hi, &search);
    let r = check(0.0).and(r)?;
    Ok(h - r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{euclidean_unit_ball_volume, LebesgueSpace, UniformCircle};
    use std::f64::consts::PI;

    #[test]
    fn classical_examples() {
        let h = 0.5 * (2.0 * PI * std::f64::consts::E).ln();
        let r = classical_slb(h, 1, 2.0, 2.0, 0.1).unwrap();
        assert!((r - 0.5 * 10f64.ln()).abs() < 1e-14);
        assert!(classical_slb(h, 1, 2.0, 2.0, 1.0).unwrap().abs() < 1e-14);
        let r = classical_slb(0.0, 1, 1.0, 2.0, 1.0).unwrap();
        assert!((r - (-(2f64.ln()) - 1.0)).abs() < 1e-14);
        assert!(classical_slb(0.0, 1, 2.0, 2.0, 0.0).is_err());
        assert!(classical_slb(0.0, 1, -2.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn gaussian_integral() {
        let line = LebesgueSpace::gaussian(1).unwrap();
        let dist = DistortionSpec::euclidean(2.0).unwrap();
        let v = nu_numeric(&line, &dist, 1.0, &[vec![0.0], vec![3.0]], &ToleranceConfig::default()).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn circle_nu_is_rotation_invariant_on_the_circle() {
        let dist = DistortionSpec::euclidean(2.0).unwrap();
        let tol = ToleranceConfig::default();
        let single = nu_integral(&UniformCircle, &dist, 7.0, &[1.0, 0.0], &tol).unwrap();
        let ring: Vec<Vec<f64>> = (0..16)
            .map(|i| {
                let t = i as f64 * PI / 8.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let grid = nu_numeric(&UniformCircle, &dist, 7.0, &ring, &tol).unwrap();
        assert!((grid - single).abs() < 1e-8);
        let many = nu_numeric(&UniformCircle, &dist, 100.0, &ring, &tol).unwrap();
        let few = nu_numeric(&UniformCircle, &dist, 1.0, &ring, &tol).unwrap();
        assert!(many <= few);
    }

    #[test]
    fn refinement_moves_toward_optimum() {
        // optimum radius for s = 20 is close to 1 − 1/80
        let dist = DistortionSpec::euclidean(2.0).unwrap();
        let tol = ToleranceConfig::default();
        let grid: Vec<Vec<f64>> = (0..=25).map(|i| vec![0.05 * i as f64, 0.0]).collect();
        let coarse = nu_numeric(&UniformCircle, &dist, 20.0, &grid, &tol).unwrap();
        let (fine, y) = nu_numeric_refined(&UniformCircle, &dist, 20.0, &grid, 0.05, &tol).unwrap();
        assert!(fine >= coarse);
        assert!((y[0] - (1.0 - 1.0 / 80.0)).abs() < 2e-3, "{y:?}");
    }

    #[test]
    fn slb_matches_classical_for_gaussian() {
        let line = LebesgueSpace::gaussian(1).unwrap();
        let dist = DistortionSpec::euclidean(2.0).unwrap();
        let tol = ToleranceConfig::default();
        let nu = |s: f64| nu_numeric(&line, &dist, s, &[vec![0.0]], &tol);
        let v1 = euclidean_unit_ball_volume(1).unwrap();
        for d in [0.01, 0.1, 0.5] {
            let numeric = r_slb_numeric(line.entropy(), &nu, d, &tol).unwrap();
            let closed = classical_slb(line.entropy(), 1, 2.0, v1, d).unwrap();
            assert!((numeric - closed).abs() < 1e-5, "D={d}: {numeric} vs {closed}");
        }
    }

    #[test]
    fn constant_nu_gives_zero() {
        let tol = ToleranceConfig::default();
        for d in [0.01, 1.0, 100.0] {
            let r = r_slb_numeric(0.0, &|_| Ok(1.0), d, &tol).unwrap();
            assert!(r.abs() < 1e-9, "{r}");
        }
    }

    #[test]
    fn errors_from_nu_propagate() {
        let tol = ToleranceConfig::default();
        let r = r_slb_numeric(0.0, &|_| Err(Error::Domain("boom".into())), 0.1, &tol);
        assert_eq!(r, Err(Error::Domain("boom".into())));
        // minimizer of sD − log(s)/2 sits at 1/(2D), beyond the bracket cap
        let r = r_slb_numeric(0.0, &|s: f64| Ok(s.powf(-0.5)), 1e-14, &tol);
        assert!(matches!(r, Err(Error::BracketExpansion(_))));
    }
}

use crate::error::{Error, Result};
use crate::numerics::{adaptive_quadrature, ToleranceConfig};

/// `h = −∫ f log f dx` over `[lo, hi]` for a density `f` with respect to
/// Lebesgue measure. Either limit may be infinite.
///
/// Points where `f = 0` contribute nothing. A negative or non-finite density
/// value is a domain error; a quadrature that runs out of subdivisions is
/// reported as non-convergence. When the reference measure is the source
/// distribution itself the entropy is identically zero and needs no call.
pub fn generalized_entropy_density(
    density: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let integrand = |x: f64| {
        let f = density(x);
        if f > 0.0 && f.is_finite() {
            -f * f.ln()
        } else if f == 0.0 {
            0.0
        } else {
            f64::NAN
        }
    };
    let r = adaptive_quadrature(integrand, lo, hi, tol)?;
    if !r.converged {
        return Err(Error::NotConverged {
            iterations: r.subdivisions,
            best: r.value,
            error: r.error,
        });
    }
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn uniform_densities() {
        let tol = ToleranceConfig::default();
        assert!(generalized_entropy_density(&|_| 1.0, 0.0, 1.0, &tol).unwrap().abs() < 1e-15);
        let h = generalized_entropy_density(&|_| 0.5, 0.0, 2.0, &tol).unwrap();
        assert!((h - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn gaussian_density_entropy() {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let h = generalized_entropy_density(&phi, f64::NEG_INFINITY, f64::INFINITY, &ToleranceConfig::default())
            .unwrap();
        assert!((h - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-8);
    }

    #[test]
    fn density_with_zero_region() {
        // triangular density on [0, 2] has entropy 1/2
        let tri = |x: f64| (1.0 - (x - 1.0).abs()).max(0.0);
        let h = generalized_entropy_density(&tri, -1.0, 3.0, &ToleranceConfig::default()).unwrap();
        assert!((h - 0.5).abs() < 1e-8);
    }

    #[test]
    fn negative_density_rejected() {
        assert!(generalized_entropy_density(&|_| -1.0, 0.0, 1.0, &ToleranceConfig::default()).is_err());
    }
}

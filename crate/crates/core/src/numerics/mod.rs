//! Special functions and scalar solvers.
//!
//! Everything in this module is a pure function of its inputs. The bound
//! formulas in [`crate::bounds`] are built from four primitives: the complete
//! and incomplete gamma functions, a bracketing convex minimizer, a bracketing
//! root finder and adaptive Gauss-Kronrod quadrature.

mod gamma;
mod quadrature;
mod solve;

pub use gamma::{
    gamma_fn, ln_gamma, lower_incomplete_gamma, upper_incomplete_gamma, INCOMPLETE_GAMMA_CROSSOVER,
};
pub use quadrature::{adaptive_quadrature, QuadResult};
pub use solve::{minimize_convex_1d, solve_root_monotone, ConvexSolveResult, RootResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping rule shared by the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        let tol = Self {
            abs_tol,
            rel_tol,
            max_iter,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidInput(format!(
                "tolerances need abs_tol > 0, rel_tol > 0, max_iter >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }

    /// Same tolerances with a different iteration budget.
    pub fn with_max_iter(self, max_iter: usize) -> Self {
        Self { max_iter, ..self }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_iter: 200,
        }
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerances() {
        let tol = ToleranceConfig::default();
        assert_eq!(tol.abs_tol, 1e-9);
        assert_eq!(tol.rel_tol, 1e-9);
        assert_eq!(tol.max_iter, 200);
        assert!(tol.validate().is_ok());
    }

    #[test]
    fn rejects_bad_tolerances() {
        assert!(ToleranceConfig::new(0.0, 1e-9, 10).is_err());
        assert!(ToleranceConfig::new(1e-9, -1.0, 10).is_err());
        assert!(ToleranceConfig::new(1e-9, 1e-9, 0).is_err());
        assert!(ToleranceConfig::new(f64::NAN, 1e-9, 10).is_err());
    }

    #[test]
    fn spacing_helpers() {
        let g = log_space(1e-4, 1e-1, 4);
        assert_eq!(g.len(), 4);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[3], 1e-1);
        assert!((g[1] - 1e-3).abs() < 1e-15);
        assert_eq!(lin_space(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}

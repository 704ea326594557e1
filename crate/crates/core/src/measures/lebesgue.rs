use std::f64::consts::{E, PI};

use rand::{Rng, RngCore};

use crate::error::{domain, Error, Result};
use crate::numerics::{adaptive_quadrature, QuadResult, ToleranceConfig};

use super::{MeasureModel, Provenance, Quantization, SubregularityCertificate};

/// `V_d = π^{d/2} / Γ(d/2 + 1)`
pub fn euclidean_unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    // V_d = (2π/d) V_{d−2} keeps small dimensions exact
    if d <= 64 {
        let mut v = if d % 2 == 0 { 1.0 } else { 2.0 };
        for j in ((d % 2 + 2)..=d).step_by(2) {
            v *= 2.0 * PI / j as f64;
        }
        return Ok(v);
    }
    let half = d as f64 / 2.0;
    Ok((half * PI.ln() - crate::numerics::ln_gamma(half + 1.0)?).exp())
}

/// Lebesgue measure on `ℝ^d` with a source of given differential entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct LebesgueSpace {
    d: usize,
    entropy: f64,
    volume: f64,
}

impl LebesgueSpace {
    pub fn new(d: usize, entropy: f64) -> Result<Self> {
        if !entropy.is_finite() {
            return Err(Error::InvalidInput(format!("entropy must be finite, got {entropy}")));
        }
        Ok(Self {
            d,
            entropy,
            volume: euclidean_unit_ball_volume(d)?,
        })
    }

    /// Standard Gaussian source: `h = (d/2) log(2πe)`.
    pub fn gaussian(d: usize) -> Result<Self> {
        Self::new(d, 0.5 * d as f64 * (2.0 * PI * E).ln())
    }

    /// `m = d`, `c = V_d`, `δ₀ = ∞`, infinite mass.
    pub fn certificate(&self) -> SubregularityCertificate {
        SubregularityCertificate {
            m: self.d as f64,
            c: self.volume,
            delta0: f64::INFINITY,
            total_mass: f64::INFINITY,
            provenance: Provenance::Analytic,
        }
    }
}

impl MeasureModel for LebesgueSpace {
    fn name(&self) -> &str {
        "lebesgue"
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn total_mass(&self) -> f64 {
        f64::INFINITY
    }

    fn entropy(&self) -> f64 {
        self.entropy
    }

    fn ball_measure(&self, _center: &[f64], radius: f64) -> f64 {
        if radius <= 0.0 {
            return 0.0;
        }
        self.volume * radius.powi(self.d as i32)
    }

    fn integrate(
        &self,
        f: &dyn Fn(&[f64]) -> f64,
        focus: Option<&[f64]>,
        tol: &ToleranceConfig,
    ) -> Result<QuadResult> {
        if self.d != 1 {
            return Err(Error::Unsupported(format!(
                "integration over R^{} is not implemented",
                self.d
            )));
        }
        let y = focus.map_or(0.0, |p| p[0]);
        let left = adaptive_quadrature(|x| f(&[x]), f64::NEG_INFINITY, y, tol)?;
        let right = adaptive_quadrature(|x| f(&[x]), y, f64::INFINITY, tol)?;
        Ok(QuadResult {
            value: left.value + right.value,
            error: left.error + right.error,
            converged: left.converged && right.converged,
            subdivisions: left.subdivisions + right.subdivisions,
        })
    }

    fn analytic_certificate(&self) -> Option<SubregularityCertificate> {
        Some(self.certificate())
    }
}

/// Lebesgue measure restricted to `[lo, hi]`, with a uniform source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueInterval {
    lo: f64,
    hi: f64,
}

impl LebesgueInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

impl MeasureModel for LebesgueInterval {
    fn name(&self) -> &str {
        "lebesgue_interval"
    }

    fn dim(&self) -> usize {
        1
    }

    fn total_mass(&self) -> f64 {
        self.length()
    }

    fn entropy(&self) -> f64 {
        self.length().ln()
    }

    fn has_sampler(&self) -> bool {
        true
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) -> bool {
        out[0] = self.lo + self.length() * rng.random::<f64>();
        true
    }

    fn ball_measure(&self, center: &[f64], radius: f64) -> f64 {
        let a = (center[0] - radius).max(self.lo);
        let b = (center[0] + radius).min(self.hi);
        (b - a).max(0.0)
    }

    fn integrate(
        &self,
        f: &dyn Fn(&[f64]) -> f64,
        focus: Option<&[f64]>,
        tol: &ToleranceConfig,
    ) -> Result<QuadResult> {
        match focus.map(|p| p[0]) {
            Some(y) if y > self.lo && y < self.hi => {
                let l = adaptive_quadrature(|x| f(&[x]), self.lo, y, tol)?;
                let r = adaptive_quadrature(|x| f(&[x]), y, self.hi, tol)?;
                Ok(QuadResult {
                    value: l.value + r.value,
                    error: l.error + r.error,
                    converged: l.converged && r.converged,
                    subdivisions: l.subdivisions + r.subdivisions,
                })
            }
            _ => adaptive_quadrature(|x| f(&[x]), self.lo, self.hi, tol),
        }
    }

    fn quantize(&self, n: usize) -> Option<Quantization> {
        if n == 0 {
            return None;
        }
        let width = self.length() / n as f64;
        Some(Quantization {
            points: (0..n).map(|i| vec![self.lo + width * (i as f64 + 0.5)]).collect(),
            probs: vec![1.0 / n as f64; n],
            cell_diameter: width,
        })
    }

    fn analytic_certificate(&self) -> Option<SubregularityCertificate> {
        Some(SubregularityCertificate {
            m: 1.0,
            c: 2.0,
            delta0: f64::INFINITY,
            total_mass: self.length(),
            provenance: Provenance::Analytic,
        })
    }
}

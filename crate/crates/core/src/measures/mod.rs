//! Reference measures and their subregularity certificates.
//!
//! A reference measure `μ` enters the bounds through three numbers: its total
//! mass, the generalized entropy `h_μ(X) = −E[log dμ_X/dμ(X)]` of the source
//! relative to it, and a certificate `μ(B(y, δ)) ≤ c δ^m` for `δ < δ₀`.
//! The [`MeasureModel`] trait exposes these together with sampling and
//! integration access so certificates can be checked empirically and the
//! numerical Shannon lower bound can be evaluated.

mod certify;
mod circle;
mod entropy;
mod ifs;
mod lebesgue;

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{QuadResult, ToleranceConfig};

pub use certify::{
    certify_subregularity, globalize_constant, jittered_centers, mc_ball_measure, mc_ball_profile,
    validate_certificate,
    CertificateCheck, McEstimate, Witness,
};
pub use circle::{circle_subregularity, UniformCircle};
pub use entropy::generalized_entropy_density;
pub use ifs::{
    cantor_certificate, j_delta_count, j_delta_max, similarity_dimension, Hull, IfsMeasure, IfsSpec,
    JDeltaMax, Similarity,
};
pub use lebesgue::{euclidean_unit_ball_volume, LebesgueInterval, LebesgueSpace};

/// Distortion `ρ(x, y) = base_metric(x, y)^k`.
///
/// Balls are taken with respect to `base_metric`, i.e. `ρ^{1/k}`:
/// `B(y, δ) = {x : base_metric(x, y) < δ}`.
#[derive(Clone)]
pub struct DistortionSpec {
    k: f64,
    base_metric: Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>,
    euclidean: bool,
}

impl DistortionSpec {
    /// `ρ(x, y) = ‖x − y‖₂^k`.
    pub fn euclidean(k: f64) -> Result<Self> {
        Self::check_k(k)?;
        Ok(Self {
            k,
            base_metric: Arc::new(euclidean_distance),
            euclidean: true,
        })
    }

    pub fn custom<F>(k: f64, base_metric: F) -> Result<Self>
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::check_k(k)?;
        Ok(Self {
            k,
            base_metric: Arc::new(base_metric),
            euclidean: false,
        })
    }

    fn check_k(k: f64) -> Result<()> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!("distortion exponent k must be positive, got {k}")));
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn is_euclidean(&self) -> bool {
        self.euclidean
    }

    /// `ρ^{1/k}(x, y)`
    pub fn base_metric(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.base_metric)(x, y)
    }

    /// `ρ(x, y)`
    pub fn distortion(&self, x: &[f64], y: &[f64]) -> f64 {
        let b = self.base_metric(x, y);
        if self.k == 2.0 {
            b * b
        } else {
            b.powf(self.k)
        }
    }

    pub fn in_ball(&self, x: &[f64], center: &[f64], radius: f64) -> bool {
        self.base_metric(x, center) < radius
    }
}

impl fmt::Debug for DistortionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistortionSpec")
            .field("k", &self.k)
            .field("base_metric", &if self.euclidean { "euclidean" } else { "custom" })
            .finish()
    }
}

pub fn euclidean_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Derived in closed form; holds exactly.
    Analytic,
    /// Estimated from Monte-Carlo ball counts; an empirical estimate, not a proof.
    Fitted,
}

/// Assertion `μ(B(y, δ)) ≤ c δ^m` for every `y` and every `δ ∈ (0, delta0)`.
///
/// `delta0` and `total_mass` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubregularityCertificate {
    pub m: f64,
    pub c: f64,
    pub delta0: f64,
    pub total_mass: f64,
    pub provenance: Provenance,
}

impl SubregularityCertificate {
    pub fn new(m: f64, c: f64, delta0: f64, total_mass: f64, provenance: Provenance) -> Result<Self> {
        let cert = Self {
            m,
            c,
            delta0,
            total_mass,
            provenance,
        };
        cert.validate()?;
        Ok(cert)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCertificate(msg));
        if !(self.m > 0.0) || !self.m.is_finite() {
            return bad(format!("dimension m must be positive and finite, got {}", self.m));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return bad(format!("constant c must be positive and finite, got {}", self.c));
        }
        if !(self.delta0 > 0.0) {
            return bad(format!("delta0 must be positive, got {}", self.delta0));
        }
        if !(self.total_mass >= 0.0) {
            return bad(format!("total mass must be nonnegative, got {}", self.total_mass));
        }
        Ok(())
    }

    /// `c δ^m`
    pub fn ball_bound(&self, delta: f64) -> f64 {
        self.c * delta.powf(self.m)
    }

    /// Whether `δ` lies in the certified range `(0, delta0)`.
    pub fn covers(&self, delta: f64) -> bool {
        delta > 0.0 && delta < self.delta0
    }

    /// Either `delta0 = ∞` or `μ(X) < ∞`; required before the certificate
    /// can drive the explicit lower bound.
    pub fn is_bound_ready(&self) -> bool {
        self.delta0.is_infinite() || self.total_mass.is_finite()
    }

    /// `μ(X) δ₀^{−m}` with the convention `0 · ∞ = 0` when `δ₀ = ∞`.
    pub fn mass_over_radius(&self) -> f64 {
        if self.delta0.is_infinite() {
            0.0
        } else {
            self.total_mass * self.delta0.powf(-self.m)
        }
    }
}

/// Cell representatives and probabilities of a quantized measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantization {
    pub points: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
    /// Largest diameter of a cell.
    pub cell_diameter: f64,
}

/// A reference measure on `ℝ^d`.
///
/// `ball_measure` uses Euclidean balls. Models with infinite mass have no
/// sampler.
pub trait MeasureModel: Send + Sync {
    fn name(&self) -> &str;

    /// Ambient dimension of the points handed to and returned from the model.
    fn dim(&self) -> usize;

    fn total_mass(&self) -> f64;

    /// Generalized entropy of the modelled source relative to this measure.
    fn entropy(&self) -> f64;

    fn has_sampler(&self) -> bool {
        false
    }

    /// Draw one point from `μ / μ(X)` into `out`. Returns `false` when the
    /// model has no sampler.
    fn sample_into(&self, _rng: &mut dyn RngCore, _out: &mut [f64]) -> bool {
        false
    }

    /// `μ(B(center, radius))` for the open Euclidean ball.
    fn ball_measure(&self, center: &[f64], radius: f64) -> f64;

    /// `∫ f dμ` in the model's natural parametrization. `focus` marks a point
    /// near which `f` may be sharply peaked.
    fn integrate(
        &self,
        f: &dyn Fn(&[f64]) -> f64,
        focus: Option<&[f64]>,
        tol: &ToleranceConfig,
    ) -> Result<QuadResult>;

    /// Partition of the normalized measure into `n` cells of equal mass,
    /// when the model has an analytic one.
    fn quantize(&self, _n: usize) -> Option<Quantization> {
        None
    }

    /// Analytic certificate shipped with the model, if any.
    fn analytic_certificate(&self) -> Option<SubregularityCertificate> {
        None
    }
}

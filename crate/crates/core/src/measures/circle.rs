use std::f64::consts::{PI, TAU};

use rand::{Rng, RngCore};

use crate::error::{domain, Result};
use crate::numerics::{adaptive_quadrature, QuadResult, ToleranceConfig};

use super::{MeasureModel, Provenance, Quantization, SubregularityCertificate};

/// Uniform probability measure on the unit circle in `ℝ²`.
///
/// The source is distributed according to this same measure, so the
/// generalized entropy is zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformCircle;

/// Analytic certificate for the uniform circle measure with Euclidean balls:
/// `m = 1`, `c = arcsin(δ̂)/(π δ̂)`, `δ₀ = δ̂`.
///
/// The arc cut out by a ball of radius `δ ≤ 1` has length at most
/// `2 arcsin δ`, and `arcsin(δ)/δ` is increasing, so `arcsin δ / π ≤ c δ`
/// for every `δ < δ̂`.
pub fn circle_subregularity(delta_hat: f64) -> Result<SubregularityCertificate> {
    if !(delta_hat > 0.0 && delta_hat <= 1.0) {
        return domain(format!("delta_hat must lie in (0, 1], got {delta_hat}"));
    }
    SubregularityCertificate::new(
        1.0,
        delta_hat.asin() / (PI * delta_hat),
        delta_hat,
        1.0,
        Provenance::Analytic,
    )
}

impl MeasureModel for UniformCircle {
    fn name(&self) -> &str {
        "circle"
    }

    fn dim(&self) -> usize {
        2
    }

    fn total_mass(&self) -> f64 {
        1.0
    }

    fn entropy(&self) -> f64 {
        0.0
    }

    fn has_sampler(&self) -> bool {
        true
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) -> bool {
        let theta = rng.random::<f64>() * TAU;
        let (s, c) = theta.sin_cos();
        out[0] = c;
        out[1] = s;
        true
    }

    fn ball_measure(&self, center: &[f64], radius: f64) -> f64 {
        if radius <= 0.0 {
            return 0.0;
        }
        let r = center[0].hypot(center[1]);
        if r == 0.0 {
            return if radius > 1.0 { 1.0 } else { 0.0 };
        }
        // |e^{iφ} − y|² = 1 + r² − 2 r cos φ < radius²
        let t = (1.0 + r * r - radius * radius) / (2.0 * r);
        if t >= 1.0 {
            0.0
        } else if t < -1.0 {
            1.0
        } else {
            t.acos() / PI
        }
    }

    fn integrate(
        &self,
        f: &dyn Fn(&[f64]) -> f64,
        focus: Option<&[f64]>,
        tol: &ToleranceConfig,
    ) -> Result<QuadResult> {
        // start the period at the focus angle so a peak sits at the endpoints,
        // where the Kronrod nodes cluster
        let phi = match focus {
            Some(y) if y[0] != 0.0 || y[1] != 0.0 => y[1].atan2(y[0]),
            _ => 0.0,
        };
        let r = adaptive_quadrature(
            |theta| {
                let (s, c) = theta.sin_cos();
                f(&[c, s])
            },
            phi,
            phi + TAU,
            tol,
        )?;
        Ok(QuadResult {
            value: r.value / TAU,
            error: r.error / TAU,
            ..r
        })
    }

    /// `n` equal arcs represented by their midpoints.
    fn quantize(&self, n: usize) -> Option<Quantization> {
        if n == 0 {
            return None;
        }
        let points = (0..n)
            .map(|i| {
                let (s, c) = (TAU * (i as f64 + 0.5) / n as f64).sin_cos();
                vec![c, s]
            })
            .collect();
        Some(Quantization {
            points,
            probs: vec![1.0 / n as f64; n],
            cell_diameter: if n == 1 { 2.0 } else { 2.0 * (PI / n as f64).sin() },
        })
    }

    fn analytic_certificate(&self) -> Option<SubregularityCertificate> {
        circle_subregularity(1.0).ok()
    }
}

//! Monte-Carlo estimates of ball measures and empirical checks of
//! subregularity certificates.
//!
//! All estimators draw one sample set of size `n` from a `ChaCha8` stream
//! seeded with `seed` and reuse it for every center and radius, so results
//! are reproducible and the parallel evaluation over centers does not
//! affect them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{DistortionSpec, MeasureModel, Provenance, SubregularityCertificate};

/// Estimate of `μ(B)` with a 3-sigma binomial half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub half_width: f64,
}

impl McEstimate {
    fn from_hits(hits: usize, n: usize, mass: f64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            estimate: mass * p,
            half_width: 3.0 * (p * (1.0 - p) / n as f64).sqrt() * mass,
        }
    }
}

/// A ball whose estimated measure exceeds the certified bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub center: Vec<f64>,
    pub delta: f64,
    pub estimate: f64,
    pub half_width: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    /// Every checked ball satisfies `estimate − half_width ≤ c δ^m`.
    pub passed: bool,
    /// Largest `estimate / (c δ^m)` over the checked balls.
    pub worst_ratio: f64,
    /// The most violated ball, if any ball failed.
    pub witness: Option<Witness>,
    /// Number of (center, radius) pairs inside the certified range.
    pub checks: usize,
}

fn draw_samples(model: &dyn MeasureModel, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !model.has_sampler() || !model.total_mass().is_finite() {
        return Err(Error::Unsupported(format!(
            "model '{}' has no sampler; Monte-Carlo estimates need a finite measure",
            model.name()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![0.0; n * d];
    for chunk in points.chunks_mut(d) {
        model.sample_into(&mut rng, chunk);
    }
    Ok(points)
}

fn profile_from_samples(
    model: &dyn MeasureModel,
    dist: &DistortionSpec,
    samples: &[f64],
    center: &[f64],
    deltas: &[f64],
) -> Vec<McEstimate> {
    let d = model.dim();
    let n = samples.len() / d;
    let mut hits = vec![0usize; deltas.len()];
    for x in samples.chunks(d) {
        let r = dist.base_metric(x, center);
        for (h, &delta) in hits.iter_mut().zip(deltas) {
            if r < delta {
                *h += 1;
            }
        }
    }
    hits.into_iter()
        .map(|h| McEstimate::from_hits(h, n, model.total_mass()))
        .collect()
}

/// Estimate `μ(B(center, δ))` for the Euclidean ball from `n` samples.
pub fn mc_ball_measure(model: &dyn MeasureModel, center: &[f64], delta: f64, n: usize, seed: u64) -> Result<McEstimate> {
    let dist = DistortionSpec::euclidean(1.0)?;
    Ok(mc_ball_profile(model, &dist, center, &[delta], n, seed)?[0])
}

/// Ball-measure estimates at several radii around one center, all from the
/// same sample set.
pub fn mc_ball_profile(
    model: &dyn MeasureModel,
    dist: &DistortionSpec,
    center: &[f64],
    deltas: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    let samples = draw_samples(model, n, seed)?;
    Ok(profile_from_samples(model, dist, &samples, center, deltas))
}

/// Fit `c = max (estimate + half_width) / δ^m` over the supplied balls.
///
/// The result is an empirical estimate, not a proof, and carries
/// [`Provenance::Fitted`]. Its `delta0` is the largest radius probed.
pub fn certify_subregularity(
    model: &dyn MeasureModel,
    dist: &DistortionSpec,
    m: f64,
    centers: &[Vec<f64>],
    deltas: &[f64],
    n: usize,
    seed: u64,
) -> Result<SubregularityCertificate> {
    if centers.is_empty() || deltas.is_empty() {
        return Err(Error::InvalidInput("certification needs centers and radii".into()));
    }
    if deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidInput("radii must be positive and finite".into()));
    }
    let samples = draw_samples(model, n, seed)?;
    let c = centers
        .par_iter()
        .map(|y| {
            profile_from_samples(model, dist, &samples, y, deltas)
                .iter()
                .zip(deltas)
                .map(|(e, d)| (e.estimate + e.half_width) / d.powf(m))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    if c <= 0.0 {
        return Err(Error::InvalidInput("no sample fell in any probed ball".into()));
    }
    let delta0 = deltas.iter().cloned().fold(0.0, f64::max);
    SubregularityCertificate::new(m, c, delta0, model.total_mass(), Provenance::Fitted)
}

/// Check `estimate − half_width ≤ c δ^m` at every center and every radius
/// the certificate covers.
pub fn validate_certificate(
    model: &dyn MeasureModel,
    dist: &DistortionSpec,
    cert: &SubregularityCertificate,
    centers: &[Vec<f64>],
    deltas: &[f64],
    n: usize,
    seed: u64,
) -> Result<CertificateCheck> {
    cert.validate()?;
    let radii: Vec<f64> = deltas.iter().cloned().filter(|d| cert.covers(*d)).collect();
    let samples = draw_samples(model, n, seed)?;
    let per_center: Vec<(f64, Option<Witness>, f64)> = centers
        .par_iter()
        .map(|y| {
            let mut worst_ratio: f64 = 0.0;
            let mut witness: Option<Witness> = None;
            let mut worst_excess = 0.0;
            for (e, &delta) in profile_from_samples(model, dist, &samples, y, &radii).iter().zip(&radii) {
                let bound = cert.ball_bound(delta);
                worst_ratio = worst_ratio.max(e.estimate / bound);
                let excess = (e.estimate - e.half_width - bound) / bound;
                if excess > 0.0 && excess > worst_excess {
                    worst_excess = excess;
                    witness = Some(Witness {
                        center: y.clone(),
                        delta,
                        estimate: e.estimate,
                        half_width: e.half_width,
                        bound,
                    });
                }
            }
            (worst_ratio, witness, worst_excess)
        })
        .collect();
    let worst_ratio = per_center.iter().map(|p| p.0).fold(0.0, f64::max);
    let witness = per_center
        .into_iter()
        .filter(|p| p.1.is_some())
        .max_by(|a, b| a.2.total_cmp(&b.2))
        .and_then(|p| p.1);
    Ok(CertificateCheck {
        passed: witness.is_none(),
        worst_ratio,
        witness,
        checks: centers.len() * radii.len(),
    })
}

/// Trade the radius threshold for a larger constant:
/// `μ(B(y, δ)) ≤ max(c, μ(X) δ₀^{−m}) δ^m` for every `δ > 0`.
///
/// A certificate that already has `δ₀ = ∞` is returned unchanged, which
/// makes the operation idempotent.
pub fn globalize_constant(cert: &SubregularityCertificate) -> Result<SubregularityCertificate> {
    cert.validate()?;
    if cert.delta0.is_infinite() {
        return Ok(*cert);
    }
    if !cert.total_mass.is_finite() {
        return Err(Error::InvalidCertificate(
            "globalization needs a finite total mass".into(),
        ));
    }
    Ok(SubregularityCertificate {
        c: cert.c.max(cert.mass_over_radius()),
        delta0: f64::INFINITY,
        ..*cert
    })
}

/// Points drawn from the model and jittered uniformly by up to `spread` in
/// each coordinate; useful centers for probing balls near the support.
pub fn jittered_centers(model: &dyn MeasureModel, count: usize, spread: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    use rand::Rng;
    let d = model.dim();
    let base = draw_samples(model, count, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    Ok(base
        .chunks(d)
        .map(|p| p.iter().map(|v| v + spread * (2.0 * rng.random::<f64>() - 1.0)).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{circle_subregularity, IfsMeasure, LebesgueInterval, LebesgueSpace, UniformCircle};

    #[test]
    fn circle_ball_estimates() {
        let zero = mc_ball_measure(&UniformCircle, &[0.0, 0.0], 0.5, 10_000, 1).unwrap();
        assert_eq!((zero.estimate, zero.half_width), (0.0, 0.0));
        let half = mc_ball_measure(&UniformCircle, &[1.0, 0.0], 2f64.sqrt(), 100_000, 2).unwrap();
        assert!((half.estimate - 0.5).abs() <= half.half_width);
        assert!((half.half_width - 3.0 * (0.25f64 / 1e5).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn cantor_whole_set() {
        let e = mc_ball_measure(&IfsMeasure::cantor(), &[0.5], 1.0, 5_000, 3).unwrap();
        assert_eq!((e.estimate, e.half_width), (1.0, 0.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let a = mc_ball_measure(&UniformCircle, &[0.9, 0.1], 0.3, 20_000, 9).unwrap();
        let b = mc_ball_measure(&UniformCircle, &[0.9, 0.1], 0.3, 20_000, 9).unwrap();
        let c = mc_ball_measure(&UniformCircle, &[0.9, 0.1], 0.3, 20_000, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn infinite_mass_has_no_sampler() {
        let line = LebesgueSpace::gaussian(1).unwrap();
        assert!(matches!(mc_ball_measure(&line, &[0.0], 1.0, 10, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn fitted_constants() {
        let dist = DistortionSpec::euclidean(2.0).unwrap();
        let centers = jittered_centers(&UniformCircle, 60, 0.05, 4).unwrap();
        let deltas: Vec<f64> = (1..=9).map(|i| 0.1 * i as f64).collect();
        let cert = certify_subregularity(&UniformCircle, &dist, 1.0, &centers, &deltas, 50_000, 5).unwrap();
        let envelope = 0.9f64.asin() / (0.9 * std::f64::consts::PI);
        assert_eq!(cert.provenance, Provenance::Fitted);
        assert_eq!(cert.delta0, 0.9);
        assert!(cert.c <= envelope + 0.05, "fitted c = {}", cert.c);

        let unit = LebesgueInterval::new(0.0, 1.0).unwrap();
        let centers: Vec<Vec<f64>> = (0..21).map(|i| vec![i as f64 / 20.0]).collect();
        let deltas = [0.05, 0.1, 0.2, 0.4];
        let cert = certify_subregularity(&unit, &dist, 1.0, &centers, &deltas, 50_000, 6).unwrap();
        assert!((cert.c - 2.0).abs() < 0.2, "fitted c = {}", cert.c);
    }

    #[test]
    fn validation_finds_witness() {
        let dist = DistortionSpec::euclidean(2.0).unwrap();
        let centers = jittered_centers(&UniformCircle, 50, 0.02, 7).unwrap();
        let deltas: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
        let good = circle_subregularity(1.0).unwrap();
        let ok = validate_certificate(&UniformCircle, &dist, &good, &centers, &deltas, 20_000, 8).unwrap();
        assert!(ok.passed && ok.witness.is_none());
        assert_eq!(ok.checks, 50 * 19);
        let bad = SubregularityCertificate { c: good.c / 10.0, ..good };
        let fail = validate_certificate(&UniformCircle, &dist, &bad, &centers, &deltas, 20_000, 8).unwrap();
        assert!(!fail.passed);
        let w = fail.witness.unwrap();
        assert!(w.estimate - w.half_width > w.bound);
    }

    #[test]
    fn globalization() {
        let g = globalize_constant(&circle_subregularity(1.0).unwrap()).unwrap();
        assert_eq!((g.c, g.m), (1.0, 1.0));
        assert!(g.delta0.is_infinite());
        assert_eq!(globalize_constant(&g).unwrap(), g);

        let m = 2f64.ln() / 3f64.ln();
        let cantor = SubregularityCertificate::new(m, 3.0, 2.0, 1.0, Provenance::Analytic).unwrap();
        assert_eq!(globalize_constant(&cantor).unwrap().c, 3.0);

        let lebesgue = SubregularityCertificate::new(1.0, 2.0, 1.0, f64::INFINITY, Provenance::Analytic).unwrap();
        assert!(globalize_constant(&lebesgue).is_err());
    }
}

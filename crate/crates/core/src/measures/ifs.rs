//! Iterated function systems of contracting similarities and their
//! self-similar measures.
//!
//! Cylinders `s_α(K)` are replaced by `s_α(H)` where `H ⊇ K` is a cheap
//! enclosing set: the exact convex hull (an interval) in one dimension, a
//! bounding ball otherwise. For the middle-third Cantor set the hull is
//! `[0, 1]` and the images are exactly the standard construction intervals,
//! so counting intersecting cylinders is exact. For other systems the test
//! can only over-count, which keeps any derived subregularity constant
//! conservative.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{solve_root_monotone, QuadResult, ToleranceConfig};

use super::{euclidean_distance, MeasureModel, Provenance, Quantization, SubregularityCertificate};

/// `s(u) = ratio · Q u + offset` with `Q` orthogonal (identity when absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub ratio: f64,
    pub offset: Vec<f64>,
    /// Row-major `d × d` orthogonal matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<f64>>,
}

impl Similarity {
    pub fn new(ratio: f64, offset: Vec<f64>) -> Self {
        Self {
            ratio,
            offset,
            rotation: None,
        }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.affine(u.len()).apply(u)
    }

    fn affine(&self, d: usize) -> Affine {
        let mut a = vec![0.0; d * d];
        match &self.rotation {
            Some(q) => a.iter_mut().zip(q).for_each(|(x, &qv)| *x = self.ratio * qv),
            None => (0..d).for_each(|i| a[i * d + i] = self.ratio),
        }
        Affine {
            dim: d,
            linear: a,
            offset: self.offset.clone(),
            ratio: self.ratio,
        }
    }
}

/// Affine map `x ↦ L x + b` whose linear part is a scaled orthogonal matrix.
#[derive(Debug, Clone)]
struct Affine {
    dim: usize,
    linear: Vec<f64>,
    offset: Vec<f64>,
    ratio: f64,
}

impl Affine {
    fn identity(dim: usize) -> Self {
        let mut linear = vec![0.0; dim * dim];
        (0..dim).for_each(|i| linear[i * dim + i] = 1.0);
        Self {
            dim,
            linear,
            offset: vec![0.0; dim],
            ratio: 1.0,
        }
    }

    fn apply(&self, u: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| self.offset[i] + (0..d).map(|j| self.linear[i * d + j] * u[j]).sum::<f64>())
            .collect()
    }

    /// `self ∘ other`
    fn compose(&self, other: &Affine) -> Affine {
        let d = self.dim;
        let mut linear = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                linear[i * d + j] = (0..d).map(|l| self.linear[i * d + l] * other.linear[l * d + j]).sum();
            }
        }
        Affine {
            dim: d,
            linear,
            offset: self.apply(&other.offset),
            ratio: self.ratio * other.ratio,
        }
    }
}

/// A set known to contain the attractor `K`, closed under every map of the
/// system (`s_i(H) ⊆ H`), so cylinder images nest.
#[derive(Debug, Clone, PartialEq)]
pub enum Hull {
    Interval { lo: f64, hi: f64 },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Hull {
    fn image(&self, map: &Affine) -> Hull {
        match self {
            Hull::Interval { lo, hi } => {
                let a = map.apply(&[*lo])[0];
                let b = map.apply(&[*hi])[0];
                Hull::Interval {
                    lo: a.min(b),
                    hi: a.max(b),
                }
            }
            Hull::Ball { center, radius } => Hull::Ball {
                center: map.apply(center),
                radius: map.ratio * radius,
            },
        }
    }

    /// Does the set meet the open ball `B(x, δ)`?
    pub fn meets_ball(&self, x: &[f64], delta: f64) -> bool {
        match self {
            Hull::Interval { lo, hi } => {
                let gap = if x[0] < *lo {
                    lo - x[0]
                } else if x[0] > *hi {
                    x[0] - hi
                } else {
                    0.0
                };
                gap < delta
            }
            Hull::Ball { center, radius } => euclidean_distance(x, center) - radius < delta,
        }
    }

    /// Is the set contained in the open ball `B(x, δ)`?
    pub fn inside_ball(&self, x: &[f64], delta: f64) -> bool {
        match self {
            Hull::Interval { lo, hi } => x[0] - delta < *lo && *hi < x[0] + delta,
            Hull::Ball { center, radius } => euclidean_distance(x, center) + radius < delta,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Hull::Interval { lo, hi } => hi - lo,
            Hull::Ball { radius, .. } => 2.0 * radius,
        }
    }
}

/// A finite family of contracting similarities on `ℝ^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsSpec {
    pub dimension: usize,
    pub maps: Vec<Similarity>,
}

impl IfsSpec {
    pub fn new(dimension: usize, maps: Vec<Similarity>) -> Result<Self> {
        let spec = Self { dimension, maps };
        spec.validate()?;
        Ok(spec)
    }

    /// Middle-third Cantor set: `x/3` and `x/3 + 2/3`.
    pub fn cantor() -> Self {
        Self {
            dimension: 1,
            maps: vec![
                Similarity::new(1.0 / 3.0, vec![0.0]),
                Similarity::new(1.0 / 3.0, vec![2.0 / 3.0]),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension;
        if d == 0 {
            return Err(Error::InvalidInput("IFS dimension must be at least 1".into()));
        }
        if self.maps.is_empty() {
            return Err(Error::InvalidInput("IFS needs at least one map".into()));
        }
        for (i, s) in self.maps.iter().enumerate() {
            if !(s.ratio > 0.0 && s.ratio < 1.0) {
                return Err(Error::InvalidInput(format!("map {i}: ratio {} not in (0, 1)", s.ratio)));
            }
            if s.offset.len() != d || s.offset.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("map {i}: offset must have {d} finite entries")));
            }
            if let Some(q) = &s.rotation {
                if q.len() != d * d {
                    return Err(Error::InvalidInput(format!("map {i}: rotation must have {} entries", d * d)));
                }
                for r in 0..d {
                    for c in 0..d {
                        let dot: f64 = (0..d).map(|l| q[r * d + l] * q[c * d + l]).sum();
                        let want = if r == c { 1.0 } else { 0.0 };
                        if (dot - want).abs() > 1e-10 {
                            return Err(Error::InvalidInput(format!("map {i}: rotation is not orthogonal")));
                        }
                    }
                }
            }
            // ‖s(u) − s(v)‖ = κ ‖u − v‖ on a few test pairs
            for t in 0..3 {
                let u: Vec<f64> = (0..d).map(|j| (t * d + j) as f64 * 0.37 - 0.5).collect();
                let v: Vec<f64> = (0..d).map(|j| 1.3 - (j + t) as f64 * 0.71).collect();
                let lhs = euclidean_distance(&s.apply(&u), &s.apply(&v));
                let rhs = s.ratio * euclidean_distance(&u, &v);
                if (lhs - rhs).abs() > 1e-9 * rhs.max(1.0) {
                    return Err(Error::InvalidInput(format!("map {i} is not a similarity")));
                }
            }
        }
        Ok(())
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(|s| s.ratio).collect()
    }

    fn affines(&self) -> Vec<Affine> {
        self.maps.iter().map(|s| s.affine(self.dimension)).collect()
    }

    /// Fixed point of the first map; a point of the attractor.
    pub fn anchor(&self) -> Vec<f64> {
        fixed_point(&self.maps[0].affine(self.dimension))
    }

    pub fn hull(&self) -> Hull {
        let maps = self.affines();
        if self.dimension == 1 {
            let p = self.anchor()[0];
            let (mut lo, mut hi) = (p, p);
            for _ in 0..10_000 {
                let (mut nlo, mut nhi) = (lo, hi);
                for m in &maps {
                    for e in [lo, hi] {
                        let v = m.apply(&[e])[0];
                        nlo = nlo.min(v);
                        nhi = nhi.max(v);
                    }
                }
                let done = (nlo - lo).abs() <= 1e-16 * (1.0 + nlo.abs()) && (nhi - hi).abs() <= 1e-16 * (1.0 + nhi.abs());
                lo = nlo;
                hi = nhi;
                if done {
                    break;
                }
            }
            Hull::Interval { lo, hi }
        } else {
            let d = self.dimension;
            let fixed: Vec<Vec<f64>> = maps.iter().map(fixed_point).collect();
            let center: Vec<f64> = (0..d).map(|j| fixed.iter().map(|p| p[j]).sum::<f64>() / fixed.len() as f64).collect();
            let radius = maps
                .iter()
                .map(|m| euclidean_distance(&m.apply(&center), &center) / (1.0 - m.ratio))
                .fold(0.0, f64::max);
            Hull::Ball { center, radius }
        }
    }

    /// A certificate from the covering count: `μ(B(x, δ)) ≤ |J_δ(x)| δ^m`
    /// for the normalized natural measure, with `c` the largest count seen
    /// on the supplied grid. Grid-based, so marked as fitted.
    pub fn covering_certificate(&self, xs: &[Vec<f64>], deltas: &[f64], max_depth: usize) -> Result<SubregularityCertificate> {
        let m = similarity_dimension(self, &ToleranceConfig::default())?;
        if m <= 0.0 {
            return domain("covering certificate needs positive similarity dimension");
        }
        let worst = j_delta_max(self, xs, deltas, max_depth)?;
        SubregularityCertificate::new(m, (worst.max as f64).max(1.0), f64::INFINITY, 1.0, Provenance::Fitted)
    }
}

fn fixed_point(map: &Affine) -> Vec<f64> {
    let mut x = vec![0.0; map.dim];
    for _ in 0..100_000 {
        let nx = map.apply(&x);
        let step = euclidean_distance(&nx, &x);
        x = nx;
        if step <= 1e-17 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
    }
    x
}

/// The unique `m ≥ 0` with `Σ κ_i^m = 1`.
pub fn similarity_dimension(ifs: &IfsSpec, tol: &ToleranceConfig) -> Result<f64> {
    ifs.validate()?;
    let ratios = ifs.ratios();
    if ratios.len() == 1 {
        return Ok(0.0);
    }
    let kappa_max = ratios.iter().cloned().fold(0.0, f64::max);
    // Σ κ^m ≤ n κ_max^m ≤ 1 beyond this point
    let hi = (ratios.len() as f64).ln() / -kappa_max.ln() + 1.0;
    let g = |m: f64| ratios.iter().map(|k| k.powf(m)).sum::<f64>() - 1.0;
    let tight = tol.with_abs_tol(tol.abs_tol.min(1e-14)).with_max_iter(tol.max_iter.max(200));
    let r = solve_root_monotone(g, 0.0, hi, &tight)?;
    if !r.converged {
        return Err(Error::NotConverged {
            iterations: r.iterations,
            best: r.root,
            error: r.residual,
        });
    }
    Ok(r.root)
}

/// `|J_δ(x)|`: words `α` with `κ_α ≤ δ < κ_ᾱ` whose cylinder meets the open
/// ball `B(x, δ)`.
pub fn j_delta_count(ifs: &IfsSpec, x: &[f64], delta: f64, max_depth: usize) -> Result<usize> {
    ifs.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("j_delta_count needs delta in (0, 1), got {delta}"));
    }
    if x.len() != ifs.dimension {
        return Err(Error::InvalidInput(format!("point has {} coordinates, IFS lives in dimension {}", x.len(), ifs.dimension)));
    }
    let kappa_min = ifs.ratios().into_iter().fold(1.0, f64::min);
    if kappa_min.powi(max_depth.min(i32::MAX as usize) as i32) > delta {
        return Err(Error::DepthExhausted { max_depth, delta });
    }
    let maps = ifs.affines();
    let hull = ifs.hull();
    let mut count = 0;
    let mut stack = vec![(Affine::identity(ifs.dimension), 0usize)];
    while let Some((word, depth)) = stack.pop() {
        for m in &maps {
            let child = word.compose(m);
            if !hull.image(&child).meets_ball(x, delta) {
                continue;
            }
            if child.ratio <= delta {
                count += 1;
            } else if depth + 1 >= max_depth {
                return Err(Error::DepthExhausted { max_depth, delta });
            } else {
                stack.push((child, depth + 1));
            }
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JDeltaMax {
    pub max: usize,
    pub x: Vec<f64>,
    pub delta: f64,
    pub evaluations: usize,
}

/// Exhaustive maximum of [`j_delta_count`] over a grid of centers and radii.
pub fn j_delta_max(ifs: &IfsSpec, xs: &[Vec<f64>], deltas: &[f64], max_depth: usize) -> Result<JDeltaMax> {
    if xs.is_empty() || deltas.is_empty() {
        return Err(Error::InvalidInput("j_delta_max needs a non-empty grid".into()));
    }
    let mut best = JDeltaMax {
        max: 0,
        x: xs[0].clone(),
        delta: deltas[0],
        evaluations: 0,
    };
    for x in xs {
        for &delta in deltas {
            let n = j_delta_count(ifs, x, delta, max_depth)?;
            best.evaluations += 1;
            if n > best.max {
                best.max = n;
                best.x = x.clone();
                best.delta = delta;
            }
        }
    }
    Ok(best)
}

/// Certificate `μ(B(x, δ)) ≤ 3 δ^{log 2/log 3}` for the uniform Cantor measure.
pub fn cantor_certificate() -> SubregularityCertificate {
    SubregularityCertificate {
        m: 2f64.ln() / 3f64.ln(),
        c: 3.0,
        delta0: f64::INFINITY,
        total_mass: 1.0,
        provenance: Provenance::Analytic,
    }
}

/// Self-similar probability measure `μ = Σ p_i μ ∘ s_i⁻¹`.
///
/// With the default weights `p_i = κ_i^m` (`m` the similarity dimension)
/// this is the normalized `m`-dimensional Hausdorff measure on the
/// attractor whenever the open set condition holds. The source is
/// distributed according to the measure itself, so the entropy is zero.
#[derive(Debug, Clone)]
pub struct IfsMeasure {
    name: String,
    spec: IfsSpec,
    maps: Vec<Affine>,
    weights: Vec<f64>,
    hull: Hull,
    anchor: Vec<f64>,
    /// Mean of the measure; cylinder means are its images.
    barycenter: Vec<f64>,
    sample_depth: usize,
    certificate: Option<SubregularityCertificate>,
}

/// Weight below which cylinders are no longer subdivided.
const WEIGHT_FLOOR: f64 = 1e-17;
const INTEGRATION_MIN_DEPTH: usize = 4;

impl IfsMeasure {
    pub fn new(spec: IfsSpec) -> Result<Self> {
        let m = similarity_dimension(&spec, &ToleranceConfig::default())?;
        let weights: Vec<f64> = spec.ratios().iter().map(|k| k.powf(m)).collect();
        Self::with_weights(spec, weights)
    }

    pub fn with_weights(spec: IfsSpec, weights: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if weights.len() != spec.maps.len() || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidInput("one positive weight per map required".into()));
        }
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let kappa_max = spec.ratios().into_iter().fold(0.0, f64::max);
        let hull = spec.hull();
        let scale = hull.diameter().max(1.0);
        let sample_depth = ((1e-17 / scale).ln() / kappa_max.ln()).ceil() as usize;
        let maps = spec.affines();
        // b = Σ p_i s_i(b)
        let d = spec.dimension;
        let mut barycenter = spec.anchor();
        for _ in 0..100_000 {
            let mut next = vec![0.0; d];
            for (m, p) in maps.iter().zip(&weights) {
                for (n, v) in next.iter_mut().zip(m.apply(&barycenter)) {
                    *n += p * v;
                }
            }
            let step = euclidean_distance(&next, &barycenter);
            barycenter = next;
            if step <= 1e-17 * scale {
                break;
            }
        }
        Ok(Self {
            barycenter,
            name: "ifs".into(),
            maps,
            anchor: spec.anchor(),
            spec,
            weights,
            hull,
            sample_depth: sample_depth.max(1),
            certificate: None,
        })
    }

    /// Uniform (normalized Hausdorff) measure on the middle-third Cantor set.
    pub fn cantor() -> Self {
        let mut measure = Self::new(IfsSpec::cantor()).expect("cantor IFS is valid");
        measure.name = "cantor".into();
        measure.certificate = Some(cantor_certificate());
        measure
    }

    pub fn spec(&self) -> &IfsSpec {
        &self.spec
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn hull(&self) -> &Hull {
        &self.hull
    }

    /// All depth-`depth` cylinders as (representative point, mass, diameter),
    /// representatives being the centers of the cylinder hulls.
    pub fn cylinders(&self, depth: usize) -> Vec<(Vec<f64>, f64, f64)> {
        let mut level = vec![(Affine::identity(self.spec.dimension), 1.0)];
        for _ in 0..depth {
            level = level
                .iter()
                .flat_map(|(word, w)| self.maps.iter().zip(&self.weights).map(move |(m, p)| (word.compose(m), w * p)))
                .collect();
        }
        level
            .into_iter()
            .map(|(word, w)| {
                let h = self.hull.image(&word);
                let rep = match &h {
                    Hull::Interval { lo, hi } => vec![0.5 * (lo + hi)],
                    Hull::Ball { center, .. } => center.clone(),
                };
                (rep, w, h.diameter())
            })
            .collect()
    }

    fn ball_measure_node(&self, word: &Affine, weight: f64, center: &[f64], radius: f64) -> f64 {
        let h = self.hull.image(word);
        if !h.meets_ball(center, radius) {
            return 0.0;
        }
        if h.inside_ball(center, radius) {
            return weight;
        }
        if weight < WEIGHT_FLOOR {
            let rep = word.apply(&self.anchor);
            return if euclidean_distance(&rep, center) < radius { weight } else { 0.0 };
        }
        self.maps
            .iter()
            .zip(&self.weights)
            .map(|(m, p)| self.ball_measure_node(&word.compose(m), weight * p, center, radius))
            .sum()
    }

    fn integrate_node(
        &self,
        f: &dyn Fn(&[f64]) -> f64,
        word: &Affine,
        weight: f64,
        parent_estimate: f64,
        depth: usize,
        focus: Option<&[f64]>,
        tol: &ToleranceConfig,
        budget: &mut usize,
    ) -> Result<(f64, f64, bool)> {
        let mut children = Vec::with_capacity(self.maps.len());
        let mut refined = 0.0;
        for (m, p) in self.maps.iter().zip(&self.weights) {
            let child = word.compose(m);
            let w = weight * p;
            let v = w * f(&child.apply(&self.barycenter));
            if !v.is_finite() {
                return domain("integrand is not finite on the attractor");
            }
            refined += v;
            children.push((child, w, v));
        }
        let diff = (refined - parent_estimate).abs();
        let hull = self.hull.image(word);
        let near_focus = focus.is_some_and(|y| hull.diameter() > 1e-6 && hull.meets_ball(y, hull.diameter()));
        let accept = depth >= INTEGRATION_MIN_DEPTH && !near_focus && diff <= tol.abs_tol.max(tol.rel_tol * refined.abs()) * weight;
        if accept || weight < WEIGHT_FLOOR {
            return Ok((refined, diff, true));
        }
        if *budget == 0 {
            return Ok((refined, diff, false));
        }
        *budget -= 1;
        let (mut value, mut error, mut ok) = (0.0, 0.0, true);
        for (child, w, v) in children {
            let (cv, ce, cok) = self.integrate_node(f, &child, w, v, depth + 1, focus, tol, budget)?;
            value += cv;
            error += ce;
            ok &= cok;
        }
        Ok((value, error, ok))
    }
}

impl MeasureModel for IfsMeasure {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.spec.dimension
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
        let mut x = self.anchor.clone();
        for _ in 0..self.sample_depth {
            let mut u = rng.random::<f64>();
            let mut pick = self.maps.len() - 1;
            for (i, w) in self.weights.iter().enumerate() {
                if u < *w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            x = self.maps[pick].apply(&x);
        }
        out.copy_from_slice(&x);
        true
    }

    fn ball_measure(&self, center: &[f64], radius: f64) -> f64 {
        if radius <= 0.0 {
            return 0.0;
        }
        self.ball_measure_node(&Affine::identity(self.spec.dimension), 1.0, center, radius)
            .min(1.0)
    }

    fn integrate(
        &self,
        f: &dyn Fn(&[f64]) -> f64,
        focus: Option<&[f64]>,
        tol: &ToleranceConfig,
    ) -> Result<QuadResult> {
        let root = Affine::identity(self.spec.dimension);
        let estimate = f(&self.barycenter);
        let mut budget = tol.max_iter.saturating_mul(1000);
        let (value, error, converged) = self.integrate_node(f, &root, 1.0, estimate, 0, focus, tol, &mut budget)?;
        Ok(QuadResult {
            value,
            error,
            converged,
            subdivisions: tol.max_iter.saturating_mul(1000) - budget,
        })
    }

    /// Depth-`j` cylinders when `n = N^j` for `N` maps; cells carry their
    /// μ-mass, which is `n^{-1}` only for equal weights.
    fn quantize(&self, n: usize) -> Option<Quantization> {
        let maps = self.maps.len();
        let mut depth = 0;
        let mut size = 1;
        while size < n {
            size *= maps;
            depth += 1;
        }
        if size != n || n == 0 {
            return None;
        }
        let cells = self.cylinders(depth);
        Some(Quantization {
            cell_diameter: cells.iter().map(|c| c.2).fold(0.0, f64::max),
            probs: cells.iter().map(|c| c.1).collect(),
            points: cells.into_iter().map(|c| c.0).collect(),
        })
    }

    fn analytic_certificate(&self) -> Option<SubregularityCertificate> {
        self.certificate
    }
}

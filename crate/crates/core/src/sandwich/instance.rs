use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measures::{DistortionSpec, MeasureModel, Quantization};

use super::VALIDITY_FACTOR;

/// A finite source with distortion matrix `ρ(x_i, y_j)` (row-major `n × m`).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRdInstance {
    pub source_probs: Vec<f64>,
    pub distortion: Vec<f64>,
    n_repro: usize,
    pub source_points: Option<Vec<Vec<f64>>>,
    pub repro_points: Option<Vec<Vec<f64>>>,
    /// Largest diameter of a source cell, when the source is a quantization.
    pub cell_diameter: Option<f64>,
}

impl DiscreteRdInstance {
    pub fn new(source_probs: Vec<f64>, distortion: Vec<f64>, n_repro: usize) -> Result<Self> {
        let inst = Self {
            source_probs,
            distortion,
            n_repro,
            source_points: None,
            repro_points: None,
            cell_diameter: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        let n = self.source_probs.len();
        if n == 0 || self.n_repro == 0 {
            return bad("instance needs at least one source and one reproduction symbol".into());
        }
        if self.distortion.len() != n * self.n_repro {
            return bad(format!("distortion matrix has {} entries, expected {n} x {}", self.distortion.len(), self.n_repro));
        }
        if self.source_probs.iter().any(|p| !(*p >= 0.0)) {
            return bad("source probabilities must be nonnegative".into());
        }
        let total: f64 = self.source_probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("source probabilities sum to {total}, not 1"));
        }
        if self.distortion.iter().any(|d| !(*d >= 0.0)) {
            return bad("distortions must be nonnegative (or +inf)".into());
        }
        for i in 0..n {
            if !self.row(i).iter().any(|d| d.is_finite()) {
                return bad(format!("row {i} has no finite distortion"));
            }
        }
        Ok(())
    }

    pub fn n_source(&self) -> usize {
        self.source_probs.len()
    }

    pub fn n_repro(&self) -> usize {
        self.n_repro
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.distortion[i * self.n_repro..(i + 1) * self.n_repro]
    }

    /// Smallest `D` at which the discretized curve is trusted:
    /// `10 · (cell diameter)²`.
    pub fn validity_floor(&self) -> Option<f64> {
        self.cell_diameter.map(|d| VALIDITY_FACTOR * d * d)
    }
}

/// Binary source with `P(1) = p` and Hamming distortion.
pub fn binary_hamming(p: f64) -> Result<DiscreteRdInstance> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("probability {p} outside [0, 1]")));
    }
    DiscreteRdInstance::new(vec![1.0 - p, p], vec![0.0, 1.0, 1.0, 0.0], 2)
}

fn sampled(model: &dyn MeasureModel, n: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<f64>>> {
    if !model.has_sampler() {
        return None;
    }
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let mut x = vec![0.0; model.dim()];
        model.sample_into(rng, &mut x);
        points.push(x);
    }
    Some(points)
}

/// Discretize a finite measure into an `n_source × n_repro` instance.
///
/// Sources use the model's equal-mass quantization when it has one (equal
/// arcs on the circle, depth-`j` cylinders for an IFS with `n_source = N^j`);
/// otherwise `n_source` i.i.d. samples with probability `1/n_source` each,
/// which leaves the cell diameter and hence the validity window unknown.
/// Reproduction points follow the same rule with `n_repro`.
pub fn discretize_model(
    model: &dyn MeasureModel,
    dist: &DistortionSpec,
    n_source: usize,
    n_repro: usize,
    seed: u64,
) -> Result<DiscreteRdInstance> {
    if n_source == 0 || n_repro == 0 {
        return Err(Error::InvalidInput("discretization sizes must be positive".into()));
    }
    if !model.total_mass().is_finite() {
        return Err(Error::Unsupported(format!("model '{}' has infinite mass", model.name())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unsupported = || Error::Unsupported(format!("model '{}' has neither a quantizer nor a sampler", model.name()));
    let (source_points, source_probs, cell_diameter) = match model.quantize(n_source) {
        Some(Quantization {
            points,
            probs,
            cell_diameter,
        }) => (points, probs, Some(cell_diameter)),
        None => {
            let points = sampled(model, n_source, &mut rng).ok_or_else(unsupported)?;
            (points, vec![1.0 / n_source as f64; n_source], None)
        }
    };
    let repro = match model.quantize(n_repro) {
        Some(q) => q.points,
        None => sampled(model, n_repro, &mut rng).ok_or_else(unsupported)?,
    };
    let mut distortion = Vec::with_capacity(n_source * n_repro);
    for x in &source_points {
        for y in &repro {
            distortion.push(dist.distortion(x, y));
        }
    }
    // equal-mass cells can accumulate rounding in the sum
    let total: f64 = source_probs.iter().sum();
    let source_probs = source_probs.into_iter().map(|p| p / total).collect();
    let mut inst = DiscreteRdInstance::new(source_probs, distortion, n_repro)?;
    inst.source_points = Some(source_points);
    inst.repro_points = Some(repro);
    inst.cell_diameter = cell_diameter;
    Ok(inst)
}

/// Plain-text form: a line `n m`, a line of `n` probabilities, then `n`
/// rows of `m` distortions. Values round-trip exactly.
pub fn write_instance<W: Write>(inst: &DiscreteRdInstance, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", inst.n_source(), inst.n_repro())?;
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
    writeln!(out, "{}", join(&inst.source_probs))?;
    for i in 0..inst.n_source() {
        writeln!(out, "{}", join(inst.row(i)))?;
    }
    Ok(())
}

pub fn read_instance<R: BufRead>(input: R) -> Result<DiscreteRdInstance> {
    let parse_err = |msg: String| Error::InvalidInput(format!("instance file: {msg}"));
    let mut lines = input
        .lines()
        .map(|l| l.map_err(|e| parse_err(e.to_string())))
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty() || s.starts_with('#')));
    let mut next_numbers = |what: &str| -> Result<Vec<f64>> {
        let line = lines.next().ok_or_else(|| parse_err(format!("missing {what}")))??;
        line.split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("{what}: {e}"))))
            .collect()
    };
    let dims = next_numbers("dimensions")?;
    if dims.len() != 2 || dims.iter().any(|d| d.fract() != 0.0 || *d < 1.0) {
        return Err(parse_err("first line must be two positive integers".into()));
    }
    let (n, m) = (dims[0] as usize, dims[1] as usize);
    let probs = next_numbers("probabilities")?;
    if probs.len() != n {
        return Err(parse_err(format!("expected {n} probabilities, found {}", probs.len())));
    }
    let mut distortion = Vec::with_capacity(n * m);
    for i in 0..n {
        let row = next_numbers(&format!("row {i}"))?;
        if row.len() != m {
            return Err(parse_err(format!("row {i} has {} entries, expected {m}", row.len())));
        }
        distortion.extend(row);
    }
    DiscreteRdInstance::new(probs, distortion, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{IfsMeasure, LebesgueSpace, UniformCircle};

    #[test]
    fn validation() {
        assert!(DiscreteRdInstance::new(vec![0.5, 0.4], vec![0.0; 4], 2).is_err());
        assert!(DiscreteRdInstance::new(vec![1.0], vec![f64::INFINITY, f64::INFINITY], 2).is_err());
        assert!(DiscreteRdInstance::new(vec![1.0], vec![f64::INFINITY, 1.0], 2).is_ok());
        assert!(DiscreteRdInstance::new(vec![1.0], vec![-1.0], 1).is_err());
    }

    #[test]
    fn circle_and_cantor_discretizations() {
        let dist = DistortionSpec::euclidean(2.0).unwrap();
        let circle = discretize_model(&UniformCircle, &dist, 64, 32, 0).unwrap();
        assert_eq!((circle.n_source(), circle.n_repro()), (64, 32));
        assert!(circle.source_probs.iter().all(|p| (p - 1.0 / 64.0).abs() < 1e-15));
        let cantor = discretize_model(&IfsMeasure::cantor(), &dist, 64, 64, 0).unwrap();
        let pts = cantor.source_points.as_ref().unwrap();
        assert!((pts[0][0] - 0.5 / 729.0).abs() < 1e-15);
        assert!((cantor.validity_floor().unwrap() - 10.0 * 3f64.powi(-12)).abs() < 1e-18);
        let single = discretize_model(&UniformCircle, &dist, 1, 4, 0).unwrap();
        assert_eq!(single.source_probs, vec![1.0]);
    }

    #[test]
    fn sampled_fallback_and_unsupported() {
        let dist = DistortionSpec::euclidean(2.0).unwrap();
        let a = discretize_model(&IfsMeasure::cantor(), &dist, 50, 10, 3).unwrap();
        let b = discretize_model(&IfsMeasure::cantor(), &dist, 50, 10, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.cell_diameter.is_none());
        let line = LebesgueSpace::gaussian(1).unwrap();
        assert!(matches!(discretize_model(&line, &dist, 4, 4, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn text_round_trip() {
        let dist = DistortionSpec::euclidean(2.0).unwrap();
        let inst = discretize_model(&UniformCircle, &dist, 5, 3, 0).unwrap();
        let mut buf = Vec::new();
        write_instance(&inst, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("5 3\n"));
        let back = read_instance(text.as_bytes()).unwrap();
        assert_eq!(back.source_probs, inst.source_probs);
        assert_eq!(back.distortion, inst.distortion);
        assert!(read_instance("2 2\n1 0\n0 1\n".as_bytes()).is_err());
    }
}

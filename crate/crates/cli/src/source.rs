//! Turning a resolved model configuration into bound evaluators.

use std::fs;
use std::path::Path;

use rdbound::bounds::{
    circle_bound, circle_bound_at, circle_delta_grid, circle_slb, classical_slb, nu_numeric_refined, r_lower,
    r_slb_numeric, TheoremOneInput,
};
use rdbound::measures::{
    cantor_certificate, circle_subregularity, euclidean_unit_ball_volume, generalized_entropy_density, DistortionSpec,
    Hull, IfsMeasure, IfsSpec, LebesgueSpace, MeasureModel, SubregularityCertificate, UniformCircle,
};
use rdbound::numerics::{lin_space, ToleranceConfig};
use rdbound::{Error, Result};

use crate::config::{ModelConfig, ModelKind};
use crate::error::{usage, CliError, CliResult};

static CIRCLE: UniformCircle = UniformCircle;

/// Radii used to fit a covering certificate for a user IFS.
const COVERING_RADII: usize = 25;

pub enum Source {
    Circle { delta_hat: Option<f64> },
    Cantor(IfsMeasure),
    Gaussian(LebesgueSpace),
    Ifs { measure: IfsMeasure, certificate: SubregularityCertificate },
    Density { entropy: f64, mass: f64 },
}

pub struct Problem {
    pub source: Source,
    pub k: f64,
    pub dist: DistortionSpec,
}

impl Problem {
    pub fn build(cfg: &ModelConfig) -> CliResult<Self> {
        let source = match cfg.model {
            ModelKind::Circle => Source::Circle {
                delta_hat: cfg.delta_hat,
            },
            ModelKind::Cantor => Source::Cantor(IfsMeasure::cantor()),
            ModelKind::LebesgueGaussian => Source::Gaussian(LebesgueSpace::gaussian(cfg.dimension).map_err(CliError::setup)?),
            ModelKind::CustomIfs => {
                let Some(path) = &cfg.ifs else {
                    return usage("model custom_ifs needs --ifs <file>");
                };
                let spec = read_ifs(path)?;
                let measure = IfsMeasure::new(spec.clone()).map_err(CliError::setup)?;
                let certificate = covering_certificate(&spec, measure.hull())?;
                Source::Ifs { measure, certificate }
            }
            ModelKind::CustomDensity => {
                let Some(path) = &cfg.density else {
                    return usage("model custom_density needs --density <file>");
                };
                let (xs, fs) = read_density(path)?;
                let mass = xs.windows(2).zip(fs.windows(2)).map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1])).sum::<f64>();
                if !(mass > 0.0) {
                    return usage("density has zero mass");
                }
                let density = |x: f64| interpolate(&xs, &fs, x) / mass;
                let entropy = generalized_entropy_density(&density, xs[0], xs[xs.len() - 1], &ToleranceConfig::default())?;
                Source::Density { entropy, mass }
            }
        };
        Ok(Self {
            source,
            k: cfg.k,
            dist: DistortionSpec::euclidean(cfg.k).map_err(CliError::setup)?,
        })
    }

    /// The finite measure behind the source, when it can be sampled.
    pub fn measure(&self) -> Option<&dyn MeasureModel> {
        match &self.source {
            Source::Circle { .. } => Some(&CIRCLE),
            Source::Cantor(m) | Source::Ifs { measure: m, .. } => Some(m),
            Source::Gaussian(_) | Source::Density { .. } => None,
        }
    }

    /// The certificate driving `r_lower`; `None` for the circle when the
    /// bound is maximized over `δ̂`.
    pub fn certificate(&self) -> Result<Option<SubregularityCertificate>> {
        Ok(match &self.source {
            Source::Circle { delta_hat } => delta_hat.map(circle_subregularity).transpose()?,
            Source::Cantor(_) => Some(cantor_certificate()),
            Source::Gaussian(space) => Some(space.certificate()),
            Source::Ifs { certificate, .. } => Some(*certificate),
            Source::Density { entropy, .. } => Some(LebesgueSpace::new(1, *entropy)?.certificate()),
        })
    }

    pub fn entropy(&self) -> f64 {
        match &self.source {
            Source::Gaussian(space) => space.entropy(),
            Source::Density { entropy, .. } => *entropy,
            _ => 0.0,
        }
    }

    pub fn r_lower(&self, d: f64, tol: &ToleranceConfig) -> Result<f64> {
        if let Source::Circle { delta_hat } = self.source {
            if self.k == 2.0 {
                return match delta_hat {
                    Some(dh) => circle_bound_at(dh, d, tol),
                    None => circle_bound(d, &circle_delta_grid(), tol).map(|r| r.0),
                };
            }
            if delta_hat.is_none() {
                let mut best = f64::NEG_INFINITY;
                for dh in circle_delta_grid() {
                    let input = TheoremOneInput::new(0.0, circle_subregularity(dh)?, self.k)?;
                    best = best.max(r_lower(&input, d, tol)?);
                }
                return Ok(best);
            }
        }
        let cert = self.certificate()?.expect("every other source has a certificate");
        r_lower(&TheoremOneInput::new(self.entropy(), cert, self.k)?, d, tol)
    }

    /// Closed-form Shannon lower bound, for sources on `ℝ^d`.
    pub fn classical_slb(&self, d: f64) -> Option<Result<f64>> {
        let dim = match &self.source {
            Source::Gaussian(space) => space.dim(),
            Source::Density { .. } => 1,
            _ => return None,
        };
        Some(euclidean_unit_ball_volume(dim).and_then(|v| classical_slb(self.entropy(), dim, self.k, v, d)))
    }

    pub fn has_numeric_slb(&self) -> bool {
        match &self.source {
            Source::Gaussian(space) => space.dim() == 1,
            Source::Density { .. } => false,
            _ => true,
        }
    }

    /// `h − inf_s (sD + log ν(s))` with `ν` by quadrature against the
    /// reference measure, the supremum over reproduction points searched
    /// on a candidate grid and refined.
    pub fn numeric_slb(&self, d: f64, tol: &ToleranceConfig) -> Result<f64> {
        if matches!(self.source, Source::Circle { .. }) && self.k == 2.0 {
            return circle_slb(d, tol);
        }
        let (model, candidates, step): (&dyn MeasureModel, Vec<Vec<f64>>, f64) = match &self.source {
            Source::Circle { .. } => (&CIRCLE, (0..=25).map(|i| vec![0.05 * i as f64, 0.0]).collect(), 0.05),
            Source::Cantor(m) | Source::Ifs { measure: m, .. } => {
                let diameter = m.hull().diameter();
                (m, ifs_candidates(m), diameter / 40.0)
            }
            Source::Gaussian(space) if space.dim() == 1 => (space, vec![vec![0.0]], 0.0),
            _ => return Err(Error::Unsupported("no quadrature for this reference measure".into())),
        };
        let nu = |s: f64| nu_numeric_refined(model, &self.dist, s, &candidates, step, tol).map(|(v, _)| v);
        r_slb_numeric(self.entropy(), &nu, d, tol)
    }

    /// Axis-aligned box around the support, padded by `pad` times its size.
    pub fn bounding_box(&self, pad: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.source {
            Source::Circle { .. } => Some((vec![-1.0 - pad; 2], vec![1.0 + pad; 2])),
            Source::Cantor(m) | Source::Ifs { measure: m, .. } => Some(hull_box(m.hull(), pad)),
            _ => None,
        }
    }

    pub fn density_mass(&self) -> Option<f64> {
        match self.source {
            Source::Density { mass, .. } => Some(mass),
            _ => None,
        }
    }
}

pub fn hull_box(hull: &Hull, pad: f64) -> (Vec<f64>, Vec<f64>) {
    let margin = pad * hull.diameter();
    match hull {
        Hull::Interval { lo, hi } => (vec![lo - margin], vec![hi + margin]),
        Hull::Ball { center, radius } => (
            center.iter().map(|c| c - radius - margin).collect(),
            center.iter().map(|c| c + radius + margin).collect(),
        ),
    }
}

/// `per_axis^d` points on a regular lattice filling the box.
pub fn lattice(lo: &[f64], hi: &[f64], per_axis: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(hi)
        .map(|(&a, &b)| if per_axis == 1 { vec![0.5 * (a + b)] } else { lin_space(a, b, per_axis) })
        .collect();
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn ifs_candidates(m: &IfsMeasure) -> Vec<Vec<f64>> {
    let n = m.spec().maps.len().max(2);
    let depth = (64f64.ln() / (n as f64).ln()).floor().max(1.0) as usize;
    let mut out: Vec<Vec<f64>> = m.cylinders(depth).into_iter().map(|c| c.0).collect();
    let (lo, hi) = hull_box(m.hull(), 0.0);
    let per_axis = if lo.len() == 1 { 41 } else { 9 };
    out.extend(lattice(&lo, &hi, per_axis));
    out
}

fn covering_certificate(spec: &IfsSpec, hull: &Hull) -> CliResult<SubregularityCertificate> {
    let (lo, hi) = hull_box(hull, 0.1);
    let per_axis = match spec.dimension {
        1 => 1001,
        2 => 41,
        _ => 11,
    };
    let xs = lattice(&lo, &hi, per_axis);
    let deltas = rdbound::numerics::log_space(1e-3, 0.999, COVERING_RADII);
    let kappa_min = spec.ratios().into_iter().fold(1.0, f64::min);
    let depth = (1e-3f64.ln() / kappa_min.ln()).ceil() as usize + 2;
    Ok(spec.covering_certificate(&xs, &deltas, depth)?)
}

pub fn read_ifs(path: &Path) -> CliResult<IfsSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let spec: IfsSpec = toml::from_str(&text).map_err(|e| CliError::Usage(format!("IFS file {}: {e}", path.display())))?;
    spec.validate().map_err(CliError::setup)?;
    Ok(spec)
}

fn read_density(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let bad = |msg: String| CliError::Usage(format!("density file {}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let (mut xs, mut fs) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 2 {
            return Err(bad(format!("row {} needs two columns x,f", i + 1)));
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(x), Ok(f)) => {
                xs.push(x);
                fs.push(f);
            }
            // a header line
            _ if i == 0 => continue,
            _ => return Err(bad(format!("row {} is not numeric", i + 1))),
        }
    }
    if xs.len() < 2 {
        return Err(bad("needs at least two rows".into()));
    }
    if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("x values must be finite and strictly increasing".into()));
    }
    if fs.iter().any(|f| !(*f >= 0.0) || !f.is_finite()) {
        return Err(bad("density values must be finite and nonnegative".into()));
    }
    Ok((xs, fs))
}

fn interpolate(xs: &[f64], fs: &[f64], x: f64) -> f64 {
    if x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    fs[i - 1] + t * (fs[i] - fs[i - 1])
}

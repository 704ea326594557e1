use clap::Args;
use rdbound::measures::{jittered_centers, validate_certificate, Provenance, SubregularityCertificate, Witness};
use rdbound::numerics::log_space;
use serde::Serialize;

use crate::config::{Common, CommonArgs, FileConfig, Grid, ModelArgs, ModelConfig, ModelKind};
use crate::error::{usage, CliError, CliResult};
use crate::output::emit;
use crate::source::{lattice, Problem};

/// Monte-Carlo check of a subregularity certificate at the 3-sigma level.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CertifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Override the certificate constant c
    #[arg(long)]
    c: Option<f64>,
    /// Override the certificate exponent m
    #[arg(long)]
    m: Option<f64>,
    /// Monte-Carlo sample size
    #[arg(long)]
    samples: Option<usize>,
    /// Number of ball centers (half near the support, half on a lattice)
    #[arg(long)]
    centers: Option<usize>,
    /// Smallest radius checked
    #[arg(long)]
    rmin: Option<f64>,
    /// Largest radius checked (kept below delta0)
    #[arg(long)]
    rmax: Option<f64>,
    /// Number of radii, log-spaced
    #[arg(long)]
    rpoints: Option<usize>,
}

#[derive(Debug, Serialize)]
struct CertifyConfig {
    #[serde(flatten)]
    common: Common,
    #[serde(flatten)]
    model: ModelConfig,
    samples: usize,
    centers: usize,
    rmin: f64,
    rmax: f64,
    rpoints: usize,
}

#[derive(Debug, Serialize)]
struct Report {
    result: &'static str,
    worst_ratio: f64,
    checks: usize,
    certificate: SubregularityCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
}

pub fn run(args: CertifyArgs) -> CliResult<()> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let mut model = ModelConfig::resolve(&args.model, &file, ModelKind::Circle)?;
    if model.model == ModelKind::Circle && model.delta_hat.is_none() {
        model.delta_hat = Some(0.5);
    }
    let problem = Problem::build(&model)?;
    let Some(measure) = problem.measure() else {
        return Err(CliError::Compute(rdbound::Error::Unsupported(format!(
            "model {} has infinite mass or no sampler; nothing to certify by Monte Carlo",
            model.model.name()
        ))));
    };
    let mut cert = problem.certificate()?.expect("finite models carry a certificate");
    let c = args.c.or(file.c);
    let m = args.m.or(file.m);
    if c.is_some() || m.is_some() {
        cert = SubregularityCertificate::new(
            m.unwrap_or(cert.m),
            c.unwrap_or(cert.c),
            cert.delta0,
            cert.total_mass,
            Provenance::Fitted,
        )
        .map_err(CliError::setup)?;
    }
    let (lo, hi) = problem.bounding_box(0.1).expect("finite models have a bounded support");
    let scale = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
    let top = if cert.delta0.is_finite() { cert.delta0 * (1.0 - 1e-9) } else { scale };
    let cfg = CertifyConfig {
        common: Common::resolve(&args.common, &file),
        model,
        samples: args.samples.or(file.samples).unwrap_or(100_000),
        centers: args.centers.or(file.centers).unwrap_or(200),
        rmin: args.rmin.or(file.rmin).unwrap_or(1e-3 * top),
        rmax: args.rmax.or(file.rmax).unwrap_or(top),
        rpoints: args.rpoints.or(file.rpoints).unwrap_or(20),
    };
    if cfg.samples == 0 || cfg.centers < 2 {
        return usage("certify needs samples >= 1 and centers >= 2");
    }
    let radii = Grid::new("radius", cfg.rmin, cfg.rmax, cfg.rpoints, true)?;

    let near = cfg.centers / 2;
    let mut centers = jittered_centers(measure, near, 0.05 * scale, cfg.common.seed)?;
    let per_axis = ((cfg.centers - near) as f64).powf(1.0 / lo.len() as f64).ceil().max(1.0) as usize;
    centers.extend(lattice(&lo, &hi, per_axis));
    let radii = log_space(radii.min, radii.max, radii.points);
    let check = validate_certificate(
        measure,
        &problem.dist,
        &cert,
        &centers,
        &radii,
        cfg.samples,
        cfg.common.seed,
    )?;

    println!(
        "certificate: m={} c={} delta0={} total_mass={} provenance={:?}",
        cert.m, cert.c, cert.delta0, cert.total_mass, cert.provenance
    );
    println!("checked {} balls with {} samples (seed {})", check.checks, cfg.samples, cfg.common.seed);
    println!("worst ratio mu(B)/(c delta^m): {:.6}", check.worst_ratio);
    let result = if check.passed { "PASS" } else { "FAIL" };
    println!("result: {result}");
    if let Some(w) = &check.witness {
        println!(
            "witness: center={:?} delta={} estimate={} half_width={} bound={}",
            w.center, w.delta, w.estimate, w.half_width, w.bound
        );
    }
    let report = Report {
        result,
        worst_ratio: check.worst_ratio,
        checks: check.checks,
        certificate: cert,
        witness: check.witness.clone(),
    };
    if let Some(path) = &cfg.common.output {
        let body = toml::to_string(&report).map_err(|e| CliError::Io(e.to_string()))?;
        emit("certify", Some(path), &body, &cfg, &report)?;
    }
    if !check.passed {
        return Err(CliError::CertificateFailed(format!(
            "ball measure exceeds c delta^m beyond the 3-sigma band (worst ratio {:.6})",
            check.worst_ratio
        )));
    }
    Ok(())
}

use clap::Args;
use rdbound::bounds::{make_curve, write_csv, BoundCurve, BoundKind, CurveMetadata, CurvePoint};
use rdbound::measures::SubregularityCertificate;
use rdbound::numerics::{log_space, ToleranceConfig};
use rdbound::sandwich::{ba_trace, discretize_model};
use serde::Serialize;

use crate::config::{resolve_tol, Common, CommonArgs, FileConfig, Grid, ModelArgs, ModelConfig, ModelKind, TolArgs};
use crate::error::{CliError, CliResult};
use crate::output::emit;
use crate::source::Problem;

pub const BA_TOL: ToleranceConfig = ToleranceConfig {
    abs_tol: 1e-10,
    rel_tol: 1e-12,
    max_iter: 100_000,
};

/// Compute bound curves over a grid of distortions and write them as CSV.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CurveArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    tol: TolArgs,
    /// Smallest distortion
    #[arg(long)]
    dmin: Option<f64>,
    /// Largest distortion
    #[arg(long)]
    dmax: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    points: Option<usize>,
    /// Logarithmic (true) or linear (false) grid spacing
    #[arg(long)]
    log_spaced: Option<bool>,
    /// Include the numerically evaluated Shannon lower bound where available
    #[arg(long)]
    slb: Option<bool>,
    /// Include a Blahut-Arimoto reference from an equal-mass discretization
    #[arg(long)]
    ba: Option<bool>,
    /// Cells of the discretization used by the reference
    #[arg(long)]
    cells: Option<usize>,
}

#[derive(Debug, Serialize)]
struct CurveConfig {
    #[serde(flatten)]
    common: Common,
    #[serde(flatten)]
    model: ModelConfig,
    #[serde(flatten)]
    tol: ToleranceConfig,
    dmin: f64,
    dmax: f64,
    points: usize,
    log_spaced: bool,
    slb: bool,
    ba: bool,
    cells: usize,
}

#[derive(Debug, Serialize)]
struct CurveSummary {
    rows: usize,
    kinds: Vec<String>,
    gaps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<SubregularityCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density_mass: Option<f64>,
}

pub fn run(args: CurveArgs) -> CliResult<()> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let cfg = CurveConfig {
        common: Common::resolve(&args.common, &file),
        model: ModelConfig::resolve(&args.model, &file, ModelKind::Circle)?,
        tol: resolve_tol(&args.tol, &file, ToleranceConfig::default())?,
        dmin: args.dmin.or(file.dmin).unwrap_or(1e-4),
        dmax: args.dmax.or(file.dmax).unwrap_or(0.1),
        points: args.points.or(file.points).unwrap_or(50),
        log_spaced: args.log_spaced.or(file.log_spaced).unwrap_or(true),
        slb: args.slb.or(file.slb).unwrap_or(true),
        ba: args.ba.or(file.ba).unwrap_or(false),
        cells: args.cells.or(file.cells).unwrap_or(64),
    };
    let grid = Grid::new("D", cfg.dmin, cfg.dmax, cfg.points, cfg.log_spaced)?;
    let problem = Problem::build(&cfg.model)?;
    let tol = cfg.tol;
    let certificate = problem.certificate()?;
    let metadata = CurveMetadata {
        label: cfg.model.model.name().to_string(),
        certificate,
        tolerances: Some(tol),
    };
    let ds = grid.values();

    let mut curves = vec![make_curve(BoundKind::RLower, &ds, metadata.clone(), |d| problem.r_lower(d, &tol))?];
    if problem.classical_slb(1.0).is_some() {
        curves.push(make_curve(BoundKind::ClassicalSlb, &ds, metadata.clone(), |d| {
            problem.classical_slb(d).expect("checked above")
        })?);
    }
    if cfg.slb && problem.has_numeric_slb() {
        curves.push(make_curve(BoundKind::NumericSlb, &ds, metadata.clone(), |d| problem.numeric_slb(d, &tol))?);
    }
    if cfg.ba {
        curves.push(ba_reference(&problem, &cfg, &grid, metadata)?);
    }

    let mut body = Vec::new();
    write_csv(&curves, &mut body)?;
    let gaps: usize = curves.iter().map(BoundCurve::gaps).sum();
    for curve in &curves {
        for p in curve.points.iter().filter(|p| p.rate.is_none()) {
            eprintln!(
                "warning: kind=gap curve={} D={:e} message={}",
                curve.kind,
                p.distortion,
                p.error.as_deref().unwrap_or("")
            );
        }
    }
    let summary = CurveSummary {
        rows: curves.iter().map(|c| c.points.len()).sum(),
        kinds: curves.iter().map(|c| c.kind.to_string()).collect(),
        gaps,
        certificate,
        density_mass: problem.density_mass(),
    };
    let body = String::from_utf8(body).expect("CSV is ASCII");
    emit("curve", cfg.common.output.as_deref(), &body, &cfg, &summary)?;
    if let Some(path) = &cfg.common.output {
        println!("wrote {} rows ({}) to {}", summary.rows, summary.kinds.join(", "), path.display());
    }
    Ok(())
}

/// Achievable points of the discretized source whose distortion falls in
/// the grid range and the validity window, sorted by distortion.
fn ba_reference(problem: &Problem, cfg: &CurveConfig, grid: &Grid, metadata: CurveMetadata) -> CliResult<BoundCurve> {
    let model = problem
        .measure()
        .ok_or_else(|| CliError::Compute(rdbound::Error::Unsupported("this model has no discretization".into())))?;
    let inst = discretize_model(model, &problem.dist, cfg.cells, cfg.cells, cfg.common.seed)?;
    let floor = inst.validity_floor().unwrap_or(0.0).max(grid.min);
    let slopes = log_space(0.1 / grid.max, 1.0 / grid.min, grid.points);
    let mut points: Vec<CurvePoint> = ba_trace(&inst, &slopes, &BA_TOL)?
        .into_iter()
        .filter(|p| p.distortion >= floor && p.distortion <= grid.max)
        .map(|p| CurvePoint {
            distortion: p.distortion,
            rate: Some(p.rate),
            error: None,
        })
        .collect();
    points.sort_by(|a, b| a.distortion.total_cmp(&b.distortion));
    points.dedup_by(|b, a| b.distortion <= a.distortion);
    Ok(BoundCurve {
        kind: BoundKind::BaReference,
        points,
        metadata,
    })
}

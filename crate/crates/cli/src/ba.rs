use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use clap::Args;
use rdbound::numerics::ToleranceConfig;
use rdbound::sandwich::{ba_trace, discretize_model, read_instance, write_instance, DiscreteRdInstance};
use serde::Serialize;

use crate::config::{resolve_tol, Common, CommonArgs, FileConfig, Grid, ModelArgs, ModelConfig, ModelKind, TolArgs};
use crate::curve::BA_TOL;
use crate::error::{usage, CliError, CliResult};
use crate::output::{emit, sci};
use crate::source::Problem;

/// Blahut-Arimoto trace of a discretized model or a plain-text instance.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BaArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    tol: TolArgs,
    /// Read the instance from a text file instead of discretizing a model
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Also save the discretized instance in the text format
    #[arg(long)]
    write_instance: Option<PathBuf>,
    /// Source cells
    #[arg(long)]
    cells: Option<usize>,
    /// Reproduction points (defaults to the number of cells)
    #[arg(long)]
    repro: Option<usize>,
    /// Smallest slope
    #[arg(long)]
    smin: Option<f64>,
    /// Largest slope
    #[arg(long)]
    smax: Option<f64>,
    /// Number of slopes, log-spaced
    #[arg(long)]
    spoints: Option<usize>,
}

#[derive(Debug, Serialize)]
struct BaConfig {
    #[serde(flatten)]
    common: Common,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelConfig>,
    #[serde(flatten)]
    tol: ToleranceConfig,
    cells: usize,
    repro: usize,
    smin: f64,
    smax: f64,
    spoints: usize,
}

#[derive(Debug, Serialize)]
struct BaSummary {
    rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    validity_floor: Option<f64>,
    /// Smallest `R_BA − R_L` inside the validity window.
    #[serde(skip_serializing_if = "Option::is_none")]
    min_margin: Option<f64>,
}

pub const CSV_HEADER: &str = "slope,D,R_nats,R_bits,gap,iterations,lower_nats,in_window";

pub fn run(args: BaArgs) -> CliResult<()> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let instance_path = args.instance.clone().or_else(|| file.instance.clone());
    let cells = args.cells.or(file.cells).unwrap_or(64);
    let cfg = BaConfig {
        common: Common::resolve(&args.common, &file),
        model: match instance_path {
            Some(_) => None,
            None => Some(ModelConfig::resolve(&args.model, &file, ModelKind::Circle)?),
        },
        instance: instance_path,
        tol: resolve_tol(&args.tol, &file, BA_TOL)?,
        cells,
        repro: args.repro.or(file.repro).unwrap_or(cells),
        smin: args.smin.or(file.smin).unwrap_or(0.5),
        smax: args.smax.or(file.smax).unwrap_or(1000.0),
        spoints: args.spoints.or(file.spoints).unwrap_or(30),
    };
    if cfg.cells == 0 || cfg.repro == 0 {
        return usage("cells and repro must be positive");
    }
    let slopes = Grid::new("slope", cfg.smin, cfg.smax, cfg.spoints, true)?.values();

    let (inst, problem): (DiscreteRdInstance, Option<Problem>) = match (&cfg.instance, &cfg.model) {
        (Some(path), _) => {
            let f = File::open(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            (read_instance(BufReader::new(f)).map_err(CliError::setup)?, None)
        }
        (None, Some(model)) => {
            let problem = Problem::build(model)?;
            let measure = problem.measure().ok_or_else(|| {
                CliError::Compute(rdbound::Error::Unsupported(format!(
                    "model {} has no finite discretization",
                    model.model.name()
                )))
            })?;
            let inst = discretize_model(measure, &problem.dist, cfg.cells, cfg.repro, cfg.common.seed)?;
            (inst, Some(problem))
        }
        (None, None) => unreachable!("either an instance or a model is resolved"),
    };
    if let Some(path) = args.write_instance.as_ref().or(file.write_instance.as_ref()) {
        let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        write_instance(&inst, BufWriter::new(f))?;
    }

    let floor = inst.validity_floor();
    let mut body = format!("{CSV_HEADER}\n");
    let mut min_margin: Option<f64> = None;
    let points = ba_trace(&inst, &slopes, &cfg.tol)?;
    for p in &points {
        let in_window = floor.map(|f| p.distortion >= f);
        let lower = match &problem {
            Some(pr) => Some(pr.r_lower(p.distortion, &ToleranceConfig::default())?),
            None => None,
        };
        if let (Some(true), Some(l)) = (in_window, lower) {
            let margin = p.rate - l;
            min_margin = Some(min_margin.map_or(margin, |m: f64| m.min(margin)));
        }
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            sci(p.slope),
            sci(p.distortion),
            sci(p.rate),
            sci(p.rate / std::f64::consts::LN_2),
            sci(p.gap),
            p.iterations,
            lower.map(sci).unwrap_or_default(),
            in_window.map(|w| w.to_string()).unwrap_or_default(),
        ));
    }
    let summary = BaSummary {
        rows: points.len(),
        validity_floor: floor,
        min_margin,
    };
    emit("ba", cfg.common.output.as_deref(), &body, &cfg, &summary)?;
    if let Some(path) = &cfg.common.output {
        println!("wrote {} points to {}", points.len(), path.display());
        if let Some(m) = min_margin {
            println!("smallest R_BA - R_L inside the validity window: {m:.6}");
        }
    }
    Ok(())
}

use clap::Args;
use rdbound::measures::{j_delta_max, IfsSpec, JDeltaMax};
use rdbound::numerics::log_space;
use serde::Serialize;

use crate::config::{Common, CommonArgs, FileConfig, ModelKind};
use crate::error::{usage, CliError, CliResult};
use crate::output::emit;
use crate::source::{hull_box, lattice, read_ifs};

/// Exhaustive maximum of |J_delta(x)| over a grid of centers and radii.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct JdeltaArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// `cantor` or `custom_ifs`
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    /// IFS description for `custom_ifs`
    #[arg(long)]
    ifs: Option<std::path::PathBuf>,
    /// Longest word explored
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    xmin: Option<f64>,
    #[arg(long)]
    xmax: Option<f64>,
    /// Centers per axis
    #[arg(long)]
    xpoints: Option<usize>,
    /// Smallest radius; with `rmax` and `rpoints` replaces the default radii 1.5 kappa^j
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    rpoints: Option<usize>,
}

#[derive(Debug, Serialize)]
struct JdeltaConfig {
    #[serde(flatten)]
    common: Common,
    model: ModelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    ifs: Option<std::path::PathBuf>,
    depth: usize,
    xpoints: usize,
    radii: Vec<f64>,
}

pub fn run(args: JdeltaArgs) -> CliResult<()> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let model = args.model.or(file.model).unwrap_or(ModelKind::Cantor);
    let ifs_path = args.ifs.clone().or_else(|| file.ifs.clone());
    let spec = match model {
        ModelKind::Cantor => IfsSpec::cantor(),
        ModelKind::CustomIfs => match &ifs_path {
            Some(path) => read_ifs(path)?,
            None => return usage("model custom_ifs needs --ifs <file>"),
        },
        other => return usage(format!("jdelta needs an IFS model, got {}", other.name())),
    };
    let depth = args.depth.or(file.depth).unwrap_or(12);
    let xpoints = args.xpoints.or(file.xpoints).unwrap_or(1000);
    if depth == 0 {
        return usage("depth must be at least 1");
    }
    if xpoints == 0 {
        return usage("the center grid is empty");
    }
    let (mut lo, mut hi) = hull_box(&spec.hull(), 0.1);
    if let Some(x) = args.xmin.or(file.xmin) {
        lo.iter_mut().for_each(|v| *v = x);
    }
    if let Some(x) = args.xmax.or(file.xmax) {
        hi.iter_mut().for_each(|v| *v = x);
    }
    if lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
        return usage("center range needs xmin <= xmax");
    }
    let kappa_min = spec.ratios().into_iter().fold(1.0, f64::min);
    let (rmin, rmax, rpoints) = (
        args.rmin.or(file.rmin),
        args.rmax.or(file.rmax),
        args.rpoints.or(file.rpoints),
    );
    let radii = if rmin.is_some() || rmax.is_some() || rpoints.is_some() {
        let rpoints = rpoints.unwrap_or(20);
        if rpoints == 0 {
            return usage("the radius grid is empty");
        }
        let rmin = rmin.unwrap_or(kappa_min.powi(depth as i32 - 1));
        let rmax = rmax.unwrap_or(0.5);
        if !(rmin > 0.0 && rmin <= rmax && rmax < 1.0) {
            return usage(format!("radii need 0 < rmin <= rmax < 1, got [{rmin}, {rmax}]"));
        }
        if rpoints == 1 {
            vec![rmin]
        } else {
            log_space(rmin, rmax, rpoints)
        }
    } else {
        (1..depth as i32).map(|j| 1.5 * kappa_min.powi(j)).filter(|d| *d < 1.0).collect()
    };
    if radii.is_empty() {
        return usage("the radius grid is empty");
    }
    let xs = lattice(&lo, &hi, xpoints);
    let cfg = JdeltaConfig {
        common: Common::resolve(&args.common, &file),
        model,
        ifs: ifs_path,
        depth,
        xpoints,
        radii,
    };
    let worst: JDeltaMax = j_delta_max(&spec, &xs, &cfg.radii, depth)?;
    println!(
        "max |J_delta| = {} at x={:?}, delta={} ({} evaluations)",
        worst.max, worst.x, worst.delta, worst.evaluations
    );
    if let Some(path) = &cfg.common.output {
        let body = toml::to_string(&worst).map_err(|e| CliError::Io(e.to_string()))?;
        emit("jdelta", Some(path), &body, &cfg, &worst)?;
    }
    Ok(())
}

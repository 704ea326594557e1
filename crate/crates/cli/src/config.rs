//! Flags, the flat TOML config file and their resolution.
//!
//! Every flag has a config key of the same name with dashes replaced by
//! underscores. A value given on the command line wins over the file, which
//! wins over the built-in default. Relative paths in the file are taken
//! relative to the file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rdbound::numerics::{lin_space, log_space, ToleranceConfig};
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelKind {
    /// Uniform distribution on the unit circle in the plane
    Circle,
    /// Natural measure on the middle-third Cantor set
    Cantor,
    /// Standard normal source on R^d with Lebesgue reference
    LebesgueGaussian,
    /// Self-similar measure of an IFS read from `--ifs`
    CustomIfs,
    /// Piecewise-linear density on R read from `--density`
    CustomDensity,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Circle => "circle",
            ModelKind::Cantor => "cantor",
            ModelKind::LebesgueGaussian => "lebesgue_gaussian",
            ModelKind::CustomIfs => "custom_ifs",
            ModelKind::CustomDensity => "custom_density",
        }
    }
}

/// Every key the config file may set.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub model: Option<ModelKind>,
    pub k: Option<f64>,
    pub delta_hat: Option<f64>,
    pub dimension: Option<usize>,
    pub ifs: Option<PathBuf>,
    pub density: Option<PathBuf>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub dmin: Option<f64>,
    pub dmax: Option<f64>,
    pub points: Option<usize>,
    pub log_spaced: Option<bool>,
    pub slb: Option<bool>,
    pub ba: Option<bool>,
    pub cells: Option<usize>,
    pub repro: Option<usize>,
    pub c: Option<f64>,
    pub m: Option<f64>,
    pub samples: Option<usize>,
    pub centers: Option<usize>,
    pub rmin: Option<f64>,
    pub rmax: Option<f64>,
    pub rpoints: Option<usize>,
    pub depth: Option<usize>,
    pub xmin: Option<f64>,
    pub xmax: Option<f64>,
    pub xpoints: Option<usize>,
    pub smin: Option<f64>,
    pub smax: Option<f64>,
    pub spoints: Option<usize>,
    pub instance: Option<PathBuf>,
    pub write_instance: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: Self =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.output,
            &mut cfg.ifs,
            &mut cfg.density,
            &mut cfg.instance,
            &mut cfg.write_instance,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat TOML file supplying defaults for any flag
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for every random draw
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; a `<output>.meta.toml` sidecar is written next to it
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Distortion exponent: rho(x, y) = |x - y|^k
    #[arg(long)]
    pub k: Option<f64>,
    /// Circle certificate radius; the bound is maximized over it when unset
    #[arg(long)]
    pub delta_hat: Option<f64>,
    /// Dimension of the Gaussian source
    #[arg(long)]
    pub dimension: Option<usize>,
    /// IFS description (TOML: `dimension` and `[[maps]]` with `ratio`, `offset`, optional `rotation`)
    #[arg(long)]
    pub ifs: Option<PathBuf>,
    /// Density samples as CSV rows `x,f`, interpolated linearly
    #[arg(long)]
    pub density: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Common {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Common {
    pub fn resolve(args: &CommonArgs, file: &FileConfig) -> Self {
        Self {
            seed: args.seed.or(file.seed).unwrap_or(0),
            output: args.output.clone().or_else(|| file.output.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelConfig {
    pub model: ModelKind,
    pub k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_hat: Option<f64>,
    pub dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ifs: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<PathBuf>,
}

impl ModelConfig {
    pub fn resolve(args: &ModelArgs, file: &FileConfig, default_model: ModelKind) -> CliResult<Self> {
        let cfg = Self {
            model: args.model.or(file.model).unwrap_or(default_model),
            k: args.k.or(file.k).unwrap_or(2.0),
            delta_hat: args.delta_hat.or(file.delta_hat),
            dimension: args.dimension.or(file.dimension).unwrap_or(1),
            ifs: args.ifs.clone().or_else(|| file.ifs.clone()),
            density: args.density.clone().or_else(|| file.density.clone()),
        };
        if !(cfg.k > 0.0 && cfg.k.is_finite()) {
            return usage(format!("k must be positive and finite, got {}", cfg.k));
        }
        if let Some(dh) = cfg.delta_hat {
            if !(dh > 0.0 && dh <= 1.0) {
                return usage(format!("delta_hat must lie in (0, 1], got {dh}"));
            }
        }
        if cfg.dimension == 0 {
            return usage("dimension must be at least 1");
        }
        Ok(cfg)
    }
}

pub fn resolve_tol(args: &TolArgs, file: &FileConfig, default: ToleranceConfig) -> CliResult<ToleranceConfig> {
    ToleranceConfig::new(
        args.abs_tol.or(file.abs_tol).unwrap_or(default.abs_tol),
        args.rel_tol.or(file.rel_tol).unwrap_or(default.rel_tol),
        args.max_iter.or(file.max_iter).unwrap_or(default.max_iter),
    )
    .map_err(CliError::setup)
}

/// A positive grid `[min, max]` with `points ≥ 2`, log- or linearly spaced.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log_spaced: bool,
}

impl Grid {
    pub fn new(what: &str, min: f64, max: f64, points: usize, log_spaced: bool) -> CliResult<Self> {
        if !(min > 0.0 && min.is_finite() && max.is_finite()) {
            return usage(format!("{what} range needs 0 < min and finite bounds, got [{min}, {max}]"));
        }
        if !(max > min) {
            return usage(format!("{what} range needs min < max, got [{min}, {max}]"));
        }
        if points < 2 {
            return usage(format!("{what} grid needs at least 2 points, got {points}"));
        }
        Ok(Self {
            min,
            max,
            points,
            log_spaced,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.log_spaced {
            log_space(self.min, self.max, self.points)
        } else {
            lin_space(self.min, self.max, self.points)
        }
    }
}

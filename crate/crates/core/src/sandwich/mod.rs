//! Blahut–Arimoto rate-distortion curves for discretized sources.
//!
//! A discrete instance has its own `R(D)`, which only approximates the
//! continuous one once `D` is large compared with the squared diameter of
//! the quantization cells. Within that window the achievable points found
//! here should never fall below a valid lower bound, which makes them a
//! cheap independent consistency check.

mod ba;
mod instance;

pub use ba::{blahut_arimoto, ba_trace, BaPoint};
pub use instance::{binary_hamming, discretize_model, read_instance, write_instance, DiscreteRdInstance};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ToleranceConfig;

/// Factor in the validity window `D ≥ 10 · (cell diameter)²`.
pub const VALIDITY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichPoint {
    pub slope: f64,
    pub distortion: f64,
    pub upper: f64,
    pub lower: f64,
}

impl SandwichPoint {
    pub fn holds(&self, slack: f64) -> bool {
        self.upper >= self.lower - slack
    }
}

/// Trace the instance at each slope and pair every achievable point with
/// `lower(D)` at the same distortion. Points outside the validity window
/// are dropped; at least one must remain.
pub fn sandwich(
    inst: &DiscreteRdInstance,
    slopes: &[f64],
    lower: &(dyn Fn(f64) -> Result<f64> + Sync),
    tol: &ToleranceConfig,
) -> Result<Vec<SandwichPoint>> {
    let floor = inst.validity_floor().ok_or_else(|| {
        Error::InvalidInput("instance has no cell diameter, so the validity window is unknown".into())
    })?;
    let mut out = Vec::new();
    for p in ba_trace(inst, slopes, tol)? {
        if p.distortion < floor {
            continue;
        }
        out.push(SandwichPoint {
            slope: p.slope,
            distortion: p.distortion,
            upper: p.rate,
            lower: lower(p.distortion)?,
        });
    }
    if out.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no traced point lies in the validity window D >= {floor:e}"
        )));
    }
    Ok(out)
}

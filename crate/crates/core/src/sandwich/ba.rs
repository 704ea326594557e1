use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::ToleranceConfig;

use super::DiscreteRdInstance;

/// One point of the parametric trace.
///
/// `(distortion, rate)` is achieved by the final test channel, so `rate`
/// is an upper bound on the instance's `R(distortion)`. `gap` is the width
/// of the Blahut bracket around the optimum at this slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaPoint {
    pub slope: f64,
    pub distortion: f64,
    pub rate: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Blahut–Arimoto iteration at slope `s > 0` (weights `e^{−sρ}`).
///
/// Stops once the duality gap is at most `tol.abs_tol` and the change in
/// rate is at most `tol.rel_tol` relative (or `tol.abs_tol` absolute).
/// Exhausting `tol.max_iter` is a [`Error::NotConverged`] carrying the
/// last gap.
pub fn blahut_arimoto(inst: &DiscreteRdInstance, slope: f64, tol: &ToleranceConfig) -> Result<BaPoint> {
    tol.validate()?;
    if !(slope > 0.0) || !slope.is_finite() {
        return domain(format!("slope must be positive and finite, got {slope}"));
    }
    let (n, m) = (inst.n_source(), inst.n_repro());
    let p = &inst.source_probs;
    // row-shifted weights: e^{−s(ρ_ij − min_j ρ_ij)} keeps every row nonzero
    let mut w = vec![0.0; n * m];
    for i in 0..n {
        let row = inst.row(i);
        let min = row.iter().cloned().fold(f64::INFINITY, f64::min);
        for j in 0..m {
            w[i * m + j] = (-slope * (row[j] - min)).exp();
        }
    }
    let mut q = vec![1.0 / m as f64; m];
    let mut c_row = vec![0.0; n];
    let mut c_col = vec![0.0; m];
    let mut prev_rate = f64::NAN;
    let mut last = (0.0, 0.0, f64::INFINITY);
    for iteration in 1..=tol.max_iter {
        for i in 0..n {
            c_row[i] = (0..m).map(|j| q[j] * w[i * m + j]).sum();
        }
        for j in 0..m {
            c_col[j] = (0..n).map(|i| p[i] * w[i * m + j] / c_row[i]).sum();
        }
        // the test channel Q(j|i) = q_j w_ij / c_i at the current q
        let mut distortion = 0.0;
        let mut out = vec![0.0; m];
        for i in 0..n {
            let row = inst.row(i);
            for j in 0..m {
                let t = q[j] * w[i * m + j] / c_row[i];
                distortion += p[i] * t * row[j];
                out[j] += p[i] * t;
            }
        }
        let mut rate = 0.0;
        for i in 0..n {
            for j in 0..m {
                let t = q[j] * w[i * m + j] / c_row[i];
                // guard on the joint mass: p_i t can underflow while t > 0
                let joint = p[i] * t;
                if joint > 0.0 {
                    rate += joint * (t / out[j]).ln();
                }
            }
        }
        let mean_log = (0..m).filter(|&j| q[j] > 0.0).map(|j| q[j] * c_col[j] * c_col[j].ln()).sum::<f64>();
        let max_log = c_col.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ln();
        let gap = (max_log - mean_log).max(0.0);
        let change = (rate - prev_rate).abs();
        last = (distortion, rate.max(0.0), gap);
        if gap <= tol.abs_tol && change <= (tol.rel_tol * rate.abs()).max(tol.abs_tol) {
            return Ok(BaPoint {
                slope,
                distortion,
                rate: rate.max(0.0),
                gap,
                iterations: iteration,
                converged: true,
            });
        }
        prev_rate = rate;
        for j in 0..m {
            q[j] *= c_col[j];
        }
    }
    Err(Error::NotConverged {
        iterations: tol.max_iter,
        best: last.1,
        error: last.2,
    })
}

/// [`blahut_arimoto`] at several slopes, evaluated in parallel and returned
/// in the order given.
pub fn ba_trace(inst: &DiscreteRdInstance, slopes: &[f64], tol: &ToleranceConfig) -> Result<Vec<BaPoint>> {
    slopes.par_iter().map(|&s| blahut_arimoto(inst, s, tol)).collect()
}

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::SubregularityCertificate;
use crate::numerics::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    ClassicalSlb,
    NumericSlb,
    RLower,
    BaReference,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::ClassicalSlb => "classical_slb",
            BoundKind::NumericSlb => "numeric_slb",
            BoundKind::RLower => "r_lower",
            BoundKind::BaReference => "ba_reference",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One grid point. `rate` is the raw value in nats; a failed evaluation
/// leaves it empty and records why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub distortion: f64,
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CurvePoint {
    /// `max(0, R)`
    pub fn clamped(&self) -> Option<f64> {
        self.rate.map(|r| r.max(0.0))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SubregularityCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub points: Vec<CurvePoint>,
    pub metadata: CurveMetadata,
}

impl BoundCurve {
    pub fn gaps(&self) -> usize {
        self.points.iter().filter(|p| p.rate.is_none()).count()
    }

    /// Clamped rates never increase with `D` (gaps are skipped).
    pub fn is_monotone(&self, slack: f64) -> bool {
        let rates: Vec<f64> = self.points.iter().filter_map(CurvePoint::clamped).collect();
        rates.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_csv(std::slice::from_ref(self), out)
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Evaluate `eval` at every grid point, in parallel, preserving order.
///
/// The grid must be non-empty, positive and strictly increasing. Points
/// where `eval` fails become gaps carrying the error message.
pub fn make_curve<F>(kind: BoundKind, grid: &[f64], metadata: CurveMetadata, eval: F) -> Result<BoundCurve>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if grid.is_empty() {
        return Err(Error::InvalidInput("distortion grid is empty".into()));
    }
    if grid.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidInput("distortion grid must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("distortion grid must be strictly increasing".into()));
    }
    let points = grid
        .par_iter()
        .map(|&d| match eval(d) {
            Ok(r) if r.is_finite() => CurvePoint {
                distortion: d,
                rate: Some(r),
                error: None,
            },
            Ok(r) => CurvePoint {
                distortion: d,
                rate: None,
                error: Some(format!("non-finite rate {r}")),
            },
            Err(e) => CurvePoint {
                distortion: d,
                rate: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(BoundCurve { kind, points, metadata })
}

pub const CSV_HEADER: &str = "D,R_nats,R_bits,kind";

/// Long-format CSV of clamped rates, one row per (curve, point). Gaps keep
/// their row with empty rate fields.
pub fn write_csv<W: Write>(curves: &[BoundCurve], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for curve in curves {
        for p in &curve.points {
            match p.clamped() {
                Some(r) => writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{}",
                    p.distortion,
                    r,
                    r / std::f64::consts::LN_2,
                    curve.kind
                )?,
                None => writeln!(out, "{:.16e},,,{}", p.distortion, curve.kind)?,
            }
        }
    }
    Ok(())
}

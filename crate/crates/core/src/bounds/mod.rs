//! Rate-distortion lower bounds.
//!
//! * [`classical_slb`]: the Shannon lower bound for sources on `ℝ^d` with a
//!   seminorm-power distortion.
//! * [`r_slb_numeric`]: the generalized Shannon lower bound
//!   `h − inf_s (sD + log ν(s))` for an arbitrary reference measure, with
//!   `ν` evaluated by [`nu_numeric`].
//! * [`r_lower`]: the explicit bound driven by a subregularity certificate.
//!
//! All rates are in nats and unclamped; negative values are legitimate
//! outputs of the formulas for large `D`. Clamping at zero happens only when
//! curves are reported.

mod curve;
mod examples;
mod explicit;
mod slb;

pub use curve::{make_curve, write_csv, BoundCurve, BoundKind, CurveMetadata, CurvePoint, CSV_HEADER};
pub use examples::{cantor_bound, cantor_sigma, circle_bound, circle_bound_at, circle_delta_grid, circle_slb};
pub use explicit::{minimize_q, p_of_s, p_prime, q_of_s, r_lower, r_lower_clamped, solve_s0, Branch, TheoremOneInput};
pub use slb::{classical_slb, nu_integral, nu_numeric, nu_numeric_refined, r_slb_numeric, S_BRACKET_LO};

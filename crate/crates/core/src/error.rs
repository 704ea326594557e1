use thiserror::Error;

/// Errors produced by the numerical and bound-evaluation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("bracket endpoints have the same sign: g({lo}) = {g_lo}, g({hi}) = {g_hi}")]
    BracketSign { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("bracket expansion failed: {0}")]
    BracketExpansion(String),

    #[error("no convergence after {iterations} iterations (best estimate {best}, error {error})")]
    NotConverged {
        iterations: usize,
        best: f64,
        error: f64,
    },

    #[error("D = {d} is outside the attainable range ({lo}, {hi}) of the implicit equation")]
    OutOfRange { d: f64, lo: f64, hi: f64 },

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("word depth exhausted: need words longer than {max_depth} to reach radius {delta}")]
    DepthExhausted { max_depth: usize, delta: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Overflow(_) => "overflow",
            Error::BracketSign { .. } => "bracket_sign",
            Error::BracketExpansion(_) => "bracket_expansion",
            Error::NotConverged { .. } => "not_converged",
            Error::OutOfRange { .. } => "out_of_range",
            Error::InvalidCertificate(_) => "invalid_certificate",
            Error::DepthExhausted { .. } => "depth_exhausted",
            Error::Unsupported(_) => "unsupported",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

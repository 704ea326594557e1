use std::fmt;

/// Failure of a CLI run, mapped onto the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config values or input files. Exit status 2.
    Usage(String),
    /// A library routine failed. Exit status 1.
    Compute(rdbound::Error),
    /// Monte-Carlo validation found a violated ball. Exit status 1.
    CertificateFailed(String),
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Compute(e) => e.kind(),
            CliError::CertificateFailed(_) => "certificate_failed",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Errors raised while reading user-supplied models are usage errors.
    pub fn setup(e: rdbound::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            CliError::Usage(m) | CliError::CertificateFailed(m) | CliError::Io(m) => m.clone(),
            CliError::Compute(e) => e.to_string(),
        };
        // one line, so the report stays machine-readable
        write!(f, "error: kind={} message={}", self.kind(), msg.replace('\n', " "))
    }
}

impl From<rdbound::Error> for CliError {
    fn from(e: rdbound::Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

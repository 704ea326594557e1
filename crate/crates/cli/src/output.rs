use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize, S: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    summary: &'a S,
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".meta.toml");
    PathBuf::from(name)
}

/// Write `body` to `output` (or stdout) and, for a file, the sidecar with
/// the resolved configuration and a run summary.
pub fn emit<C: Serialize, S: Serialize>(
    command: &str,
    output: Option<&Path>,
    body: &str,
    config: &C,
    summary: &S,
) -> CliResult<()> {
    let Some(path) = output else {
        io::stdout().write_all(body.as_bytes())?;
        return Ok(());
    };
    fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let meta = Sidecar {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        summary,
    };
    let text = toml::to_string(&meta).map_err(|e| CliError::Io(format!("sidecar: {e}")))?;
    let side = sidecar_path(path);
    fs::write(&side, text).map_err(|e| CliError::Io(format!("{}: {e}", side.display())))?;
    Ok(())
}

pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

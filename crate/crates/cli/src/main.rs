//! `rdbound`: rate-distortion lower bounds from the command line.
//!
//! Exit status 0 on success, 1 when a computation fails (including a
//! certificate that does not survive validation), 2 on usage errors.
//! Failures print one line `error: kind=<kind> message=<text>` to stderr.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod ba;
mod certify;
mod config;
mod curve;
mod error;
mod jdelta;
mod output;
mod source;

#[derive(Debug, Parser)]
#[command(name = "rdbound", version, about = "Lower bounds on rate-distortion functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    Curve(curve::CurveArgs),
    Certify(certify::CertifyArgs),
    Jdelta(jdelta::JdeltaArgs),
    Ba(ba::BaArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", error::CliError::Usage(first.to_string()));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Curve(args) => curve::run(args),
        Command::Certify(args) => certify::run(args),
        Command::Jdelta(args) => jdelta::run(args),
        Command::Ba(args) => ba::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

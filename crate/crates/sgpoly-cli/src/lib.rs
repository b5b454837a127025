//! Command-line front end for the `sgpoly` toolkit: parameter and table
//! dumps, mesh refinement, Neumann spectra, ratio/conjecture sweeps and the
//! identity suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod svg;
pub mod verify;

use config::{BackendArg, Cli, Command, Defaults, Settings, default_verify_rs};
use error::Result;

/// Status for runs that completed but found failing checks.
pub const EXIT_CHECKS_FAILED: i32 = 1;

fn defaults(cmd: &Command) -> Defaults {
    let (jmax, backend, rs) = match cmd {
        Command::Table(_) => (10, BackendArg::Exact, Vec::new()),
        Command::Conjectures(_) => (50, BackendArg::Float, Vec::new()),
        Command::Verify(_) => (20, BackendArg::Exact, default_verify_rs()),
        _ => (10, BackendArg::Exact, Vec::new()),
    };
    Defaults { rs, jmax, backend }
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: Cli) -> Result<i32> {
    let d = defaults(&cli.command);
    let (opts, f): (_, fn(&Settings) -> Result<commands::Output>) = match &cli.command {
        Command::Params(o) => (o, commands::params),
        Command::Table(o) => (o, commands::table),
        Command::Refine(o) => (o, commands::refine),
        Command::Spectrum(o) => (o, commands::spectrum),
        Command::Conjectures(o) => (o, commands::conjectures),
        Command::Verify(o) => (o, commands::verify),
    };
    let settings = Settings::resolve(opts, d)?;
    let out = f(&settings)?;
    commands::emit(&out, settings.out.as_deref())?;
    Ok(if out.success { 0 } else { EXIT_CHECKS_FAILED })
}

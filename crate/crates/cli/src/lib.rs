//! Command-line front end: every experiment is a subcommand that writes CSV.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod setup;
pub mod tables;

use config::Settings;
use csv::Csv;
use error::{CliError, CliResult};

pub const SUBCOMMANDS: [&str; 9] = [
    "integrate",
    "errors",
    "poincare",
    "fli",
    "zero-one",
    "detcheck",
    "scan",
    "convergence",
    "tables",
];

/// Runs a subcommand with fully merged settings. The CSV is returned even
/// when the command fails part-way, so partial output can still be written.
pub fn run(command: &str, settings: &Settings) -> (Csv, CliResult<()>) {
    let mut out = Csv::new::<&str>(&[]);
    let work = |out: &mut Csv| -> CliResult<()> {
        match command {
            "integrate" => commands::integrate(settings, out),
            "errors" => commands::errors(settings, out),
            "poincare" => commands::poincare(settings, out),
            "fli" => commands::fli_cmd(settings, out),
            "zero-one" => commands::zero_one(settings, out),
            "detcheck" => commands::detcheck(settings, out),
            "scan" => commands::scan(settings, out),
            "convergence" => commands::convergence(settings, out),
            "tables" => tables::tables(settings, out),
            other => Err(CliError::config(
                "command",
                format!(
                    "unknown subcommand `{other}`; valid: {}",
                    SUBCOMMANDS.join(", ")
                ),
            )),
        }
    };
    let res = match setup::workers(settings) {
        Err(e) => Err(e),
        Ok(None) => work(&mut out),
        Ok(Some(n)) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| work(&mut out)),
            Err(e) => Err(CliError::config("workers", e.to_string())),
        },
    };
    (out, res)
}

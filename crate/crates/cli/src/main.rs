use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fgsymp_cli::config::Settings;
use fgsymp_cli::error::CliError;

#[derive(Parser)]
#[command(
    name = "fgsymp",
    version,
    about = "Symplectic integrator experiments, written as CSV"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trajectory: t, coordinates, momenta, H, dH
    Integrate(Opts),
    /// Energy and position errors against the adaptive reference: t, abs_dH, abs_dr
    Errors(Opts),
    /// Poincare section points: t, coordinates, momenta
    Poincare(Opts),
    /// Fast Lyapunov indicator: t, fli
    Fli(Opts),
    /// 0-1 test for chaos: t, lnL and a lambda summary row
    ZeroOne(Opts),
    /// Phase-volume check: t, det_minus_1
    Detcheck(Opts),
    /// Chaos-indicator sweep: swept_value, indicator, classification, seconds
    Scan(Opts),
    /// Global error against step size: tau, err and a slope summary row
    Convergence(Opts),
    /// Long-run error orders next to their expected values
    Tables(Opts),
}

impl Command {
    fn parts(&self) -> (&'static str, &Opts) {
        match self {
            Command::Integrate(o) => ("integrate", o),
            Command::Errors(o) => ("errors", o),
            Command::Poincare(o) => ("poincare", o),
            Command::Fli(o) => ("fli", o),
            Command::ZeroOne(o) => ("zero-one", o),
            Command::Detcheck(o) => ("detcheck", o),
            Command::Scan(o) => ("scan", o),
            Command::Convergence(o) => ("convergence", o),
            Command::Tables(o) => ("tables", o),
        }
    }
}

/// Every option is also a config-file key (with `_` for `-`); flags win.
/// Numbers accept fractions (`1/120`) and multiples of pi (`0.05pi`).
#[derive(Args)]
struct Opts {
    /// Flat `key = value` config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// mhh, hh or spring
    #[arg(long)]
    system: Option<String>,
    /// Scheme name, or rk4 / rkf89
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    /// Initial values, e.g. x=0,y=-2.02,py=0 (unset components are 0)
    #[arg(long)]
    ic: Option<String>,
    /// Energy that fixes the closure momentum
    #[arg(long)]
    energy: Option<String>,
    /// Momentum solved from the energy, e.g. px
    #[arg(long)]
    closure: Option<String>,
    #[arg(long)]
    sample_every: Option<String>,
    /// Output file (standard output when absent or `-`)
    #[arg(long, short)]
    output: Option<String>,
    /// Caps the number of worker threads
    #[arg(long)]
    workers: Option<String>,
    /// Seed for the random-c 0-1 test
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    reference_tol: Option<String>,
    /// FLI initial separation
    #[arg(long)]
    d0: Option<String>,
    /// FLI deviation direction: four numbers or name=value pairs
    #[arg(long)]
    direction: Option<String>,
    /// Project the FLI deviation onto the energy surface
    #[arg(long)]
    tangent_deviation: bool,
    /// Coordinate whose zero defines the Poincare section
    #[arg(long)]
    section: Option<String>,
    /// Largest 0-1 lag
    #[arg(long)]
    t_max: Option<String>,
    /// 0-1 averaging window
    #[arg(long)]
    window: Option<String>,
    /// 0-1 frequency, or `random` (median over c_count draws, needs --seed)
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    c_count: Option<String>,
    /// 0-1 observable variable
    #[arg(long)]
    observable: Option<String>,
    /// stepwise (default) or whole
    #[arg(long)]
    det_method: Option<String>,
    /// Swept variable
    #[arg(long)]
    var: Option<String>,
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    stop: Option<String>,
    /// Grid points, both ends included
    #[arg(long)]
    count: Option<String>,
    /// Multiplier from grid values to the variable, e.g. pi
    #[arg(long)]
    unit: Option<String>,
    /// fli or zero_one
    #[arg(long)]
    indicator: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    /// Comma-separated step sizes
    #[arg(long)]
    taus: Option<String>,
    /// all, mhh-energy, mhh-position or spring
    #[arg(long)]
    table: Option<String>,
    /// Exit with status 4 if any table row is outside its band
    #[arg(long)]
    check: bool,
}

impl Opts {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::new(),
        };
        let flags = [
            ("system", &self.system),
            ("scheme", &self.scheme),
            ("tau", &self.tau),
            ("steps", &self.steps),
            ("t_end", &self.t_end),
            ("ic", &self.ic),
            ("energy", &self.energy),
            ("closure", &self.closure),
            ("sample_every", &self.sample_every),
            ("output", &self.output),
            ("workers", &self.workers),
            ("seed", &self.seed),
            ("reference_tol", &self.reference_tol),
            ("d0", &self.d0),
            ("direction", &self.direction),
            ("section", &self.section),
            ("t_max", &self.t_max),
            ("window", &self.window),
            ("c", &self.c),
            ("c_count", &self.c_count),
            ("observable", &self.observable),
            ("det_method", &self.det_method),
            ("var", &self.var),
            ("start", &self.start),
            ("stop", &self.stop),
            ("count", &self.count),
            ("unit", &self.unit),
            ("indicator", &self.indicator),
            ("threshold", &self.threshold),
            ("taus", &self.taus),
            ("table", &self.table),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v.clone());
            }
        }
        if self.tangent_deviation {
            s.set("tangent_deviation", "true");
        }
        if self.check {
            s.set("check", "true");
        }
        Ok(s)
    }
}

fn write_output(target: Option<&str>, text: &str) -> Result<(), CliError> {
    match target {
        None | Some("-") => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::config("output", e.to_string())),
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::config("output", format!("{path}: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, opts) = cli.command.parts();
    let settings = match opts.settings() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let (csv, result) = fgsymp_cli::run(name, &settings);
    let mut failure = result.err();
    let has_rows = csv.as_str().lines().count() > 1;
    if has_rows || failure.is_none() {
        if let Err(e) = write_output(settings.get("output"), csv.as_str()) {
            failure.get_or_insert(e);
        }
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

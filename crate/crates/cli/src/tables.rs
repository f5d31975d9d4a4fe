//! Long-run error tables: maximum energy error and final position error
//! after `t = 10^4`, printed as log10 orders next to the expected orders.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use fgsymp::integrator::RKF_DEFAULT_TOL;
use fgsymp::{energy, solve_missing_momentum, Method, State, SystemId};

use crate::config::Settings;
use crate::csv::{fmt_float, Csv};
use crate::error::{CliError, CliResult};
use crate::setup;

pub const LONG_RUN: f64 = 1e4;
pub const ENERGY_BAND_DEX: f64 = 0.3;
/// Wider band for the adaptive reference, whose controller settings matter.
pub const RKF_ENERGY_BAND_DEX: f64 = 1.0;
pub const POSITION_BAND_DEX: f64 = 0.7;

const MHH_ENERGY: f64 = 1.0 / 120.0;
const SPRING_ENERGY: f64 = 1.0 / 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Energy,
    Position,
}

impl Quantity {
    fn as_str(self) -> &'static str {
        match self {
            Quantity::Energy => "abs_dH",
            Quantity::Position => "abs_dr",
        }
    }
}

/// One expected entry: `(table, system, tau, method, quantity, log10 order)`.
pub type Expected = (&'static str, SystemId, f64, &'static str, Quantity, f64);

const MHH: SystemId = SystemId::ModifiedHenonHeiles;
const SPRING: SystemId = SystemId::SpringPendulum;
use Quantity::{Energy as E, Position as P};

pub const TABLE_NAMES: [&str; 3] = ["mhh-energy", "mhh-position", "spring"];

#[rustfmt::skip]
pub const EXPECTED: &[Expected] = &[
    ("mhh-energy", MHH, 0.1, "rk4", E, 1.29),
    ("mhh-energy", MHH, 0.1, "rkf89", E, -9.69),
    ("mhh-energy", MHH, 0.1, "fr4", E, -2.73),
    ("mhh-energy", MHH, 0.1, "omf4p", E, -4.08),
    ("mhh-energy", MHH, 0.1, "omf4v", E, -4.13),
    ("mhh-energy", MHH, 0.1, "chin4", E, -3.96),
    ("mhh-energy", MHH, 0.1, "omf4go", E, -4.40),
    ("mhh-energy", MHH, 0.1, "omf4gp", E, -5.75),
    ("mhh-energy", MHH, 0.1, "omf4gv", E, -5.66),
    ("mhh-energy", MHH, 0.01, "rk4", E, -3.63),
    ("mhh-energy", MHH, 0.01, "rkf89", E, -11.67),
    ("mhh-energy", MHH, 0.01, "fr4", E, -6.75),
    ("mhh-energy", MHH, 0.01, "omf4p", E, -8.09),
    ("mhh-energy", MHH, 0.01, "omf4v", E, -8.14),
    ("mhh-energy", MHH, 0.01, "chin4", E, -7.97),
    ("mhh-energy", MHH, 0.01, "omf4go", E, -8.40),
    ("mhh-energy", MHH, 0.01, "omf4gp", E, -9.72),
    ("mhh-energy", MHH, 0.01, "omf4gv", E, -9.67),
    ("mhh-position", MHH, 0.1, "rk4", P, 0.47),
    ("mhh-position", MHH, 0.1, "fr4", P, 0.006),
    ("mhh-position", MHH, 0.1, "omf4p", P, -0.56),
    ("mhh-position", MHH, 0.1, "omf4v", P, -0.63),
    ("mhh-position", MHH, 0.1, "chin4", P, -0.49),
    ("mhh-position", MHH, 0.1, "omf4go", P, -0.87),
    ("mhh-position", MHH, 0.1, "omf4gp", P, -2.06),
    ("mhh-position", MHH, 0.1, "omf4gv", P, -2.03),
    ("mhh-position", MHH, 0.01, "rk4", P, -2.38),
    ("mhh-position", MHH, 0.01, "fr4", P, -2.32),
    ("mhh-position", MHH, 0.01, "omf4p", P, -4.07),
    ("mhh-position", MHH, 0.01, "omf4v", P, -4.50),
    ("mhh-position", MHH, 0.01, "chin4", P, -3.96),
    ("mhh-position", MHH, 0.01, "omf4go", P, -4.72),
    ("mhh-position", MHH, 0.01, "omf4gp", P, -5.858),
    ("mhh-position", MHH, 0.01, "omf4gv", P, -5.856),
    ("spring", SPRING, 0.1, "rk4", E, 0.04),
    ("spring", SPRING, 0.1, "rkf89", E, -10.53),
    ("spring", SPRING, 0.1, "fr4", E, -4.47),
    ("spring", SPRING, 0.1, "omf4p", E, -5.73),
    ("spring", SPRING, 0.1, "omf4v", E, -5.65),
    ("spring", SPRING, 0.1, "chin4", E, -5.73),
    ("spring", SPRING, 0.1, "omf4go", E, -5.74),
    ("spring", SPRING, 0.1, "omf4gp", E, -7.65),
    ("spring", SPRING, 0.1, "omf4gv", E, -7.47),
    ("spring", SPRING, 0.1, "rk4", P, 0.13),
    ("spring", SPRING, 0.1, "fr4", P, -0.67),
    ("spring", SPRING, 0.1, "omf4p", P, -2.99),
    ("spring", SPRING, 0.1, "omf4v", P, -2.74),
    ("spring", SPRING, 0.1, "chin4", P, -3.06),
    ("spring", SPRING, 0.1, "omf4go", P, -3.45),
    ("spring", SPRING, 0.1, "omf4gp", P, -4.34),
    ("spring", SPRING, 0.1, "omf4gv", P, -4.24),
];

/// Initial state and energy of the long-run orbit of `system`.
pub fn long_run_start(system: SystemId) -> (State<2>, f64) {
    let (base, closure, e) = match system {
        SystemId::SpringPendulum => (State::new([1.15, 0.05 * PI], [0.0, 0.0]), 1, SPRING_ENERGY),
        _ => (State::new([0.0, -2.02], [0.0, 0.0]), 0, MHH_ENERGY),
    };
    let s = solve_missing_momentum(system.model(), &base, closure, e).expect("feasible start");
    (s, e)
}

fn band(method: &str, q: Quantity) -> f64 {
    match (q, method) {
        (Quantity::Position, _) => POSITION_BAND_DEX,
        (Quantity::Energy, "rkf89") => RKF_ENERGY_BAND_DEX,
        (Quantity::Energy, _) => ENERGY_BAND_DEX,
    }
}

struct Run {
    max_energy_error: f64,
    end: State<2>,
    failure: Option<String>,
    seconds: f64,
}

fn long_run(system: SystemId, method: &Method, tau: f64) -> Run {
    let start = Instant::now();
    let (s0, e0) = long_run_start(system);
    let model = system.model();
    let n = (LONG_RUN / tau).round() as usize;
    let mut worst: f64 = 0.0;
    let res = method.propagate(model, &s0, tau, n, |s| {
        if let Ok(e) = energy(model, s) {
            worst = worst.max((e - e0).abs());
        }
    });
    let (end, failure) = match res {
        Ok(end) => (end, None),
        Err((last, e)) => (last, Some(format!("stopped at t = {:.1}: {e}", last.t))),
    };
    Run {
        max_energy_error: worst,
        end,
        failure,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Columns `table, tau, method, quantity, order, expected, band, within, seconds`;
/// `seconds` is informational. With `check` set, any row outside its band
/// (or a failed run) is reported as a mismatch after the table is written.
pub fn tables(settings: &Settings, out: &mut Csv) -> CliResult<()> {
    let which = settings.get("table").unwrap_or("all");
    if which != "all" && !TABLE_NAMES.contains(&which) {
        return Err(CliError::config(
            "table",
            format!("`{which}`; valid: all, {}", TABLE_NAMES.join(", ")),
        ));
    }
    let only = match settings.get("scheme") {
        Some(_) => Some(setup::method(settings)?.name()),
        None => None,
    };
    let tol = settings.positive("reference_tol", Some(RKF_DEFAULT_TOL))?;
    let check = settings.flag("check")?;

    let rows: Vec<&Expected> = EXPECTED
        .iter()
        .filter(|r| which == "all" || r.0 == which)
        .filter(|r| only.map_or(true, |m| r.3 == m))
        .collect();

    let mut runs: BTreeMap<(&str, u64, &str), Run> = BTreeMap::new();
    let mut references: BTreeMap<&str, State<2>> = BTreeMap::new();
    *out = Csv::new(&[
        "table", "tau", "method", "quantity", "order", "expected", "band", "within", "seconds",
    ]);
    let mut misses = Vec::new();
    for &&(table, system, tau, name, quantity, expected) in &rows {
        let key = (system.name(), tau.to_bits(), name);
        if !runs.contains_key(&key) {
            let m = Method::by_name(name).expect("registered method");
            runs.insert(key, long_run(system, &m, tau));
        }
        let run = &runs[&key];
        let order = match quantity {
            Quantity::Energy => run.max_energy_error.log10(),
            Quantity::Position => {
                let reference = match references.get(system.name()) {
                    Some(r) => *r,
                    None => {
                        let (s0, _) = long_run_start(system);
                        let r = Method::Rkf89 { tol }
                            .propagate(system.model(), &s0, LONG_RUN, 1, |_| {})
                            .map_err(|(_, e)| {
                                CliError::Numerical(format!("reference integration failed: {e}"))
                            })?;
                        references.insert(system.name(), r);
                        r
                    }
                };
                (run.end.q[0] - reference.q[0])
                    .hypot(run.end.q[1] - reference.q[1])
                    .log10()
            }
        };
        let width = band(name, quantity);
        let within = run.failure.is_none() && (order - expected).abs() <= width;
        if !within {
            misses.push(format!(
                "{table} tau={tau} {name} {}: {order:.2} vs {expected:.2}{}",
                quantity.as_str(),
                run.failure
                    .as_deref()
                    .map(|f| format!(" ({f})"))
                    .unwrap_or_default()
            ));
        }
        out.cells(&[
            table.to_string(),
            fmt_float(tau),
            name.to_string(),
            quantity.as_str().to_string(),
            fmt_float(order),
            fmt_float(expected),
            fmt_float(width),
            within.to_string(),
            fmt_float(run.seconds),
        ]);
    }
    if check && !misses.is_empty() {
        return Err(CliError::Mismatch(format!(
            "{} of {} rows outside their bands: {}",
            misses.len(),
            rows.len(),
            misses.join("; ")
        )));
    }
    Ok(())
}

//! One function per subcommand. Each writes its CSV into `out`; on a
//! numerical failure the rows computed so far stay in `out` and the error is
//! returned.

use fgsymp::diagnostics::{
    energy_error_series, fli, jacobian_determinant, poincare_section, position_error_series,
    stepwise_determinant, zero_one_test, CChoice, FliConfig, SectionSpec, ZeroOneConfig, DEFAULT_C,
    FLI_CHAOS_THRESHOLD, ZERO_ONE_MIDPOINT,
};
use fgsymp::integrator::RKF_DEFAULT_TOL;
use fgsymp::scan::{run_scan, Grid, Indicator, ScanSpec};
use fgsymp::{energy, Method, State, SystemId, Trajectory};

use crate::config::Settings;
use crate::csv::{fmt_float, Csv};
use crate::error::{AtField, CliError, CliResult};
use crate::setup;

const DEFAULT_TAUS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
const DEFAULT_CONVERGENCE_T: f64 = 10.0;
const DEFAULT_SCAN_POINTS: usize = 500;
const DEFAULT_C_COUNT: usize = 16;
const DEFAULT_T_MAX: f64 = 1000.0;
const DEFAULT_WINDOW: f64 = 1e5;

fn phase_header(system: SystemId) -> Vec<String> {
    let m = system.model();
    m.coordinate_names()
        .iter()
        .chain(m.momentum_names().iter())
        .map(|s| s.to_string())
        .collect()
}

fn incomplete<const N: usize>(traj: &Trajectory<N>) -> CliResult<()> {
    match &traj.error {
        None => Ok(()),
        Some(e) => Err(CliError::Numerical(format!(
            "integration stopped at t = {}: {e}",
            traj.last().map_or(f64::NAN, |s| s.t)
        ))),
    }
}

/// Columns `t, q..., p..., H, dH`.
pub fn integrate(settings: &Settings, out: &mut Csv) -> CliResult<()> {
    let system = setup::system(settings)?;
    let method = setup::method(settings)?;
    let (tau, steps) = setup::time_grid(settings)?;
    let every = setup::sample_every(settings, 1)?;
    let s0 = setup::initial_state(settings, system)?;
    let model = system.model();
    let e0 = energy(model, &s0).at("ic")?;
    let traj = method
        .trajectory(model, &s0, tau, steps, every)
        .at("steps")?;
    let mut header = vec!["t".to_string()];
    header.extend(phase_header(system));
    header.extend(["H".to_string(), "dH".to_string()]);
    *out = Csv::new(&header);
    for (s, h) in traj.states.iter().zip(&traj.energies) {
        let mut row = vec![s.t];
        row.extend(s.phase());
        row.extend([*h, h - e0]);
        out.row(&row);
    }
    incomplete(&traj)
}

/// Columns `t, abs_dH, abs_dr` against the adaptive reference solution.
pub fn errors(settings: &Settings, out: &mut Csv) -> CliResult<()> {
    let system = setup::system(settings)?;
    let method = setup::method(settings)?;
    let (tau, steps) = setup::time_grid(settings)?;
    let every = setup::sample_every(settings, 1)?;
    let tol = settings.positive("reference_tol", Some(RKF_DEFAULT_TOL))?;
    let s0 = setup::initial_state(settings, system)?;
    let model = system.model();
    let e0 = energy(model, &s0).at("ic")?;
    let traj = method
        .trajectory(model, &s0, tau, steps, every)
        .at("steps")?;
    let mut reference = Method::Rkf89 { tol }
        .trajectory(model, &s0, tau, steps, every)
        .at("reference_tol")?;
    if let Some(e) = &reference.error {
        return Err(CliError::Numerical(format!(
            "reference integration failed: {e}"
        )));
    }
    // a failed run stops early: compare over the sample times both reached
    let mut run = traj.clone();
    let shared = run
        .states
        .iter()
        .zip(&reference.states)
        .take_while(|(a, b)| (a.t - b.t).abs() <= 1e-9 * a.t.abs().max(1.0))
        .count();
    for t in [&mut run, &mut reference] {
        t.states.truncate(shared);
        t.energies.truncate(shared);
    }
    let de = energy_error_series(&run, e0).at("steps")?;
    let dr = position_error_series(&run, &reference).at("steps")?;
    *out = Csv::new(&["t", "abs_dH", "abs_dr"]);
    for i in 0..de.times.len() {
        out.row(&[de.times[i], de.values[i], dr.values[i]]);
    }
    incomplete(&traj)
}

/// Section points `t, q..., p...` on `section = 0` with positive conjugate momentum.
pub fn poincare(settings: &Settings, out: &mut Csv) -> CliResult<()> {
    let system = setup::system(settings)?;
    let method = setup::method(settings)?;
    let (tau, steps) = setup::time_grid(settings)?;
    let s0 = setup::initial_state(settings, system)?;
    let model = system.model();
    let coordinate = match settings.get("section") {
        None => 0,
        Some(name) => {
            let i = setup::variable(system, "section", name)?;
            if i >= 2 {
                return Err(CliError::config(
                    "section",
                    format!("`{name}` is not a coordinate"),
                ));
            }
            i
        }
    };
    let spec = SectionSpec::for_coordinate(model, coordinate);
    let t_end = s0.t + steps as f64 * tau;
    let mut header = vec!["t".to_string()];
    header.extend(phase_header(system));
    *out = Csv::new(&header);
    let points = poincare_section(&method, model, &s0, tau, t_end, spec).at("section")?;
    for p in &points.points {
        let mut row = vec![p.t];
        row.extend(p.phase());
        out.row(&row);
    }
    Ok(())
}

fn fli_config(settings: &Settings, system: SystemId) -> CliResult<FliConfig> {
    let mut cfg = FliConfig {
        d0: settings.positive("d0", Some(FliConfig::default().d0))?,
        tangent_to_energy: settings.flag("tangent_deviation")?,
        sample_every: setup::sample_every(settings, 1)?,
        ..FliConfig::default()
    };
    if let Some(text) = settings.get("direction") {
        let dims = phase_header(system).len();
        let mut dir = vec![0.0; dims];
        if text.contains('=') {
            for item in text.split(',') {
                let (name, v) = item.split_once('=').unwrap_or((item, ""));
                let i = setup::variable(system, "direction", name)?;
                dir[i] =
                    crate::config::parse_number(v).map_err(|m| CliError::config("direction", m))?;
            }
        } else {
            dir = settings.numbers("direction")?.unwrap_or_default();
        }
        cfg.direction = Some(dir);
    }
    Ok(cfg)
}

/// Columns `t, fli`.
pub fn fli_cmd(settings: &Settings, out: &mut Csv) -> CliResult<()> {
    let system = setup::system(settings)?;
    let method = setup::method(settings)?;
    let (tau, steps) = setup::time_grid(settings)?;
    let s0 = setup::initial_state(settings, system)?;
    let cfg = fli_config(settings, system)?;
    let t_end = s0.t + steps as f64 * tau;
    let res = fli(&method, system.model(), &s0, tau, t_end, &cfg).at("direction")?;
    *out = Csv::new(&["t", "fli"]);
    for (t, v) in res.times.iter().zip(&res.values) {
        out.row(&[*t, *v]);
    }
    Ok(())
}

fn c_choice(settings: &Settings) -> CliResult<CChoice> {
    match settings.get("c") {
        None => Ok(CChoice::Fixed(DEFAULT_C)),
        Some("random") => {
            let seed = settings
                .count("seed")?
                .ok_or_else(|| CliError::config("seed", "random c needs an explicit seed"))?;
            let count = settings.count("c_count")?.unwrap_or(DEFAULT_C_COUNT);
            if count == 0 {
                return Err(CliError::config("c_count", "must be at least 1"));
            }
            Ok(CChoice::RandomMedian {
                count,
                seed: seed as u64,
            })
        }
        Some(_) => Ok(CChoice::Fixed(settings.require_number("c")?)),
    }
}

fn observable(settings: &Settings, system: SystemId) -> CliResult<usize> {
    match settings.get("observable") {
        None => Ok(0),
        Some(name) => setup::variable(system, "observable", name),
    }
}

/// Columns `t, lnL`, then a `lambda` summary row.
pub fn zero_one(settings: &Settings, out: &mut Csv) -> CliResult<()> {
    let system = setup::system(settings)?;
    let method = setup::method(settings)?;
    let tau = settings.positive("tau", None)?;
    let t_max = settings.positive("t_max", Some(DEFAULT_T_MAX))?;
    let window = settings.positive("window", Some(DEFAULT_WINDOW))?;
    let config = ZeroOneConfig {
        c: c_choice(settings)?,
        ..ZeroOneConfig::default()
    };
    let s0 = setup::initial_state(settings, system)?;
    let obs = observable(settings, system)?;
    let res = zero_one_test(
        &method,
        system.model(),
        &s0,
        tau,
        t_max,
        window,
        |s: &State<2>| s.component(obs),
        &config,
    )
    .at("window")?;
    *out = Csv::new(&["t", "lnL"]);
    for (t, l) in &res.curve {
        out.row(&[*t, *l]);
    }
    out.summary("lambda", res.lambda);
    Ok(())
}

/// Columns `t, det_minus_1`.
pub fn detcheck(settings: &Settings, out: &mut Csv) -> CliResult<()> {
    let system = setup::system(settings)?;
    let method = setup::method(settings)?;
    let (tau, steps) = setup::time_grid(settings)?;
    let every = setup::sample_every(settings, 100)?;
    let s0 = setup::initial_state(settings, system)?;
    let model = system.model();
    let dets = match settings.get("det_method").unwrap_or("stepwise") {
        "stepwise" => stepwise_determinant(&method, model, &s0, tau, steps, every),
        "whole" => jacobian_determinant(&method, model, &s0, tau, steps, every),
        other => {
            return Err(CliError::config(
                "det_method",
                format!("`{other}`; valid: stepwise, whole"),
            ))
        }
    }
    .at("steps")?;
    *out = Csv::new(&["t", "det_minus_1"]);
    for (t, d) in dets {
        out.row(&[t, d - 1.0]);
    }
    Ok(())
}

pub fn scan_spec(settings: &Settings) -> CliResult<ScanSpec> {
    let system = setup::system(settings)?;
    let method = setup::method(settings)?;
    let var_name = settings.require("var")?;
    let variable = setup::variable(system, "var", var_name)?;
    let count = settings.count("count")?.unwrap_or(DEFAULT_SCAN_POINTS);
    let grid = Grid::new(
        settings.require_number("start")?,
        settings.require_number("stop")?,
        count,
    )
    .at("count")?;
    let unit = settings.number_or("unit", 1.0)?;
    let (base, set) = setup::explicit_state(settings, system)?;
    if set.contains(&variable) {
        return Err(CliError::config(
            "ic",
            format!("also sets the swept variable `{var_name}`"),
        ));
    }
    let (closure, energy) = match setup::closure(settings, system)? {
        Some((c, e)) => {
            if variable == 2 + c {
                return Err(CliError::config("var", "is the closure momentum"));
            }
            (c, Some(e))
        }
        None => (0, None),
    };
    let tau = settings.positive("tau", None)?;
    let indicator = match settings.get("indicator").unwrap_or("fli") {
        "fli" => Indicator::Fli {
            tau,
            t_end: settings.positive("t_end", None)?,
            threshold: settings.number_or("threshold", FLI_CHAOS_THRESHOLD)?,
            d0: settings.positive("d0", Some(FliConfig::default().d0))?,
            tangent: settings.flag("tangent_deviation")?,
        },
        "zero_one" | "zero-one" => Indicator::ZeroOne {
            tau,
            t_max: settings.positive("t_max", Some(DEFAULT_T_MAX))?,
            window: settings.positive("window", Some(DEFAULT_WINDOW))?,
            threshold: settings.number_or("threshold", ZERO_ONE_MIDPOINT)?,
            c: c_choice(settings)?,
            observable: observable(settings, system)?,
        },
        other => {
            return Err(CliError::config(
                "indicator",
                format!("`{other}`; valid: fli, zero_one"),
            ))
        }
    };
    let spec = ScanSpec {
        system,
        method,
        variable,
        grid,
        unit,
        base,
        energy,
        closure,
        indicator,
    };
    spec.validate().at("var")?;
    Ok(spec)
}

/// Columns `swept_value, indicator, classification, seconds`.
pub fn scan(settings: &Settings, out: &mut Csv) -> CliResult<()> {
    let spec = scan_spec(settings)?;
    let result = run_scan(&spec, setup::workers(settings)?).at("workers")?;
    *out = Csv::new(&["swept_value", "indicator", "classification", "seconds"]);
    for p in &result.points {
        out.cells(&[
            fmt_float(p.value),
            p.indicator.map(fmt_float).unwrap_or_default(),
            p.class.as_str().to_string(),
            fmt_float(p.seconds),
        ]);
    }
    Ok(())
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Columns `tau, err` (phase-space distance at `t_end` from the reference),
/// then a `slope` row fitted in log-log.
pub fn convergence(settings: &Settings, out: &mut Csv) -> CliResult<()> {
    let system = setup::system(settings)?;
    let method = setup::method(settings)?;
    let taus = settings.numbers("taus")?.unwrap_or(DEFAULT_TAUS.to_vec());
    if taus.len() < 2 || taus.iter().any(|t| !(*t > 0.0)) {
        return Err(CliError::config(
            "taus",
            "need at least two positive step sizes",
        ));
    }
    let t_end = settings.positive("t_end", Some(DEFAULT_CONVERGENCE_T))?;
    let tol = settings.positive("reference_tol", Some(RKF_DEFAULT_TOL))?;
    let s0 = setup::initial_state(settings, system)?;
    let model = system.model();
    let reference = Method::Rkf89 { tol }
        .propagate(model, &s0, t_end, 1, |_| {})
        .map_err(|(_, e)| CliError::Numerical(format!("reference integration failed: {e}")))?;
    *out = Csv::new(&["tau", "err"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for tau in taus {
        let n = (t_end / tau).round() as usize;
        if n == 0 || ((n as f64 * tau - t_end).abs() > 1e-9 * t_end) {
            return Err(CliError::config(
                "taus",
                format!("{tau} does not divide t_end = {t_end}"),
            ));
        }
        let end = method
            .propagate(model, &s0, tau, n, |_| {})
            .map_err(|(_, e)| CliError::Numerical(format!("tau = {tau}: {e}")))?;
        let err = end.distance(&reference);
        out.row(&[tau, err]);
        xs.push(tau.ln());
        ys.push(err.ln());
    }
    out.summary("slope", slope(&xs, &ys));
    Ok(())
}

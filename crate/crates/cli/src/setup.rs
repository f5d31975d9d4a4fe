//! Resolving the shared experiment settings: system, method, step grid and
//! initial condition.

use fgsymp::integrator::method_names;
use fgsymp::{energy, solve_missing_momentum, Method, State, SystemId};

use crate::config::{parse_number, Settings};
use crate::error::{AtField, CliError, CliResult};

pub fn system(settings: &Settings) -> CliResult<SystemId> {
    SystemId::by_name(settings.get("system").unwrap_or("mhh")).at("system")
}

/// One method from `key`; unknown names list the valid ones.
pub fn method_at(settings: &Settings, key: &str) -> CliResult<Method> {
    let name = settings.require(key)?;
    Method::by_name(name).map_err(|_| {
        CliError::config(
            key,
            format!(
                "unknown scheme `{name}`; valid names: {}",
                method_names().join(", ")
            ),
        )
    })
}

pub fn method(settings: &Settings) -> CliResult<Method> {
    method_at(settings, "scheme")
}

/// Step size and number of steps, from `steps` or else `t_end / tau`.
pub fn time_grid(settings: &Settings) -> CliResult<(f64, usize)> {
    let tau = settings.positive("tau", None)?;
    let steps = match settings.count("steps")? {
        Some(n) => n,
        None => match settings.number("t_end")? {
            Some(t) if t > 0.0 => (t / tau).round() as usize,
            Some(t) => {
                return Err(CliError::config(
                    "t_end",
                    format!("must be positive, got {t}"),
                ))
            }
            None => return Err(CliError::config("steps", "set `steps` or `t_end`")),
        },
    };
    if steps == 0 {
        return Err(CliError::config("steps", "must be at least 1"));
    }
    Ok((tau, steps))
}

pub fn sample_every(settings: &Settings, default: usize) -> CliResult<usize> {
    match settings.count("sample_every")?.unwrap_or(default) {
        0 => Err(CliError::config("sample_every", "must be at least 1")),
        n => Ok(n),
    }
}

/// Phase index of a variable name of `system`.
pub fn variable(system: SystemId, key: &str, name: &str) -> CliResult<usize> {
    system.component_index(name.trim()).at(key)
}

/// The explicit values of `ic` (`x=0,y=-2.02,py=0`); unset components are 0.
/// Returns the state and the indices that were set.
pub fn explicit_state(settings: &Settings, system: SystemId) -> CliResult<(State<2>, Vec<usize>)> {
    let mut s = State::new([0.0; 2], [0.0; 2]);
    let mut set = Vec::new();
    if let Some(text) = settings.get("ic") {
        for item in text.split(',').filter(|i| !i.trim().is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::config("ic", format!("`{item}` is not name=value")))?;
            let idx = variable(system, "ic", name)?;
            if set.contains(&idx) {
                return Err(CliError::config(
                    "ic",
                    format!("`{}` given twice", name.trim()),
                ));
            }
            *s.component_mut(idx) = parse_number(value).map_err(|m| CliError::config("ic", m))?;
            set.push(idx);
        }
    }
    Ok((s, set))
}

/// Momentum index (0..N) named by `closure`, if an energy is given.
pub fn closure(settings: &Settings, system: SystemId) -> CliResult<Option<(usize, f64)>> {
    let Some(e) = settings.number("energy")? else {
        if settings.get("closure").is_some() {
            return Err(CliError::config("energy", "`closure` needs an energy"));
        }
        return Ok(None);
    };
    let name = settings
        .get("closure")
        .ok_or_else(|| CliError::config("closure", "an energy needs the momentum to solve for"))?;
    let idx = variable(system, "closure", name)?;
    if idx < 2 {
        return Err(CliError::config(
            "closure",
            format!("`{name}` is a coordinate; name a momentum"),
        ));
    }
    Ok(Some((idx - 2, e)))
}

/// Initial state from `ic`, with the closure momentum solved from `energy`.
pub fn initial_state(settings: &Settings, system: SystemId) -> CliResult<State<2>> {
    let (base, set) = explicit_state(settings, system)?;
    let model = system.model();
    model.check_domain(&base.q).at("ic")?;
    match closure(settings, system)? {
        None => Ok(base),
        Some((c, e)) => {
            if set.contains(&(2 + c)) {
                return Err(CliError::config(
                    "ic",
                    "sets the closure momentum, which the energy determines",
                ));
            }
            let s = solve_missing_momentum(model, &base, c, e).at("energy")?;
            energy(model, &s).at("energy")?;
            Ok(s)
        }
    }
}

pub fn workers(settings: &Settings) -> CliResult<Option<usize>> {
    match settings.count("workers")? {
        Some(0) => Err(CliError::config("workers", "must be at least 1")),
        w => Ok(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(text: &str) -> Settings {
        Settings::parse(text).unwrap()
    }

    fn field(e: CliError) -> String {
        match e {
            CliError::Config { field, .. } => field,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn closure_from_energy() {
        let s = settings("system = mhh\nic = x=0,y=-2.02,py=0\nenergy = 1/120\nclosure = px");
        let sys = system(&s).unwrap();
        let s0 = initial_state(&s, sys).unwrap();
        assert!((s0.p[0] - 2.175).abs() < 1e-3);
        assert_eq!(s0.q, [0.0, -2.02]);
    }

    #[test]
    fn errors_name_fields() {
        let sys = SystemId::ModifiedHenonHeiles;
        assert_eq!(
            field(initial_state(&settings("ic = z=1"), sys).unwrap_err()),
            "ic"
        );
        assert_eq!(
            field(initial_state(&settings("energy = 1"), sys).unwrap_err()),
            "closure"
        );
        assert_eq!(
            field(initial_state(&settings("energy = 1\nclosure = x"), sys).unwrap_err()),
            "closure"
        );
        assert_eq!(
            field(
                initial_state(&settings("ic = y=-0.0001\nenergy=1/120\nclosure=px"), sys)
                    .unwrap_err()
            ),
            "energy"
        );
        assert_eq!(
            field(system(&settings("system = kepler")).unwrap_err()),
            "system"
        );
        assert_eq!(
            field(time_grid(&settings("tau = 0.1\nsteps = 0")).unwrap_err()),
            "steps"
        );
        assert_eq!(
            field(time_grid(&settings("tau = -0.1\nsteps = 5")).unwrap_err()),
            "tau"
        );
    }

    #[test]
    fn unknown_scheme_lists_names() {
        let e = method(&settings("scheme = euler")).unwrap_err();
        let text = e.to_string();
        assert!(text.contains("scheme") && text.contains("omf4gp") && text.contains("rkf89"));
    }

    #[test]
    fn steps_from_t_end() {
        assert_eq!(
            time_grid(&settings("tau = 0.1\nt_end = 3000")).unwrap(),
            (0.1, 30000)
        );
    }
}

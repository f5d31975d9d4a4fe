//! A single handle over the splitting schemes and the reference integrators,
//! so diagnostics can run any of them on the same fixed output grid.

use crate::error::{Error, Result};
use crate::reference::{rk4_step, rk4_with, rkf89_with, AdaptiveControl};
use crate::scheme::{self, SchemeSpec};
use crate::state::{State, Trajectory};
use crate::stepper::{integrate_with, step};
use crate::system::{energy_unchecked, SystemModel};

/// Default local tolerance of the adaptive reference integrator.
pub const RKF_DEFAULT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Splitting(&'static SchemeSpec),
    Rk4,
    /// Adaptive steps, reporting a state every `tau`.
    Rkf89 {
        tol: f64,
    },
}

impl Method {
    /// Resolves a method name: the ten scheme names plus `rk4` and `rkf89`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "rk4" => Ok(Method::Rk4),
            "rkf89" => Ok(Method::Rkf89 {
                tol: RKF_DEFAULT_TOL,
            }),
            _ => scheme::lookup(name).map(Method::Splitting).map_err(|_| {
                Error::Parameter(format!(
                    "unknown method `{name}`; valid names: {}",
                    method_names().join(", ")
                ))
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Splitting(s) => s.name,
            Method::Rk4 => "rk4",
            Method::Rkf89 { .. } => "rkf89",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Method::Splitting(s) => s.label,
            Method::Rk4 => "RK4",
            Method::Rkf89 { .. } => "RKF8(9)",
        }
    }

    pub fn is_symplectic(&self) -> bool {
        matches!(self, Method::Splitting(_))
    }

    /// Advances by a single interval `h` (which may be shorter than the run's `tau`).
    pub fn single_step<const N: usize, S: SystemModel<N> + ?Sized>(
        &self,
        system: &S,
        s: &State<N>,
        h: f64,
    ) -> Result<State<N>> {
        match *self {
            Method::Splitting(sch) => step(sch, system, s, h),
            Method::Rk4 => rk4_step(system, s, h),
            Method::Rkf89 { tol } => {
                if h == 0.0 {
                    return Ok(*s);
                }
                if h < 0.0 {
                    return Err(Error::Parameter(
                        "adaptive reference steps forward only".into(),
                    ));
                }
                rkf89_with(
                    system,
                    s,
                    s.t + h,
                    AdaptiveControl::with_tol(tol),
                    &[],
                    |_| {},
                )
                .map_err(|(_, e)| e)
            }
        }
    }

    /// `n_steps` intervals of length `tau`, observing every node including `s0`.
    pub fn propagate<const N: usize, S, F>(
        &self,
        system: &S,
        s0: &State<N>,
        tau: f64,
        n_steps: usize,
        observe: F,
    ) -> std::result::Result<State<N>, (State<N>, Error)>
    where
        S: SystemModel<N> + ?Sized,
        F: FnMut(&State<N>),
    {
        match *self {
            Method::Splitting(sch) => integrate_with(sch, system, s0, tau, n_steps, observe),
            Method::Rk4 => rk4_with(system, s0, tau, n_steps, observe),
            Method::Rkf89 { tol } => {
                if n_steps == 0 {
                    let mut observe = observe;
                    observe(s0);
                    return Ok(*s0);
                }
                if !(tau > 0.0) {
                    return Err((
                        *s0,
                        Error::Parameter("adaptive reference needs tau > 0".into()),
                    ));
                }
                let times: Vec<f64> = (0..=n_steps).map(|k| s0.t + k as f64 * tau).collect();
                let t_end = *times.last().unwrap();
                rkf89_with(
                    system,
                    s0,
                    t_end,
                    AdaptiveControl::with_tol(tol),
                    &times,
                    observe,
                )
            }
        }
    }

    /// Trajectory sampled every `sample_every` intervals (endpoints included).
    pub fn trajectory<const N: usize, S: SystemModel<N> + ?Sized>(
        &self,
        system: &S,
        s0: &State<N>,
        tau: f64,
        n_steps: usize,
        sample_every: usize,
    ) -> Result<Trajectory<N>> {
        crate::stepper::check_run(s0, tau, n_steps, sample_every)?;
        system.check_domain(&s0.q)?;
        let mut traj = Trajectory::new();
        let mut count = 0usize;
        let res = self.propagate(system, s0, tau, n_steps, |s| {
            if count % sample_every == 0 || count == n_steps {
                traj.push(*s, energy_unchecked(system, s));
            }
            count += 1;
        });
        if let Err((last, e)) = res {
            if traj.last().map(|s| s.t) != Some(last.t) {
                traj.push(last, energy_unchecked(system, &last));
            }
            traj.error = Some(e);
        }
        Ok(traj)
    }
}

pub fn method_names() -> Vec<&'static str> {
    let mut v = scheme::scheme_names();
    v.extend(["rk4", "rkf89"]);
    v
}

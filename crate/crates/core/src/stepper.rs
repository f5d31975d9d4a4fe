//! Applying scheme tables to a system: kicks, single steps, and trajectories.

use crate::error::{Error, Result};
use crate::scheme::{SchemeSpec, Stage};
use crate::state::{State, Trajectory};
use crate::system::{energy_unchecked, k_flow, k_pp_unchecked, k_qpp_unchecked, SystemModel};

/// The adjusted force-gradient field
/// `D_i = sum_jk (2 V_{q_i q_j} V_{q_k} K_{p_j p_k} + V_{q_j} V_{q_k} K_{q_i p_j p_k})`.
pub fn d_field<const N: usize, S: SystemModel<N> + ?Sized>(system: &S, q: &[f64; N]) -> [f64; N] {
    let grad = system.potential_gradient(q);
    d_field_with_gradient(system, q, &grad)
}

fn d_field_with_gradient<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    q: &[f64; N],
    grad: &[f64; N],
) -> [f64; N] {
    let hess = system.potential_hessian(q);
    let kpp = k_pp_unchecked(system, q);
    let kqpp = k_qpp_unchecked(system, q);
    // w = K_pp V_q
    let mut w = [0.0; N];
    for j in 0..N {
        for k in 0..N {
            w[j] += kpp[j][k] * grad[k];
        }
    }
    let mut out = [0.0; N];
    for i in 0..N {
        let mut v = 0.0;
        for j in 0..N {
            v += 2.0 * hess[i][j] * w[j];
            for k in 0..N {
                v += grad[j] * grad[k] * kqpp[i][j][k];
            }
        }
        out[i] = v;
    }
    out
}

/// Momentum update `p <- p - kick V_q + grad_coef D`; coordinates untouched.
///
/// `kick` and `grad_coef` are the already scaled `d tau` and `g tau^3`.
pub fn grad_kick<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    s: &State<N>,
    kick: f64,
    grad_coef: f64,
) -> Result<State<N>> {
    s.ensure_finite()?;
    system.check_domain(&s.q)?;
    let grad = system.potential_gradient(&s.q);
    let mut out = *s;
    if grad_coef != 0.0 {
        let d = d_field_with_gradient(system, &s.q, &grad);
        for i in 0..N {
            out.p[i] += -kick * grad[i] + grad_coef * d[i];
        }
    } else {
        for i in 0..N {
            out.p[i] -= kick * grad[i];
        }
    }
    if out.p.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("momentum kick".into()));
    }
    Ok(out)
}

/// Advances `s` by one step of length `tau` (negative allowed).
///
/// Stages are applied in table order; time advances by exactly `tau`.
pub fn step<const N: usize, S: SystemModel<N> + ?Sized>(
    scheme: &SchemeSpec,
    system: &S,
    s: &State<N>,
    tau: f64,
) -> Result<State<N>> {
    let tau3 = tau * tau * tau;
    let mut cur = *s;
    for (idx, stage) in scheme.stages.iter().enumerate() {
        let res = match *stage {
            Stage::Drift { c } => k_flow(system, &cur, c * tau),
            Stage::Kick { d, g } => grad_kick(system, &cur, d * tau, g * tau3),
        };
        cur = res.map_err(|e| Error::Stage {
            scheme: scheme.name.to_string(),
            stage: idx,
            source: Box::new(e),
        })?;
    }
    cur.t = s.t + tau;
    Ok(cur)
}

/// Runs `n_steps` steps, calling `observe` with every state including `s0`.
///
/// Returns the last state reached; on failure the error carries the time of
/// the last good state.
pub fn integrate_with<const N: usize, S, F>(
    scheme: &SchemeSpec,
    system: &S,
    s0: &State<N>,
    tau: f64,
    n_steps: usize,
    mut observe: F,
) -> std::result::Result<State<N>, (State<N>, Error)>
where
    S: SystemModel<N> + ?Sized,
    F: FnMut(&State<N>),
{
    observe(s0);
    let mut cur = *s0;
    for k in 1..=n_steps {
        let mut next = match step(scheme, system, &cur, tau) {
            Ok(n) => n,
            Err(e) => return Err((cur, e)),
        };
        // keep time free of accumulated rounding
        next.t = s0.t + k as f64 * tau;
        observe(&next);
        cur = next;
    }
    Ok(cur)
}

/// Fixed-step trajectory sampled every `sample_every` steps; the initial and
/// final states are always included.
pub fn integrate<const N: usize, S: SystemModel<N> + ?Sized>(
    scheme: &SchemeSpec,
    system: &S,
    s0: &State<N>,
    tau: f64,
    n_steps: usize,
    sample_every: usize,
) -> Result<Trajectory<N>> {
    check_run(s0, tau, n_steps, sample_every)?;
    system.check_domain(&s0.q)?;
    let mut traj = Trajectory::new();
    let mut count = 0usize;
    let res = integrate_with(scheme, system, s0, tau, n_steps, |s| {
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

pub(crate) fn check_run<const N: usize>(
    s0: &State<N>,
    tau: f64,
    n_steps: usize,
    sample_every: usize,
) -> Result<()> {
    s0.ensure_finite()?;
    if n_steps == 0 {
        return Err(Error::Parameter("n_steps must be at least 1".into()));
    }
    if sample_every == 0 {
        return Err(Error::Parameter("sample_every must be at least 1".into()));
    }
    if !tau.is_finite() || tau == 0.0 {
        return Err(Error::Parameter(format!(
            "step size {tau} must be finite and non-zero"
        )));
    }
    Ok(())
}

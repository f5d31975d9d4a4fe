//! Non-symplectic reference integrators for the full Hamiltonian vector field:
//! classical fixed-step RK4 and an adaptive embedded Runge–Kutta–Fehlberg
//! 7(8) pair advanced with its eighth-order solution.

use crate::error::{Error, Result};
use crate::state::{State, Trajectory};
use crate::system::{energy_unchecked, vector_field, SystemModel};

fn deriv<const N: usize, S: SystemModel<N> + ?Sized>(system: &S, s: &State<N>) -> Result<State<N>> {
    system.check_domain(&s.q)?;
    let (dq, dp) = vector_field(system, &s.q, &s.p);
    Ok(State {
        q: dq,
        p: dp,
        t: 1.0,
    })
}

/// `base + sum_i w_i k_i`, with `h` folded into the weights by the caller.
fn combine<const N: usize>(base: &State<N>, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *base;
    for &(w, k) in terms {
        if w == 0.0 {
            continue;
        }
        for i in 0..N {
            out.q[i] += w * k.q[i];
            out.p[i] += w * k.p[i];
        }
        out.t += w * k.t;
    }
    out
}

/// One classical RK4 step.
pub fn rk4_step<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    s: &State<N>,
    h: f64,
) -> Result<State<N>> {
    let k1 = deriv(system, s)?;
    let k2 = deriv(system, &combine(s, &[(0.5 * h, &k1)]))?;
    let k3 = deriv(system, &combine(s, &[(0.5 * h, &k2)]))?;
    let k4 = deriv(system, &combine(s, &[(h, &k3)]))?;
    let h6 = h / 6.0;
    let mut out = combine(s, &[(h6, &k1), (2.0 * h6, &k2), (2.0 * h6, &k3), (h6, &k4)]);
    out.t = s.t + h;
    if !out.is_finite() {
        return Err(Error::Overflow("RK4 step".into()));
    }
    Ok(out)
}

/// RK4 over `n_steps` steps, calling `observe` on every state including `s0`.
pub fn rk4_with<const N: usize, S, F>(
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
        let mut next = match rk4_step(system, &cur, tau) {
            Ok(n) => n,
            Err(e) => return Err((cur, e)),
        };
        next.t = s0.t + k as f64 * tau;
        observe(&next);
        cur = next;
    }
    Ok(cur)
}

/// Fixed-step RK4 trajectory containing every step.
pub fn rk4_integrate<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    s0: &State<N>,
    tau: f64,
    n_steps: usize,
) -> Result<Trajectory<N>> {
    crate::stepper::check_run(s0, tau, n_steps, 1)?;
    system.check_domain(&s0.q)?;
    let mut traj = Trajectory::new();
    let res = rk4_with(system, s0, tau, n_steps, |s| {
        traj.push(*s, energy_unchecked(system, s))
    });
    if let Err((_, e)) = res {
        traj.error = Some(e);
    }
    Ok(traj)
}

// Fehlberg 7(8), 13 stages.
const C: [f64; 13] = [
    0.0,
    2.0 / 27.0,
    1.0 / 9.0,
    1.0 / 6.0,
    5.0 / 12.0,
    1.0 / 2.0,
    5.0 / 6.0,
    1.0 / 6.0,
    2.0 / 3.0,
    1.0 / 3.0,
    1.0,
    0.0,
    1.0,
];

const A: [[f64; 12]; 13] = [
    [0.0; 12],
    [2.0 / 27.0, 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
    [
        1.0 / 36.0,
        1.0 / 12.0,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
    ],
    [
        1.0 / 24.0,
        0.0,
        1.0 / 8.0,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
    ],
    [
        5.0 / 12.0,
        0.0,
        -25.0 / 16.0,
        25.0 / 16.0,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
    ],
    [
        1.0 / 20.0,
        0.0,
        0.0,
        1.0 / 4.0,
        1.0 / 5.0,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
    ],
    [
        -25.0 / 108.0,
        0.0,
        0.0,
        125.0 / 108.0,
        -65.0 / 27.0,
        125.0 / 54.0,
        0.,
        0.,
        0.,
        0.,
        0.,
        0.,
    ],
    [
        31.0 / 300.0,
        0.0,
        0.0,
        0.0,
        61.0 / 225.0,
        -2.0 / 9.0,
        13.0 / 900.0,
        0.,
        0.,
        0.,
        0.,
        0.,
    ],
    [
        2.0,
        0.0,
        0.0,
        -53.0 / 6.0,
        704.0 / 45.0,
        -107.0 / 9.0,
        67.0 / 90.0,
        3.0,
        0.,
        0.,
        0.,
        0.,
    ],
    [
        -91.0 / 108.0,
        0.0,
        0.0,
        23.0 / 108.0,
        -976.0 / 135.0,
        311.0 / 54.0,
        -19.0 / 60.0,
        17.0 / 6.0,
        -1.0 / 12.0,
        0.,
        0.,
        0.,
    ],
    [
        2383.0 / 4100.0,
        0.0,
        0.0,
        -341.0 / 164.0,
        4496.0 / 1025.0,
        -301.0 / 82.0,
        2133.0 / 4100.0,
        45.0 / 82.0,
        45.0 / 164.0,
        18.0 / 41.0,
        0.,
        0.,
    ],
    [
        3.0 / 205.0,
        0.0,
        0.0,
        0.0,
        0.0,
        -6.0 / 41.0,
        -3.0 / 205.0,
        -3.0 / 41.0,
        3.0 / 41.0,
        6.0 / 41.0,
        0.0,
        0.,
    ],
    [
        -1777.0 / 4100.0,
        0.0,
        0.0,
        -341.0 / 164.0,
        4496.0 / 1025.0,
        -289.0 / 82.0,
        2193.0 / 4100.0,
        51.0 / 82.0,
        33.0 / 164.0,
        12.0 / 41.0,
        0.0,
        1.0,
    ],
];

/// Eighth-order weights.
const B8: [f64; 13] = [
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    34.0 / 105.0,
    9.0 / 35.0,
    9.0 / 35.0,
    9.0 / 280.0,
    9.0 / 280.0,
    0.0,
    41.0 / 840.0,
    41.0 / 840.0,
];

/// Seventh-order weights (used only through the error estimate).
#[cfg(test)]
const B7: [f64; 13] = [
    41.0 / 840.0,
    0.0,
    0.0,
    0.0,
    0.0,
    34.0 / 105.0,
    9.0 / 35.0,
    9.0 / 35.0,
    9.0 / 280.0,
    9.0 / 280.0,
    41.0 / 840.0,
    0.0,
    0.0,
];

/// Step-size controller settings for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveControl {
    pub tol: f64,
    pub safety: f64,
    pub min_factor: f64,
    pub max_factor: f64,
    pub initial_step: f64,
}

impl AdaptiveControl {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            safety: 0.9,
            min_factor: 0.2,
            max_factor: 5.0,
            initial_step: 1e-3,
        }
    }
}

struct Trial<const N: usize> {
    state: State<N>,
    err: f64,
}

fn rkf78_trial<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    s: &State<N>,
    h: f64,
) -> Result<Trial<N>> {
    let mut k: [State<N>; 13] = [State::new([0.0; N], [0.0; N]); 13];
    for i in 0..13 {
        let mut y = *s;
        for (j, kj) in k.iter().enumerate().take(i) {
            let w = A[i][j];
            if w != 0.0 {
                for m in 0..N {
                    y.q[m] += h * w * kj.q[m];
                    y.p[m] += h * w * kj.p[m];
                }
            }
        }
        y.t = s.t + C[i] * h;
        k[i] = deriv(system, &y)?;
    }
    let mut out = *s;
    for (i, ki) in k.iter().enumerate() {
        let w = B8[i];
        if w != 0.0 {
            for m in 0..N {
                out.q[m] += h * w * ki.q[m];
                out.p[m] += h * w * ki.p[m];
            }
        }
    }
    out.t = s.t + h;
    // difference between the 8th- and 7th-order solutions
    let ew = 41.0 / 840.0 * h;
    let mut err: f64 = 0.0;
    for m in 0..N {
        let eq = ew * (k[0].q[m] + k[10].q[m] - k[11].q[m] - k[12].q[m]);
        let ep = ew * (k[0].p[m] + k[10].p[m] - k[11].p[m] - k[12].p[m]);
        err = err
            .max(eq.abs() / (1.0 + s.q[m].abs()))
            .max(ep.abs() / (1.0 + s.p[m].abs()));
    }
    if !out.is_finite() || !err.is_finite() {
        return Err(Error::Overflow("RKF step".into()));
    }
    Ok(Trial { state: out, err })
}

/// Adaptive integration from `s0.t` to `t_end`, calling `observe` at every
/// requested output time. Steps are shortened to land on output times
/// exactly, so every observed state is a genuine integration node.
pub fn rkf89_with<const N: usize, S, F>(
    system: &S,
    s0: &State<N>,
    t_end: f64,
    control: AdaptiveControl,
    output_times: &[f64],
    mut observe: F,
) -> std::result::Result<State<N>, (State<N>, Error)>
where
    S: SystemModel<N> + ?Sized,
    F: FnMut(&State<N>),
{
    let t0 = s0.t;
    if !(t_end > t0) || !(control.tol > 0.0) {
        return Err((
            *s0,
            Error::Parameter(format!(
                "need t_end > t0 and tol > 0 (t_end = {t_end}, tol = {})",
                control.tol
            )),
        ));
    }
    if output_times.windows(2).any(|w| !(w[1] > w[0]))
        || output_times.iter().any(|&t| t < t0 || t > t_end)
    {
        return Err((
            *s0,
            Error::Parameter("output times must be increasing and within [t0, t_end]".into()),
        ));
    }
    let mut outputs = output_times.iter().copied().peekable();
    while outputs.peek() == Some(&t0) {
        observe(s0);
        outputs.next();
    }

    let mut cur = *s0;
    let mut h = control.initial_step.min(t_end - t0);
    let order_exp = 1.0 / 8.0;
    loop {
        let target = outputs.peek().copied().unwrap_or(t_end);
        let remaining = target - cur.t;
        let clipped = h >= remaining;
        let h_try = if clipped { remaining } else { h };
        if h_try < 1e-14 * cur.t.abs().max(1.0) && !clipped {
            return Err((cur, Error::StepUnderflow { t: cur.t, h: h_try }));
        }
        let trial = match rkf78_trial(system, &cur, h_try) {
            Ok(t) => t,
            Err(Error::Domain(_)) | Err(Error::Overflow(_)) => {
                h *= control.min_factor;
                if h < 1e-14 * cur.t.abs().max(1.0) {
                    return Err((cur, Error::StepUnderflow { t: cur.t, h }));
                }
                continue;
            }
            Err(e) => return Err((cur, e)),
        };
        let factor = if trial.err == 0.0 {
            control.max_factor
        } else {
            (control.safety * (control.tol / trial.err).powf(order_exp))
                .clamp(control.min_factor, control.max_factor)
        };
        if trial.err <= control.tol {
            cur = trial.state;
            if clipped {
                cur.t = target;
                if outputs.peek().is_some() {
                    observe(&cur);
                    outputs.next();
                }
                if target == t_end && outputs.peek().is_none() {
                    return Ok(cur);
                }
                // a clipped step says nothing about the natural step length
                if factor > 1.0 {
                    h = h.max(h_try * factor);
                } else {
                    h = h_try * factor;
                }
            } else {
                h = h_try * factor;
            }
        } else {
            h = h_try * factor;
        }
    }
}

/// Adaptive trajectory sampled at `output_times` (plus `t_end` if missing).
pub fn rkf89_integrate<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    s0: &State<N>,
    t_end: f64,
    tol: f64,
    output_times: &[f64],
) -> Result<Trajectory<N>> {
    s0.ensure_finite()?;
    system.check_domain(&s0.q)?;
    let mut times = output_times.to_vec();
    if times.last() != Some(&t_end) {
        times.push(t_end);
    }
    let mut traj = Trajectory::new();
    let res = rkf89_with(
        system,
        s0,
        t_end,
        AdaptiveControl::with_tol(tol),
        &times,
        |s| traj.push(*s, energy_unchecked(system, s)),
    );
    match res {
        Ok(_) => Ok(traj),
        Err((_, e @ Error::Parameter(_))) => Err(e),
        Err((_, e)) => {
            traj.error = Some(e);
            Ok(traj)
        }
    }
}

/// `n` uniformly spaced times `t0 + k dt`, `k = 0..n`.
pub fn uniform_times(t0: f64, dt: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t0 + k as f64 * dt).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{Matrix, Tensor3};

    /// `H = (p^2 + q^2) / 2` in each of two independent degrees of freedom.
    struct Oscillator;

    impl SystemModel<2> for Oscillator {
        fn name(&self) -> &'static str {
            "osc"
        }
        fn coordinate_names(&self) -> [&'static str; 2] {
            ["x", "y"]
        }
        fn momentum_names(&self) -> [&'static str; 2] {
            ["px", "py"]
        }
        fn potential(&self, q: &[f64; 2]) -> f64 {
            0.5 * (q[0] * q[0] + q[1] * q[1])
        }
        fn potential_gradient(&self, q: &[f64; 2]) -> [f64; 2] {
            *q
        }
        fn potential_hessian(&self, _q: &[f64; 2]) -> Matrix<2> {
            [[1.0, 0.0], [0.0, 1.0]]
        }
        fn kinetic_matrix(&self, _q: &[f64; 2]) -> Matrix<2> {
            [[0.5, 0.0], [0.0, 0.5]]
        }
        fn kinetic_matrix_derivative(&self, _q: &[f64; 2]) -> Tensor3<2> {
            [[[0.0; 2]; 2]; 2]
        }
        fn kinetic_flow(&self, s: &State<2>, h: f64) -> Result<State<2>> {
            Ok(State {
                q: [s.q[0] + h * s.p[0], s.q[1] + h * s.p[1]],
                p: s.p,
                t: s.t + h,
            })
        }
    }

    #[test]
    fn fehlberg_tableau_is_consistent() {
        for i in 0..13 {
            let row: f64 = A[i].iter().sum();
            assert!((row - C[i]).abs() < 1e-14, "row {i}");
        }
        assert!((B8.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((B7.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // quadrature conditions sum b c^k = 1/(k+1) up to k = 7
        for k in 0..8 {
            let s: f64 = B8.iter().zip(C.iter()).map(|(b, c)| b * c.powi(k)).sum();
            assert!((s - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k = {k}");
        }
    }

    fn fixed_step_error(h: f64) -> f64 {
        let mut s = State::new([1.0, 0.0], [0.0, 1.0]);
        let n = (2.0 / h).round() as usize;
        for _ in 0..n {
            s = rkf78_trial(&Oscillator, &s, h).unwrap().state;
        }
        let t = n as f64 * h;
        ((s.q[0] - t.cos()).powi(2) + (s.p[0] + t.sin()).powi(2)).sqrt()
    }

    #[test]
    fn eighth_order_convergence() {
        let e1 = fixed_step_error(0.4);
        let e2 = fixed_step_error(0.2);
        let slope = (e1 / e2).log2();
        assert!(slope > 7.5 && slope < 9.5, "slope {slope}");
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        let run = |h: f64| {
            let n = (2.0 / h).round() as usize;
            let tr = rk4_integrate(&Oscillator, &State::new([1.0, 0.0], [0.0, 1.0]), h, n).unwrap();
            let s = tr.last().unwrap();
            (s.q[0] - 2f64.cos()).abs()
        };
        let slope = (run(0.1) / run(0.05)).log2();
        assert!((slope - 4.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn adaptive_hits_requested_times() {
        let times = uniform_times(0.0, 0.5, 20);
        let tr = rkf89_integrate(
            &Oscillator,
            &State::new([1.0, 0.0], [0.0, 1.0]),
            10.0,
            1e-13,
            &times,
        )
        .unwrap();
        assert_eq!(tr.times(), times);
        for s in &tr.states {
            assert!((s.q[0] - s.t.cos()).abs() < 1e-11);
            assert!((s.q[1] - s.t.sin()).abs() < 1e-11);
        }
    }

    #[test]
    fn adaptive_rejects_bad_output_times() {
        let s0 = State::new([1.0, 0.0], [0.0, 1.0]);
        assert!(rkf89_integrate(&Oscillator, &s0, 1.0, 1e-10, &[0.5, 0.2]).is_err());
        assert!(rkf89_integrate(&Oscillator, &s0, 1.0, 0.0, &[]).is_err());
    }
}

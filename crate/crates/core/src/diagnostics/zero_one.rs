//! The 0-1 test for chaos on a sampled observable `psi(t)`:
//! `theta(t) = c t + int psi`, `q(t) = int psi cos(theta)`, the mean-square
//! displacement `L(t) = <[q(t + s) - q(s)]^2>_s` over a window of length `T`,
//! and its log-log growth rate `Lambda` (near 0 regular, near 1 chaotic).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::integrator::Method;
use crate::state::State;
use crate::system::SystemModel;

/// Default driving frequency.
pub const DEFAULT_C: f64 = 1.8;
/// `Lambda` at or above this is classified chaotic.
pub const ZERO_ONE_MIDPOINT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CChoice {
    Fixed(f64),
    /// Median `Lambda` over `count` frequencies drawn uniformly from `(0.5, pi - 0.5)`.
    RandomMedian {
        count: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroOneConfig {
    pub c: CChoice,
    /// Number of lags `t` in `[t_max / 10, t_max]` used in the regression.
    pub lags: usize,
    /// Upper bound on the number of window offsets `s` averaged per lag.
    pub max_offsets: usize,
}

impl Default for ZeroOneConfig {
    fn default() -> Self {
        Self {
            c: CChoice::Fixed(DEFAULT_C),
            lags: 100,
            max_offsets: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroOneResult {
    pub lambda: f64,
    /// `(t, ln L(t))` pairs used in the fit.
    pub curve: Vec<(f64, f64)>,
    pub points_used: usize,
    /// Root-mean-square residual of the straight-line fit.
    pub fit_residual: f64,
    /// The mean-square displacement vanished identically.
    pub degenerate: bool,
    pub c_values: Vec<f64>,
    pub t_max: f64,
    pub window: f64,
    pub dt: f64,
}

impl ZeroOneResult {
    pub fn is_chaotic(&self) -> bool {
        self.lambda >= ZERO_ONE_MIDPOINT
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum();
    (slope, icpt, (rss / n).sqrt())
}

struct SingleC {
    lambda: f64,
    curve: Vec<(f64, f64)>,
    residual: f64,
    degenerate: bool,
}

fn lambda_for_c(
    psi: &[f64],
    dt: f64,
    t_max: f64,
    window: f64,
    c: f64,
    cfg: &ZeroOneConfig,
) -> SingleC {
    // trapezoid rule on the sample grid
    let n = psi.len();
    let mut theta = vec![0.0; n];
    let mut q = vec![0.0; n];
    for k in 1..n {
        theta[k] = theta[k - 1] + c * dt + 0.5 * dt * (psi[k - 1] + psi[k]);
        q[k] = q[k - 1] + 0.5 * dt * (psi[k - 1] * theta[k - 1].cos() + psi[k] * theta[k].cos());
    }
    let lag_max = (t_max / dt).round() as usize;
    let lag_min = ((t_max / 10.0) / dt).round().max(1.0) as usize;
    let offsets = (window / dt).round() as usize;
    let stride = offsets.div_ceil(cfg.max_offsets).max(1);
    let n_lags = cfg.lags.max(2);
    let mut lags: Vec<usize> = (0..n_lags)
        .map(|i| {
            lag_min + ((lag_max - lag_min) as f64 * i as f64 / (n_lags - 1) as f64).round() as usize
        })
        .collect();
    lags.dedup();

    let mut curve = Vec::with_capacity(lags.len());
    let mut degenerate = false;
    for &lag in &lags {
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut s = 0usize;
        while s <= offsets && s + lag < n {
            let d = q[s + lag] - q[s];
            sum += d * d;
            count += 1;
            s += stride;
        }
        let msd = sum / count as f64;
        if !(msd > 0.0) {
            degenerate = true;
            break;
        }
        curve.push((lag as f64 * dt, msd.ln()));
    }
    if degenerate || curve.len() < 2 {
        return SingleC {
            lambda: 0.0,
            curve: Vec::new(),
            residual: 0.0,
            degenerate: true,
        };
    }
    let xs: Vec<f64> = curve.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = curve.iter().map(|(_, l)| *l).collect();
    let (slope, _, residual) = least_squares(&xs, &ys);
    SingleC {
        lambda: slope,
        curve,
        residual,
        degenerate: false,
    }
}

/// Runs the test on an observable sampled every `dt` starting at `t = 0`.
///
/// The series must cover `window + t_max`.
pub fn zero_one_series(
    psi: &[f64],
    dt: f64,
    t_max: f64,
    window: f64,
    config: &ZeroOneConfig,
) -> Result<ZeroOneResult> {
    if !(dt > 0.0) || !(t_max > 0.0) {
        return Err(Error::Parameter("need dt > 0 and t_max > 0".into()));
    }
    if !(window >= t_max) {
        return Err(Error::Parameter(format!(
            "averaging window T = {window} is too small to estimate L at t_max = {t_max}"
        )));
    }
    if ((t_max / 10.0) / dt).round() < 1.0 {
        return Err(Error::Parameter(
            "t_max / 10 is shorter than one sample".into(),
        ));
    }
    let needed = ((window + t_max) / dt).round() as usize + 1;
    if psi.len() < needed {
        return Err(Error::Parameter(format!(
            "series has {} samples, T + t_max needs {needed}",
            psi.len()
        )));
    }
    if psi.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("observable series".into()));
    }
    let psi = &psi[..needed];
    let c_values: Vec<f64> = match config.c {
        CChoice::Fixed(c) => {
            if !(c > 0.0) {
                return Err(Error::Parameter(format!("c = {c} must be positive")));
            }
            vec![c]
        }
        CChoice::RandomMedian { count, seed } => {
            if count == 0 {
                return Err(Error::Parameter("random-c mode needs count >= 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| rng.gen_range(0.5..std::f64::consts::PI - 0.5))
                .collect()
        }
    };
    let mut runs: Vec<(f64, SingleC)> = c_values
        .iter()
        .map(|&c| (c, lambda_for_c(psi, dt, t_max, window, c, config)))
        .collect();
    runs.sort_by(|a, b| a.1.lambda.total_cmp(&b.1.lambda));
    let median = runs.swap_remove(runs.len() / 2).1;
    Ok(ZeroOneResult {
        lambda: median.lambda,
        points_used: median.curve.len(),
        curve: median.curve,
        fit_residual: median.residual,
        degenerate: median.degenerate,
        c_values,
        t_max,
        window,
        dt,
    })
}

/// Integrates `T + t_max` from `s0` with step `tau` and applies the test to
/// `observable` sampled at every step.
#[allow(clippy::too_many_arguments)]
pub fn zero_one_test<const N: usize, S, F>(
    method: &Method,
    system: &S,
    s0: &State<N>,
    tau: f64,
    t_max: f64,
    window: f64,
    observable: F,
    config: &ZeroOneConfig,
) -> Result<ZeroOneResult>
where
    S: SystemModel<N> + ?Sized,
    F: Fn(&State<N>) -> f64,
{
    if !(tau > 0.0) {
        return Err(Error::Parameter("tau must be positive".into()));
    }
    if !(window >= t_max) || !(t_max > 0.0) {
        return Err(Error::Parameter(format!(
            "averaging window T = {window} is too small to estimate L at t_max = {t_max}"
        )));
    }
    let n_steps = ((window + t_max) / tau).round() as usize;
    let mut psi = Vec::with_capacity(n_steps + 1);
    method
        .propagate(system, s0, tau, n_steps, |s| psi.push(observable(s)))
        .map_err(|(_, e)| e)?;
    zero_one_series(&psi, tau, t_max, window, config)
}

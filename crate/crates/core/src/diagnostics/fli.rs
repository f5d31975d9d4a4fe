//! Fast Lyapunov indicator from the separation of two nearby orbits,
//! `FLI(t) = log10(d(t) / d(0))`, with renormalization of the shadow orbit
//! so that exponential growth can be followed far beyond double-precision
//! range.

use crate::error::{Error, Result};
use crate::integrator::Method;
use crate::state::State;
use crate::system::{vector_field, SystemModel};

/// Threshold separating ordered (below) from chaotic (above) orbits.
pub const FLI_CHAOS_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FliConfig {
    /// Initial separation.
    pub d0: f64,
    /// Phase-space direction of the initial offset; normalized all-ones when `None`.
    pub direction: Option<Vec<f64>>,
    /// Remove the component of the direction along the energy gradient, so the
    /// shadow starts on the same energy surface to first order.
    pub tangent_to_energy: bool,
    /// Separation ratio `d / d0` that triggers a pull-back of the shadow orbit.
    pub renorm_ratio: f64,
    /// Record every this many steps (the final step is always recorded).
    pub sample_every: usize,
}

impl Default for FliConfig {
    fn default() -> Self {
        Self {
            d0: 1e-8,
            direction: None,
            tangent_to_energy: false,
            renorm_ratio: 1e6,
            sample_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FliResult {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub renormalizations: usize,
}

impl FliResult {
    pub fn final_value(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }
}

fn unit_direction<const N: usize>(direction: &Option<Vec<f64>>) -> Result<Vec<f64>> {
    let dir = match direction {
        Some(d) => d.clone(),
        None => vec![1.0; 2 * N],
    };
    if dir.len() != 2 * N {
        return Err(Error::Parameter(format!(
            "deviation direction has {} components, expected {}",
            dir.len(),
            2 * N
        )));
    }
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Parameter(
            "deviation direction must be non-zero".into(),
        ));
    }
    Ok(dir.into_iter().map(|v| v / norm).collect())
}

/// Runs the base orbit from `s0` and a shadow from `s0 + d0 * direction`
/// with the same method and step, returning the FLI history.
pub fn fli<const N: usize, S: SystemModel<N> + ?Sized>(
    method: &Method,
    system: &S,
    s0: &State<N>,
    tau: f64,
    t_end: f64,
    config: &FliConfig,
) -> Result<FliResult> {
    if !(config.d0 > 0.0) || !config.d0.is_finite() {
        return Err(Error::Parameter(format!(
            "initial separation d0 = {} must be positive",
            config.d0
        )));
    }
    if !(config.renorm_ratio > 1.0) || config.sample_every == 0 {
        return Err(Error::Parameter(
            "renorm_ratio must exceed 1 and sample_every be >= 1".into(),
        ));
    }
    if !(tau > 0.0) || !(t_end > s0.t) {
        return Err(Error::Parameter("need tau > 0 and t_end > t0".into()));
    }
    let mut dir = unit_direction::<N>(&config.direction)?;
    if config.tangent_to_energy {
        s0.ensure_finite()?;
        system.check_domain(&s0.q)?;
        let (dq, dp) = vector_field(system, &s0.q, &s0.p);
        // phase-space gradient of H is (-dp/dt, dq/dt)
        let grad: Vec<f64> = dp.iter().map(|v| -v).chain(dq).collect();
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2 > 0.0 {
            let along = dir.iter().zip(&grad).map(|(d, g)| d * g).sum::<f64>() / g2;
            for (d, g) in dir.iter_mut().zip(&grad) {
                *d -= along * g;
            }
            dir = unit_direction::<N>(&Some(dir))?;
        }
    }
    let mut shadow = *s0;
    for (i, d) in dir.iter().enumerate() {
        *shadow.component_mut(i) += config.d0 * d;
    }
    fli_pair(method, system, s0, &shadow, tau, t_end, config)
}

/// FLI for an explicit pair of initial states; their distance is `d(0)`.
pub fn fli_pair<const N: usize, S: SystemModel<N> + ?Sized>(
    method: &Method,
    system: &S,
    base0: &State<N>,
    shadow0: &State<N>,
    tau: f64,
    t_end: f64,
    config: &FliConfig,
) -> Result<FliResult> {
    let d_start = base0.distance(shadow0);
    if !(d_start > 0.0) {
        return Err(Error::Parameter("initial separation d(0) is zero".into()));
    }
    system.check_domain(&base0.q)?;
    system.check_domain(&shadow0.q)?;
    let n_steps = ((t_end - base0.t) / tau).round() as usize;
    let mut base = *base0;
    let mut shadow = *shadow0;
    let mut acc = 0.0;
    let mut renorms = 0;
    let mut times = vec![base.t];
    let mut values = vec![0.0];
    for k in 1..=n_steps {
        base = method.single_step(system, &base, tau)?;
        shadow = method.single_step(system, &shadow, tau)?;
        base.t = base0.t + k as f64 * tau;
        shadow.t = base.t;
        let d = base.distance(&shadow);
        if !d.is_finite() {
            return Err(Error::Overflow("orbit separation".into()));
        }
        let ratio = d / d_start;
        if ratio > config.renorm_ratio {
            acc += ratio.log10();
            renorms += 1;
            let scale = d_start / d;
            for i in 0..2 * N {
                let delta = shadow.component(i) - base.component(i);
                *shadow.component_mut(i) = base.component(i) + delta * scale;
            }
        }
        if k % config.sample_every == 0 || k == n_steps {
            let current = base.distance(&shadow) / d_start;
            times.push(base.t);
            values.push(acc + current.log10());
        }
    }
    Ok(FliResult {
        times,
        values,
        renormalizations: renorms,
    })
}

//! Surface-of-section crossings `q_c = 0` (mod 2 pi for angles) with `p_m > 0`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::integrator::Method;
use crate::state::State;
use crate::system::SystemModel;

/// Accepted distance of a refined point from the section.
pub const SECTION_TOL: f64 = 1e-10;
pub const MAX_BISECTIONS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionSpec {
    /// Index of the coordinate that vanishes on the section.
    pub coordinate: usize,
    /// Index of the momentum required to be positive.
    pub momentum: usize,
    /// Whether the coordinate is an angle (crossings of any multiple of 2 pi count).
    pub angular: bool,
}

impl SectionSpec {
    /// Section through `q_c = 0` with `p_c > 0`, honoring the model's angle flags.
    pub fn for_coordinate<const N: usize, S: SystemModel<N> + ?Sized>(
        system: &S,
        coordinate: usize,
    ) -> Self {
        Self {
            coordinate,
            momentum: coordinate,
            angular: system.angular_coordinates()[coordinate],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionPoints<const N: usize> {
    pub spec: SectionSpec,
    /// Refined crossing states; angular section coordinates are reduced to (-pi, pi].
    pub points: Vec<State<N>>,
    /// Crossings dropped because bisection did not reach the tolerance.
    pub failed_refinements: usize,
}

impl<const N: usize> SectionPoints<N> {
    /// Re-checks the defining constraints of every stored point.
    pub fn all_on_section(&self) -> bool {
        self.points.iter().all(|s| {
            s.q[self.spec.coordinate].abs() <= SECTION_TOL && s.p[self.spec.momentum] > 0.0
        })
    }
}

fn branch_target(spec: &SectionSpec, a: f64, b: f64) -> f64 {
    if !spec.angular {
        return 0.0;
    }
    let hi = a.max(b);
    (hi / TAU).floor() * TAU
}

/// Integrates to `t_end` and collects the section crossings. Each crossing is
/// refined by bisecting the length of a partial step taken from the state
/// before the crossing, so refined points lie on the numerical flow.
pub fn poincare_section<const N: usize, S: SystemModel<N> + ?Sized>(
    method: &Method,
    system: &S,
    s0: &State<N>,
    tau: f64,
    t_end: f64,
    spec: SectionSpec,
) -> Result<SectionPoints<N>> {
    if spec.coordinate >= N || spec.momentum >= N {
        return Err(Error::Parameter("section index out of range".into()));
    }
    if !(tau > 0.0) || !(t_end > s0.t) {
        return Err(Error::Parameter("need tau > 0 and t_end > t0".into()));
    }
    let n_steps = ((t_end - s0.t) / tau).round() as usize;
    let c = spec.coordinate;
    let mut out = SectionPoints {
        spec,
        points: Vec::new(),
        failed_refinements: 0,
    };
    let mut prev: Option<State<N>> = None;
    let mut left_section = false;
    let mut inner_error: Option<Error> = None;

    let res = method.propagate(system, s0, tau, n_steps, |next| {
        if inner_error.is_some() {
            return;
        }
        let wrap_now = branch_target(&spec, next.q[c], next.q[c]);
        let near = if spec.angular {
            (next.q[c] - wrap_now)
                .abs()
                .min((next.q[c] - wrap_now - TAU).abs())
        } else {
            next.q[c].abs()
        };
        if near > SECTION_TOL {
            left_section = true;
        }
        if let Some(a) = prev {
            let target = branch_target(&spec, a.q[c], next.q[c]);
            let fa = a.q[c] - target;
            let fb = next.q[c] - target;
            if (fa < 0.0) != (fb < 0.0) {
                match refine(method, system, &a, fa, next.t - a.t, c, target) {
                    Ok(Some(mut hit)) => {
                        hit.q[c] -= target;
                        if hit.p[spec.momentum] > 0.0 {
                            out.points.push(hit);
                        }
                    }
                    Ok(None) => out.failed_refinements += 1,
                    Err(e) => inner_error = Some(e),
                }
            }
        }
        prev = Some(*next);
    });
    if let Some(e) = inner_error {
        return Err(e);
    }
    res.map_err(|(_, e)| e)?;
    if !left_section {
        return Err(Error::Degenerate(
            "orbit never leaves the section surface".into(),
        ));
    }
    Ok(out)
}

fn refine<const N: usize, S: SystemModel<N> + ?Sized>(
    method: &Method,
    system: &S,
    before: &State<N>,
    f_before: f64,
    h: f64,
    c: usize,
    target: f64,
) -> Result<Option<State<N>>> {
    let (mut lo, mut hi) = (0.0, h);
    let below = f_before < 0.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let s = method.single_step(system, before, mid)?;
        let f = s.q[c] - target;
        if f.abs() <= SECTION_TOL {
            return Ok(Some(s));
        }
        if (f < 0.0) == below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(None)
}

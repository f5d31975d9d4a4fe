//! One-dimensional initial-condition sweeps of a chaos indicator.
//!
//! Points run in parallel and land in pre-indexed slots, so the result does
//! not depend on the number of workers or on scheduling order.

use std::time::Instant;

use rayon::prelude::*;

use crate::diagnostics::{fli, zero_one_test, CChoice, FliConfig, ZeroOneConfig};
use crate::error::{Error, Result};
use crate::integrator::Method;
use crate::models::SystemId;
use crate::state::State;
use crate::system::solve_missing_momentum;

/// Closed, uniformly spaced grid including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        let g = Self { start, stop, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Parameter(format!(
                "grid count must be at least 2, got {}",
                self.count
            )));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Parameter("grid endpoints must be finite".into()));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.stop;
        }
        self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Indicator {
    /// Final fast Lyapunov indicator after `t_end`.
    Fli {
        tau: f64,
        t_end: f64,
        threshold: f64,
        d0: f64,
        /// Start the shadow orbit on the energy surface of the base orbit.
        tangent: bool,
    },
    /// 0-1 test growth rate of the phase component `observable`.
    ZeroOne {
        tau: f64,
        t_max: f64,
        window: f64,
        threshold: f64,
        c: CChoice,
        observable: usize,
    },
}

impl Indicator {
    pub fn fli(tau: f64, t_end: f64) -> Self {
        Indicator::Fli {
            tau,
            t_end,
            threshold: crate::diagnostics::FLI_CHAOS_THRESHOLD,
            d0: FliConfig::default().d0,
            tangent: false,
        }
    }

    pub fn zero_one(tau: f64, t_max: f64, window: f64, observable: usize) -> Self {
        Indicator::ZeroOne {
            tau,
            t_max,
            window,
            threshold: crate::diagnostics::ZERO_ONE_MIDPOINT,
            c: CChoice::Fixed(crate::diagnostics::DEFAULT_C),
            observable,
        }
    }

    pub fn threshold(&self) -> f64 {
        match *self {
            Indicator::Fli { threshold, .. } | Indicator::ZeroOne { threshold, .. } => threshold,
        }
    }

    pub fn with_threshold(mut self, value: f64) -> Self {
        match &mut self {
            Indicator::Fli { threshold, .. } | Indicator::ZeroOne { threshold, .. } => {
                *threshold = value
            }
        }
        self
    }

    pub fn name(&self) -> &'static str {
        match self {
            Indicator::Fli { .. } => "fli",
            Indicator::ZeroOne { .. } => "zero_one",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub system: SystemId,
    pub method: Method,
    /// Swept phase component, indexed as `(q..., p...)`.
    pub variable: usize,
    pub grid: Grid,
    /// Multiplier from grid units to the variable (e.g. pi for angles given in units of pi).
    pub unit: f64,
    /// Values of all components not set by the sweep or the closure.
    pub base: State<2>,
    /// Energy used to solve for the closure momentum; `None` keeps `base`'s momenta.
    pub energy: Option<f64>,
    /// Momentum index (0..N) determined from the energy.
    pub closure: usize,
    pub indicator: Indicator,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.variable >= 4 {
            return Err(Error::Parameter(format!(
                "swept variable index {} out of range",
                self.variable
            )));
        }
        if self.closure >= 2 {
            return Err(Error::Parameter(format!(
                "closure index {} out of range",
                self.closure
            )));
        }
        if self.energy.is_some() && self.variable == 2 + self.closure {
            return Err(Error::Parameter(
                "swept variable coincides with the closure momentum".into(),
            ));
        }
        if !(self.unit.is_finite() && self.unit != 0.0) {
            return Err(Error::Parameter(
                "grid unit must be finite and nonzero".into(),
            ));
        }
        match self.indicator {
            Indicator::Fli {
                tau,
                t_end,
                threshold,
                d0,
                ..
            } => {
                if !(tau > 0.0 && t_end > 0.0 && d0 > 0.0 && threshold.is_finite()) {
                    return Err(Error::Parameter(
                        "fli needs tau, t_end, d0 > 0 and a finite threshold".into(),
                    ));
                }
            }
            Indicator::ZeroOne {
                tau,
                t_max,
                window,
                threshold,
                observable,
                ..
            } => {
                if !(tau > 0.0 && t_max > 0.0 && window >= t_max && threshold.is_finite()) {
                    return Err(Error::Parameter(
                        "zero-one needs tau, t_max > 0, window >= t_max and a finite threshold"
                            .into(),
                    ));
                }
                if observable >= 4 {
                    return Err(Error::Parameter(format!(
                        "observable index {observable} out of range"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Initial state of grid point `i`.
    pub fn initial_state(&self, i: usize) -> Result<State<2>> {
        let mut s = self.base;
        *s.component_mut(self.variable) = self.grid.value(i) * self.unit;
        let model = self.system.model();
        model.check_domain(&s.q)?;
        match self.energy {
            Some(e) => solve_missing_momentum(model, &s, self.closure, e),
            None => Ok(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Ordered,
    Chaotic,
    Infeasible,
    Failed,
}

impl Classification {
    /// Values at or above the threshold are chaotic.
    pub fn from_value(value: f64, threshold: f64) -> Self {
        if value >= threshold {
            Classification::Chaotic
        } else {
            Classification::Ordered
        }
    }

    pub fn is_valid(self) -> bool {
        matches!(self, Classification::Ordered | Classification::Chaotic)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Ordered => "ordered",
            Classification::Chaotic => "chaotic",
            Classification::Infeasible => "infeasible",
            Classification::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    /// Grid value in grid units.
    pub value: f64,
    pub indicator: Option<f64>,
    pub class: Classification,
    /// Why the point is infeasible or failed.
    pub message: Option<String>,
    /// Wall-clock seconds, informational.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub spec: ScanSpec,
    pub points: Vec<ScanPoint>,
}

impl ScanResult {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn classes(&self) -> Vec<Classification> {
        self.points.iter().map(|p| p.class).collect()
    }

    pub fn count(&self, class: Classification) -> usize {
        self.points.iter().filter(|p| p.class == class).count()
    }

    /// Re-applies a different threshold to the stored indicator values.
    pub fn reclassify(&self, threshold: f64) -> Self {
        let mut out = self.clone();
        out.spec.indicator = out.spec.indicator.with_threshold(threshold);
        for p in &mut out.points {
            if let (Some(v), true) = (p.indicator, p.class.is_valid()) {
                p.class = Classification::from_value(v, threshold);
            }
        }
        out
    }

    /// Equal up to the informational timings.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.spec == other.spec
            && self.points.len() == other.points.len()
            && self.points.iter().zip(&other.points).all(|(a, b)| {
                a.value.to_bits() == b.value.to_bits()
                    && a.indicator.map(f64::to_bits) == b.indicator.map(f64::to_bits)
                    && a.class == b.class
                    && a.message == b.message
            })
    }
}

fn evaluate(spec: &ScanSpec, s0: &State<2>) -> Result<f64> {
    let model = spec.system.model();
    match spec.indicator {
        Indicator::Fli {
            tau,
            t_end,
            d0,
            tangent,
            ..
        } => {
            let cfg = FliConfig {
                d0,
                tangent_to_energy: tangent,
                sample_every: usize::MAX,
                ..FliConfig::default()
            };
            Ok(fli(&spec.method, model, s0, tau, t_end, &cfg)?.final_value())
        }
        Indicator::ZeroOne {
            tau,
            t_max,
            window,
            c,
            observable,
            ..
        } => {
            let cfg = ZeroOneConfig {
                c,
                ..ZeroOneConfig::default()
            };
            let r = zero_one_test(
                &spec.method,
                model,
                s0,
                tau,
                t_max,
                window,
                |s| s.component(observable),
                &cfg,
            )?;
            Ok(r.lambda)
        }
    }
}

fn run_point(spec: &ScanSpec, i: usize) -> ScanPoint {
    let start = Instant::now();
    let value = spec.grid.value(i);
    let (indicator, class, message) = match spec.initial_state(i) {
        Err(e @ (Error::InfeasibleEnergy { .. } | Error::Domain(_))) => {
            (None, Classification::Infeasible, Some(e.to_string()))
        }
        Err(e) => (None, Classification::Failed, Some(e.to_string())),
        Ok(s0) => match evaluate(spec, &s0) {
            Ok(v) if v.is_finite() => (
                Some(v),
                Classification::from_value(v, spec.indicator.threshold()),
                None,
            ),
            Ok(v) => (
                None,
                Classification::Failed,
                Some(format!("indicator evaluated to {v}")),
            ),
            Err(e) => (None, Classification::Failed, Some(e.to_string())),
        },
    };
    ScanPoint {
        value,
        indicator,
        class,
        message,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs every grid point; `workers` caps the parallel width (`None` uses the
/// global pool). Per-point failures are recorded, never propagated.
pub fn run_scan(spec: &ScanSpec, workers: Option<usize>) -> Result<ScanResult> {
    spec.validate()?;
    let work = || -> Vec<ScanPoint> {
        (0..spec.grid.count)
            .into_par_iter()
            .map(|i| run_point(spec, i))
            .collect()
    };
    let points = match workers {
        None => work(),
        Some(0) => return Err(Error::Parameter("workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Parameter(format!("cannot build worker pool: {e}")))?
            .install(work),
    };
    Ok(ScanResult {
        spec: spec.clone(),
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agreement {
    /// Points valid in both scans.
    pub valid: usize,
    pub agreeing: usize,
}

impl Agreement {
    /// `None` when no point is valid in both scans.
    pub fn fraction(&self) -> Option<f64> {
        (self.valid > 0).then(|| self.agreeing as f64 / self.valid as f64)
    }
}

/// Per-point classification agreement between two scans over the same grid.
pub fn compare_indicators(a: &ScanResult, b: &ScanResult) -> Result<Agreement> {
    if a.points.len() != b.points.len()
        || a.points.iter().zip(&b.points).any(|(x, y)| {
            (x.value * a.spec.unit - y.value * b.spec.unit).abs() > 1e-12 * (1.0 + x.value.abs())
        })
    {
        return Err(Error::GridMismatch("scans cover different grids".into()));
    }
    let mut out = Agreement {
        valid: 0,
        agreeing: 0,
    };
    for (x, y) in a.points.iter().zip(&b.points) {
        if x.class.is_valid() && y.class.is_valid() {
            out.valid += 1;
            if x.class == y.class {
                out.agreeing += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::lookup;

    fn mhh_spec(count: usize) -> ScanSpec {
        ScanSpec {
            system: SystemId::ModifiedHenonHeiles,
            method: Method::Splitting(lookup("omf4gp").unwrap()),
            variable: 1,
            grid: Grid::new(-2.3, -0.95, count).unwrap(),
            unit: 1.0,
            base: State::new([0.0, 0.0], [0.0, 0.0]),
            energy: Some(1.0 / 120.0),
            closure: 0,
            indicator: Indicator::fli(0.1, 100.0),
        }
    }

    #[test]
    fn grid_is_inclusive() {
        let g = Grid::new(0.0, 2.5, 6).unwrap();
        assert_eq!(g.values(), vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5]);
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::new(f64::NAN, 1.0, 3).is_err());
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let spec = mhh_spec(8);
        let a = run_scan(&spec, Some(1)).unwrap();
        let b = run_scan(&spec, Some(4)).unwrap();
        assert!(a.same_outcome(&b));
        assert_eq!(a.values(), spec.grid.values());
        assert!(a.points.iter().all(|p| p.class.is_valid()));
    }

    #[test]
    fn raising_threshold_never_creates_chaos() {
        let r = run_scan(&mhh_spec(6), None).unwrap();
        let mut last = r.reclassify(f64::NEG_INFINITY).classes();
        for th in [0.0, 1.0, 2.0, 4.0, 8.0, 1e3] {
            let next = r.reclassify(th).classes();
            for (a, b) in last.iter().zip(&next) {
                assert!(!(*a == Classification::Ordered && *b == Classification::Chaotic));
            }
            last = next;
        }
        for p in &r.points {
            if p.class == Classification::Chaotic {
                assert!(p.indicator.unwrap() >= r.spec.indicator.threshold());
            }
        }
    }

    #[test]
    fn infeasible_points_are_recorded() {
        let mut spec = mhh_spec(2);
        // V exceeds E everywhere on this stretch of the y axis
        spec.grid = Grid::new(0.5, 0.9, 2).unwrap();
        let r = run_scan(&spec, None).unwrap();
        assert_eq!(r.count(Classification::Infeasible), 2);
        assert_eq!(compare_indicators(&r, &r).unwrap().fraction(), None);
    }

    #[test]
    fn self_agreement_and_mismatch() {
        let r = run_scan(&mhh_spec(4), None).unwrap();
        assert_eq!(compare_indicators(&r, &r).unwrap().fraction(), Some(1.0));
        let other = run_scan(&mhh_spec(5), None).unwrap();
        assert!(matches!(
            compare_indicators(&r, &other),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn closure_conflict_rejected() {
        let mut spec = mhh_spec(3);
        spec.variable = 2;
        assert!(run_scan(&spec, None).is_err());
    }
}

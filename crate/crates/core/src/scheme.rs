//! Splitting-scheme coefficient tables.
//!
//! A scheme is a palindromic string of drift stages `exp(c tau A)` and
//! (gradient) kick stages `exp(d tau B + g tau^3 D)`. The same gradient table
//! is the classical force-gradient method on a standard kinetic energy (where
//! `D` reduces to the force-gradient operator) and the extended method on a
//! position-dependent one.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stage {
    /// Exact kinetic flow over `c * tau`.
    Drift { c: f64 },
    /// Momentum update with B-coefficient `d` and total `tau^3` D-coefficient `g`.
    Kick { d: f64, g: f64 },
}

impl Stage {
    pub fn kick(d: f64) -> Self {
        Stage::Kick { d, g: 0.0 }
    }

    pub fn grad_kick(d: f64, g: f64) -> Self {
        Stage::Kick { d, g }
    }

    pub fn drift(c: f64) -> Self {
        Stage::Drift { c }
    }

    fn same_kind(&self, other: &Stage) -> bool {
        matches!(
            (self, other),
            (Stage::Drift { .. }, Stage::Drift { .. }) | (Stage::Kick { .. }, Stage::Kick { .. })
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub name: &'static str,
    /// Name used for the method in the literature tables (M4, N4P, ...).
    pub label: &'static str,
    pub order: u32,
    pub stages: Vec<Stage>,
}

impl SchemeSpec {
    pub fn new(
        name: &'static str,
        label: &'static str,
        order: u32,
        stages: Vec<Stage>,
    ) -> Result<Self> {
        let spec = Self {
            name,
            label,
            order,
            stages,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn is_gradient(&self) -> bool {
        self.stages
            .iter()
            .any(|s| matches!(s, Stage::Kick { g, .. } if *g != 0.0))
    }

    pub fn drift_sum(&self) -> f64 {
        self.stages
            .iter()
            .map(|s| match s {
                Stage::Drift { c } => *c,
                _ => 0.0,
            })
            .sum()
    }

    pub fn kick_sum(&self) -> f64 {
        self.stages
            .iter()
            .map(|s| match s {
                Stage::Kick { d, .. } => *d,
                _ => 0.0,
            })
            .sum()
    }

    /// Sum of the D-coefficients over all kicks.
    pub fn gradient_sum(&self) -> f64 {
        self.stages
            .iter()
            .map(|s| match s {
                Stage::Kick { g, .. } => *g,
                _ => 0.0,
            })
            .sum()
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.stages.len();
        (0..n / 2).all(|i| self.stages[i] == self.stages[n - 1 - i])
    }

    /// Force evaluations per step (kicks count once, gradient kicks twice).
    pub fn force_evaluations(&self) -> usize {
        self.stages
            .iter()
            .map(|s| match s {
                Stage::Kick { g, .. } if *g != 0.0 => 2,
                Stage::Kick { .. } => 1,
                Stage::Drift { .. } => 0,
            })
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |why: String| Err(Error::Parameter(format!("scheme `{}`: {why}", self.name)));
        if self.stages.is_empty() {
            return bad("no stages".into());
        }
        for st in &self.stages {
            let finite = match st {
                Stage::Drift { c } => c.is_finite(),
                Stage::Kick { d, g } => d.is_finite() && g.is_finite(),
            };
            if !finite {
                return bad(format!("non-finite coefficient in {st:?}"));
            }
        }
        if (self.drift_sum() - 1.0).abs() > 1e-14 {
            return bad(format!("drift coefficients sum to {}", self.drift_sum()));
        }
        if (self.kick_sum() - 1.0).abs() > 1e-14 {
            return bad(format!("kick coefficients sum to {}", self.kick_sum()));
        }
        if !self.is_palindromic() {
            return bad("stage sequence is not symmetric".into());
        }
        if self.stages.windows(2).any(|w| w[0].same_kind(&w[1])) {
            return bad("adjacent stages of the same kind".into());
        }
        Ok(())
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}, order {})", self.name, self.label, self.order)
    }
}

fn palindrome(half: &[Stage], middle: Stage) -> Vec<Stage> {
    let mut v: Vec<Stage> = half.to_vec();
    v.push(middle);
    v.extend(half.iter().rev());
    v
}

fn verlet2() -> Vec<Stage> {
    palindrome(&[Stage::kick(0.5)], Stage::drift(1.0))
}

fn fr4() -> Vec<Stage> {
    let beta = 1.0 / (2.0 - 2f64.cbrt());
    let alpha = beta / 2.0;
    palindrome(
        &[
            Stage::drift(alpha),
            Stage::kick(beta),
            Stage::drift(0.5 - alpha),
        ],
        Stage::kick(1.0 - 2.0 * beta),
    )
}

fn omf4v() -> Vec<Stage> {
    let xi = 0.164_498_651_557_576_0;
    let lambda = -0.020_943_339_103_989_89;
    let chi = 1.235_692_651_138_917;
    palindrome(
        &[
            Stage::kick(xi),
            Stage::drift((1.0 - 2.0 * lambda) / 2.0),
            Stage::kick(chi),
            Stage::drift(lambda),
        ],
        Stage::kick(1.0 - 2.0 * (chi + xi)),
    )
}

fn omf4p() -> Vec<Stage> {
    let xi = 0.178_617_895_844_809_1;
    let lambda = -0.212_341_831_062_605_4;
    let chi = -0.066_264_582_669_818_49;
    palindrome(
        &[
            Stage::drift(xi),
            Stage::kick((1.0 - 2.0 * lambda) / 2.0),
            Stage::drift(chi),
            Stage::kick(lambda),
        ],
        Stage::drift(1.0 - 2.0 * (chi + xi)),
    )
}

fn grad2() -> Vec<Stage> {
    palindrome(&[Stage::grad_kick(0.5, 1.0 / 48.0)], Stage::drift(1.0))
}

fn chin4() -> Vec<Stage> {
    let s3 = 3f64.sqrt();
    let g = (2.0 - s3) / 48.0;
    palindrome(
        &[
            Stage::drift((1.0 - 1.0 / s3) / 2.0),
            Stage::grad_kick(0.5, g),
        ],
        Stage::drift(1.0 / s3),
    )
}

fn grad4s() -> Vec<Stage> {
    palindrome(
        &[Stage::grad_kick(1.0 / 6.0, 1.0 / 432.0), Stage::drift(0.5)],
        Stage::grad_kick(2.0 / 3.0, 1.0 / 108.0),
    )
}

/// Five-stage optimized gradient scheme. The outer kicks carry the
/// D-coefficient `xi`, the central kick carries `chi`; together they satisfy
/// the fourth-order condition `2 xi + chi = 1/72`.
fn omf4go() -> Vec<Stage> {
    let lambda = 1.0 / 6.0;
    let xi = -17.0 / 18000.0;
    let chi = 71.0 / 4500.0;
    palindrome(
        &[Stage::grad_kick(lambda, xi), Stage::drift(0.5)],
        Stage::grad_kick(1.0 - 2.0 * lambda, chi),
    )
}

/// Seven-stage optimized gradient scheme, velocity form. Outer kicks carry
/// the D-coefficient `xi`, the two inner kicks `chi` (total `2 (xi + chi)`).
fn omf4gv() -> Vec<Stage> {
    let theta = 0.272_898_300_198_875_5;
    let lambda = 0.080_025_653_064_188_66;
    let chi = 0.002_960_781_208_329_478;
    let xi = 0.000_272_575_341_075_389_5;
    let inner = (1.0 - 2.0 * lambda) / 2.0;
    palindrome(
        &[
            Stage::grad_kick(lambda, xi),
            Stage::drift(theta),
            Stage::grad_kick(inner, chi),
        ],
        Stage::drift(1.0 - 2.0 * theta),
    )
}

/// Seven-stage optimized gradient scheme, position form. Outer kicks carry
/// `xi`, the central kick `chi` (total `2 xi + chi`).
fn omf4gp() -> Vec<Stage> {
    let theta = 0.115_995_360_848_641_6;
    let lambda = 0.282_563_340_417_705_1;
    let chi = 0.003_035_236_056_708_454;
    let xi = 0.001_226_088_989_536_361;
    let centre = 1.0 - 2.0 * lambda;
    palindrome(
        &[
            Stage::drift(theta),
            Stage::grad_kick(lambda, xi),
            Stage::drift((1.0 - 2.0 * theta) / 2.0),
        ],
        Stage::grad_kick(centre, chi),
    )
}

/// All registered splitting schemes, validated once on first use.
pub fn registry() -> &'static [SchemeSpec] {
    static REGISTRY: OnceLock<Vec<SchemeSpec>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let table: [(&'static str, &'static str, u32, Vec<Stage>); 10] = [
            ("verlet2", "M2", 2, verlet2()),
            ("fr4", "M4", 4, fr4()),
            ("omf4v", "M4V", 4, omf4v()),
            ("omf4p", "M4P", 4, omf4p()),
            ("grad2", "N2", 2, grad2()),
            ("chin4", "N4", 4, chin4()),
            ("grad4s", "N4*", 4, grad4s()),
            ("omf4go", "N4O", 4, omf4go()),
            ("omf4gv", "N4V", 4, omf4gv()),
            ("omf4gp", "N4P", 4, omf4gp()),
        ];
        table
            .into_iter()
            .map(|(name, label, order, stages)| {
                SchemeSpec::new(name, label, order, stages)
                    .unwrap_or_else(|e| panic!("built-in scheme table is invalid: {e}"))
            })
            .collect()
    })
}

pub fn scheme_names() -> Vec<&'static str> {
    registry().iter().map(|s| s.name).collect()
}

pub fn lookup(name: &str) -> Result<&'static SchemeSpec> {
    registry().iter().find(|s| s.name == name).ok_or_else(|| {
        Error::Parameter(format!(
            "unknown scheme `{name}`; valid names: {}",
            scheme_names().join(", ")
        ))
    })
}

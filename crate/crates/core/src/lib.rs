//! Explicit symplectic integrators for Hamiltonians `H = K(p, q) + V(q)` whose
//! kinetic part is quadratic in the momenta with coordinate-dependent
//! coefficients, including force-gradient schemes whose gradient operator is
//! adjusted to such kinetic energies, plus the diagnostics used to assess
//! them: energy and position errors, phase-volume checks, Poincaré sections,
//! fast Lyapunov indicators and the 0-1 test for chaos.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod models;
pub mod reference;
pub mod scan;
pub mod scheme;
pub mod state;
pub mod stepper;
pub mod system;

pub use error::{Error, Result};
pub use integrator::Method;
pub use models::{ModifiedHenonHeiles, SpringPendulum, StandardHenonHeiles, SystemId};
pub use scheme::{lookup, registry, SchemeSpec, Stage};
pub use state::{State, Trajectory};
pub use stepper::{grad_kick, integrate, step};
pub use system::{energy, k_flow, solve_missing_momentum, SystemModel};

//! Instruments for judging integrators and orbits.

mod errors;
pub mod fli;
pub mod jacobian;
pub mod poincare;
pub mod zero_one;

pub use errors::{energy_error_series, position_error_series, ErrorSeries};
pub use fli::{fli, fli_pair, FliConfig, FliResult, FLI_CHAOS_THRESHOLD};
pub use jacobian::{
    determinant, jacobian_determinant, jacobian_matrix, one_step_jacobian, stepwise_determinant,
    STEPWISE_RELATIVE_STEP,
};
pub use poincare::{poincare_section, SectionPoints, SectionSpec};
pub use zero_one::{
    zero_one_series, zero_one_test, CChoice, ZeroOneConfig, ZeroOneResult, DEFAULT_C,
    ZERO_ONE_MIDPOINT,
};

//! Fixtures shared by the benchmarks.

use fgsymp::{solve_missing_momentum, ModifiedHenonHeiles, SpringPendulum, State};

/// Regular orbit of the modified Henon-Heiles system at `E = 1/120`.
pub fn mhh_start() -> State<2> {
    solve_missing_momentum(
        &ModifiedHenonHeiles,
        &State::new([0.0, -2.02], [0.0, 0.0]),
        0,
        1.0 / 120.0,
    )
    .expect("feasible")
}

/// Spring pendulum orbit at `E = 1/12`.
pub fn spring_start() -> State<2> {
    solve_missing_momentum(
        &SpringPendulum,
        &State::new([1.15, 0.05 * std::f64::consts::PI], [0.0, 0.0]),
        1,
        1.0 / 12.0,
    )
    .expect("feasible")
}

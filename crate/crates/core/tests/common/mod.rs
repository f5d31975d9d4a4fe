//! Test-only models shared by the integration tests.

use fgsymp::system::{Matrix, Tensor3};
use fgsymp::{StandardHenonHeiles, State, SystemModel};

/// Hand-written `2 V'' V'` for the standard Hénon–Heiles potential.
pub fn hh_force_gradient(q: &[f64; 2]) -> [f64; 2] {
    let (x, y) = (q[0], q[1]);
    let g = [x + 2.0 * x * y, y + x * x - y * y];
    let h = [[1.0 + 2.0 * y, 2.0 * x], [2.0 * x, 1.0 - 2.0 * y]];
    [
        2.0 * (h[0][0] * g[0] + h[0][1] * g[1]),
        2.0 * (h[1][0] * g[0] + h[1][1] * g[1]),
    ]
}

/// Standard Hénon–Heiles with potential `V - s |grad V|^2`.
pub struct ShadowHenonHeiles {
    pub s: f64,
}

impl SystemModel<2> for ShadowHenonHeiles {
    fn name(&self) -> &'static str {
        "shadow-hh"
    }
    fn coordinate_names(&self) -> [&'static str; 2] {
        ["x", "y"]
    }
    fn momentum_names(&self) -> [&'static str; 2] {
        ["px", "py"]
    }
    fn potential(&self, q: &[f64; 2]) -> f64 {
        let g = StandardHenonHeiles.potential_gradient(q);
        StandardHenonHeiles.potential(q) - self.s * (g[0] * g[0] + g[1] * g[1])
    }
    fn potential_gradient(&self, q: &[f64; 2]) -> [f64; 2] {
        let g = StandardHenonHeiles.potential_gradient(q);
        let c = hh_force_gradient(q);
        [g[0] - self.s * c[0], g[1] - self.s * c[1]]
    }
    fn potential_hessian(&self, _q: &[f64; 2]) -> Matrix<2> {
        unimplemented!("not needed by the kick-drift-kick scheme")
    }
    fn kinetic_matrix(&self, q: &[f64; 2]) -> Matrix<2> {
        StandardHenonHeiles.kinetic_matrix(q)
    }
    fn kinetic_matrix_derivative(&self, q: &[f64; 2]) -> Tensor3<2> {
        StandardHenonHeiles.kinetic_matrix_derivative(q)
    }
    fn kinetic_flow(&self, s: &State<2>, h: f64) -> fgsymp::Result<State<2>> {
        StandardHenonHeiles.kinetic_flow(s, h)
    }
}

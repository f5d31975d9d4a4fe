use crate::error::Result;
use crate::state::State;
use crate::system::{Matrix, SystemModel, Tensor3};

fn hh_potential(q: &[f64; 2]) -> f64 {
    let [x, y] = *q;
    0.5 * (x * x + y * y) + x * x * y - y * y * y / 3.0
}

fn hh_gradient(q: &[f64; 2]) -> [f64; 2] {
    let [x, y] = *q;
    [x + 2.0 * x * y, y + x * x - y * y]
}

fn hh_hessian(q: &[f64; 2]) -> Matrix<2> {
    let [x, y] = *q;
    [[1.0 + 2.0 * y, 2.0 * x], [2.0 * x, 1.0 - 2.0 * y]]
}

/// Hénon–Heiles potential with the position-dependent kinetic energy
/// `K = (y p_x^2 + p_y^2) / 2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ModifiedHenonHeiles;

impl SystemModel<2> for ModifiedHenonHeiles {
    fn name(&self) -> &'static str {
        "mhh"
    }

    fn coordinate_names(&self) -> [&'static str; 2] {
        ["x", "y"]
    }

    fn momentum_names(&self) -> [&'static str; 2] {
        ["px", "py"]
    }

    fn potential(&self, q: &[f64; 2]) -> f64 {
        hh_potential(q)
    }

    fn potential_gradient(&self, q: &[f64; 2]) -> [f64; 2] {
        hh_gradient(q)
    }

    fn potential_hessian(&self, q: &[f64; 2]) -> Matrix<2> {
        hh_hessian(q)
    }

    fn kinetic_matrix(&self, q: &[f64; 2]) -> Matrix<2> {
        [[0.5 * q[1], 0.0], [0.0, 0.5]]
    }

    fn kinetic_matrix_derivative(&self, _q: &[f64; 2]) -> Tensor3<2> {
        let mut t = [[[0.0; 2]; 2]; 2];
        t[1][0][0] = 0.5;
        t
    }

    // x' = y p_x, y' = p_y, p_x' = 0, p_y' = -p_x^2 / 2
    fn kinetic_flow(&self, s: &State<2>, h: f64) -> Result<State<2>> {
        let [x, y] = s.q;
        let [px, py] = s.p;
        let accel = -0.5 * px * px;
        let h2 = h * h;
        Ok(State {
            q: [
                x + px * (y * h + 0.5 * py * h2 + accel * h2 * h / 6.0),
                y + py * h + 0.5 * accel * h2,
            ],
            p: [px, py + accel * h],
            t: s.t + h,
        })
    }
}

/// Hénon–Heiles with the standard kinetic energy `(p_x^2 + p_y^2) / 2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardHenonHeiles;

impl SystemModel<2> for StandardHenonHeiles {
    fn name(&self) -> &'static str {
        "hh"
    }

    fn coordinate_names(&self) -> [&'static str; 2] {
        ["x", "y"]
    }

    fn momentum_names(&self) -> [&'static str; 2] {
        ["px", "py"]
    }

    fn potential(&self, q: &[f64; 2]) -> f64 {
        hh_potential(q)
    }

    fn potential_gradient(&self, q: &[f64; 2]) -> [f64; 2] {
        hh_gradient(q)
    }

    fn potential_hessian(&self, q: &[f64; 2]) -> Matrix<2> {
        hh_hessian(q)
    }

    fn kinetic_matrix(&self, _q: &[f64; 2]) -> Matrix<2> {
        [[0.5, 0.0], [0.0, 0.5]]
    }

    fn kinetic_matrix_derivative(&self, _q: &[f64; 2]) -> Tensor3<2> {
        [[[0.0; 2]; 2]; 2]
    }

    fn kinetic_flow(&self, s: &State<2>, h: f64) -> Result<State<2>> {
        Ok(State {
            q: [s.q[0] + s.p[0] * h, s.q[1] + s.p[1] * h],
            p: s.p,
            t: s.t + h,
        })
    }
}

use crate::error::{Error, Result};
use crate::state::State;
use crate::system::{Matrix, SystemModel, Tensor3};

/// Smallest admissible radius; anything below is a hard domain error.
pub const R_MIN: f64 = 1e-10;

/// Elastic pendulum in polar coordinates `(r, phi)`:
/// `K = (p_r^2 + p_phi^2 / r^2) / 2`, `V = -r cos(phi) + (r - 1)^2`.
///
/// `phi` is kept unwrapped so it stays continuous along an orbit.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpringPendulum;

impl SystemModel<2> for SpringPendulum {
    fn name(&self) -> &'static str {
        "spring"
    }

    fn coordinate_names(&self) -> [&'static str; 2] {
        ["r", "phi"]
    }

    fn momentum_names(&self) -> [&'static str; 2] {
        ["pr", "pphi"]
    }

    fn check_domain(&self, q: &[f64; 2]) -> Result<()> {
        if q[0] > R_MIN {
            Ok(())
        } else {
            Err(Error::Domain(format!("r = {} <= {R_MIN:e}", q[0])))
        }
    }

    fn potential(&self, q: &[f64; 2]) -> f64 {
        let [r, phi] = *q;
        -r * phi.cos() + (r - 1.0).powi(2)
    }

    fn potential_gradient(&self, q: &[f64; 2]) -> [f64; 2] {
        let [r, phi] = *q;
        [-phi.cos() + 2.0 * (r - 1.0), r * phi.sin()]
    }

    fn potential_hessian(&self, q: &[f64; 2]) -> Matrix<2> {
        let [r, phi] = *q;
        let s = phi.sin();
        [[2.0, s], [s, r * phi.cos()]]
    }

    fn kinetic_matrix(&self, q: &[f64; 2]) -> Matrix<2> {
        [[0.5, 0.0], [0.0, 0.5 / (q[0] * q[0])]]
    }

    fn kinetic_matrix_derivative(&self, q: &[f64; 2]) -> Tensor3<2> {
        let mut t = [[[0.0; 2]; 2]; 2];
        t[0][1][1] = -1.0 / (q[0] * q[0] * q[0]);
        t
    }

    fn angular_coordinates(&self) -> [bool; 2] {
        [false, true]
    }

    // Straight-line free flight written in the rotating frame of the
    // initial position: after time h the particle sits at
    // (r + h p_r, h p_phi / r) relative to the radial/tangential axes.
    fn kinetic_flow(&self, s: &State<2>, h: f64) -> Result<State<2>> {
        let [r, phi] = s.q;
        let [pr, pphi] = s.p;
        let radial = r + h * pr;
        let tangential = h * pphi / r;
        let r_new = radial.hypot(tangential);

        let speed2 = pr * pr + (pphi / r).powi(2);
        if speed2 > 0.0 {
            // closest approach to the origin along the flight line
            let t_star = -r * pr / speed2;
            let passes = if h > 0.0 {
                t_star > 0.0 && t_star < h
            } else {
                t_star < 0.0 && t_star > h
            };
            let impact = pphi.abs() / speed2.sqrt();
            if passes && impact <= R_MIN {
                return Err(Error::Singularity(format!(
                    "free flight passes within {impact:e} of r = 0"
                )));
            }
        }
        if !(r_new > R_MIN) {
            return Err(Error::Singularity(format!(
                "free flight lands at r = {r_new:e}"
            )));
        }

        let sweep = tangential.atan2(radial);
        let pr_new = (pr * radial + pphi / r * tangential) / r_new;
        Ok(State {
            q: [r_new, phi + sweep],
            p: [pr_new, pphi],
            t: s.t + h,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{energy, k_flow, kinetic_energy, v_gradient, v_hessian};

    #[test]
    fn rest_state_energy() {
        let s = State::new([1.0, 0.0], [0.0, 0.0]);
        assert_eq!(energy(&SpringPendulum, &s).unwrap(), -1.0);
    }

    #[test]
    fn gradient_and_hessian_closed_form() {
        assert_eq!(
            v_gradient(&SpringPendulum, &[1.0, 0.0]).unwrap(),
            [-1.0, 0.0]
        );
        let (r, phi) = (1.3, 0.7f64);
        let h = v_hessian(&SpringPendulum, &[r, phi]).unwrap();
        assert_eq!(h, [[2.0, phi.sin()], [phi.sin(), r * phi.cos()]]);
    }

    #[test]
    fn nonpositive_radius_is_domain_error() {
        let s = State::new([0.0, 0.3], [0.0, 1.0]);
        assert!(matches!(energy(&SpringPendulum, &s), Err(Error::Domain(_))));
        let s = State::new([-1.0, 0.3], [0.0, 1.0]);
        assert!(matches!(
            k_flow(&SpringPendulum, &s, 0.1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn radial_plunge_through_origin_is_singular() {
        // purely radial inward motion reaches r = 0 at t = 1
        let s = State::new([1.0, 0.2], [-1.0, 0.0]);
        let err = k_flow(&SpringPendulum, &s, 2.0).unwrap_err();
        assert!(matches!(err, Error::Singularity(_)));
        let err = k_flow(&SpringPendulum, &s, 1.0).unwrap_err();
        assert!(matches!(err, Error::Singularity(_)));
        assert!(k_flow(&SpringPendulum, &s, 0.5).is_ok());
    }

    #[test]
    fn angle_stays_continuous_past_pi() {
        // starts near pi and sweeps past it without a 2 pi jump
        let mut s = State::new([1.0, 3.0], [0.0, 1.0]);
        let mut total = 0.0;
        for _ in 0..400 {
            let next = k_flow(&SpringPendulum, &s, 0.05).unwrap();
            total += next.q[1] - s.q[1];
            assert!((next.q[1] - s.q[1]).abs() < 0.1);
            s = next;
        }
        assert!((s.q[1] - 3.0 - total).abs() < 1e-12);
        // free flight of unit angular momentum sweeps atan(t) in total
        assert!((total - 20f64.atan()).abs() < 1e-12);
        let k0 = kinetic_energy(&SpringPendulum, &State::new([1.0, 3.0], [0.0, 1.0])).unwrap();
        assert!((kinetic_energy(&SpringPendulum, &s).unwrap() - k0).abs() < 1e-13);
    }
}

//! Property tests of the model, flow and scheme invariants.

use fgsymp::models::SystemId;
use fgsymp::reference::rkf89_integrate;
use fgsymp::stepper::d_field;
use fgsymp::system::{kinetic_energy, Matrix, Tensor3};
use fgsymp::{
    grad_kick, k_flow, registry, step, ModifiedHenonHeiles, SpringPendulum, StandardHenonHeiles,
    State, SystemModel,
};
use proptest::prelude::*;

mod common;
use common::{hh_force_gradient, ShadowHenonHeiles};

const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-7;
const FLOW_TOL: f64 = 1e-12;
const REVERSE_TOL: f64 = 1e-12;
const COLLAPSE_TOL: f64 = 1e-14;
const MODIFIED_POTENTIAL_TOL: f64 = 1e-15;

fn hh_coords() -> impl Strategy<Value = [f64; 2]> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y)| [x, y])
}

fn spring_coords() -> impl Strategy<Value = [f64; 2]> {
    (0.5..2.0f64, -3.2..3.2f64).prop_map(|(r, phi)| [r, phi])
}

fn momenta() -> impl Strategy<Value = [f64; 2]> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| [a, b])
}

fn states(system: SystemId) -> BoxedStrategy<State<2>> {
    let q = match system {
        SystemId::SpringPendulum => spring_coords().boxed(),
        _ => hh_coords().boxed(),
    };
    (q, momenta()).prop_map(|(q, p)| State::new(q, p)).boxed()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn shifted(q: &[f64; 2], i: usize, h: f64) -> [f64; 2] {
    let mut out = *q;
    out[i] += h;
    out
}

fn check_derivatives(sys: &dyn SystemModel<2>, q: &[f64; 2]) -> Result<(), TestCaseError> {
    let grad = sys.potential_gradient(q);
    let hess: Matrix<2> = sys.potential_hessian(q);
    let da: Tensor3<2> = sys.kinetic_matrix_derivative(q);
    for i in 0..2 {
        let (qp, qm) = (shifted(q, i, FD_STEP), shifted(q, i, -FD_STEP));
        let fd = (sys.potential(&qp) - sys.potential(&qm)) / (2.0 * FD_STEP);
        prop_assert!(
            close(grad[i], fd, FD_TOL),
            "gradient {i}: {} vs {fd}",
            grad[i]
        );
        let (gp, gm) = (sys.potential_gradient(&qp), sys.potential_gradient(&qm));
        let (ap, am) = (sys.kinetic_matrix(&qp), sys.kinetic_matrix(&qm));
        for j in 0..2 {
            let fd = (gp[j] - gm[j]) / (2.0 * FD_STEP);
            prop_assert!(close(hess[i][j], fd, FD_TOL), "hessian {i}{j}");
            prop_assert_eq!(hess[i][j], hess[j][i]);
            for k in 0..2 {
                let fd = (ap[j][k] - am[j][k]) / (2.0 * FD_STEP);
                prop_assert!(
                    close(da[i][j][k], fd, FD_TOL),
                    "kinetic derivative {i}{j}{k}"
                );
            }
        }
    }
    Ok(())
}

fn max_diff(a: &State<2>, b: &State<2>) -> f64 {
    (0..4)
        .map(|i| (a.component(i) - b.component(i)).abs())
        .fold(0.0, f64::max)
}

/// A model's kinetic part alone, for checking its closed-form flow.
struct KineticOnly(SystemId);

impl SystemModel<2> for KineticOnly {
    fn name(&self) -> &'static str {
        "kinetic-only"
    }
    fn coordinate_names(&self) -> [&'static str; 2] {
        self.0.model().coordinate_names()
    }
    fn momentum_names(&self) -> [&'static str; 2] {
        self.0.model().momentum_names()
    }
    fn check_domain(&self, q: &[f64; 2]) -> fgsymp::Result<()> {
        self.0.model().check_domain(q)
    }
    fn potential(&self, _q: &[f64; 2]) -> f64 {
        0.0
    }
    fn potential_gradient(&self, _q: &[f64; 2]) -> [f64; 2] {
        [0.0; 2]
    }
    fn potential_hessian(&self, _q: &[f64; 2]) -> Matrix<2> {
        [[0.0; 2]; 2]
    }
    fn kinetic_matrix(&self, q: &[f64; 2]) -> Matrix<2> {
        self.0.model().kinetic_matrix(q)
    }
    fn kinetic_matrix_derivative(&self, q: &[f64; 2]) -> Tensor3<2> {
        self.0.model().kinetic_matrix_derivative(q)
    }
    fn kinetic_flow(&self, s: &State<2>, h: f64) -> fgsymp::Result<State<2>> {
        self.0.model().kinetic_flow(s, h)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hh_derivatives_match_finite_differences(q in hh_coords()) {
        check_derivatives(&ModifiedHenonHeiles, &q)?;
        check_derivatives(&StandardHenonHeiles, &q)?;
    }

    #[test]
    fn spring_derivatives_match_finite_differences(q in spring_coords()) {
        check_derivatives(&SpringPendulum, &q)?;
    }

    #[test]
    fn gradient_field_collapses_for_constant_kinetic_matrix(q in hh_coords()) {
        let d = d_field(&StandardHenonHeiles, &q);
        let c = hh_force_gradient(&q);
        for i in 0..2 {
            prop_assert!((d[i] - c[i]).abs() <= COLLAPSE_TOL * (1.0 + c[i].abs()));
        }
    }

    #[test]
    fn grad2_is_verlet_on_the_modified_potential(s in states(SystemId::StandardHenonHeiles), tau in 0.01..0.2f64) {
        let grad2 = fgsymp::lookup("grad2").unwrap();
        let verlet = fgsymp::lookup("verlet2").unwrap();
        let shadow = ShadowHenonHeiles { s: tau * tau / 24.0 };
        let a = step(grad2, &StandardHenonHeiles, &s, tau).unwrap();
        let b = step(verlet, &shadow, &s, tau).unwrap();
        prop_assert!(max_diff(&a, &b) <= MODIFIED_POTENTIAL_TOL * (1.0 + s.norm()), "{:e}", max_diff(&a, &b));
    }

    #[test]
    fn zero_gradient_coefficient_is_plain_kick(s in states(SystemId::ModifiedHenonHeiles), d in -1.0..1.0f64) {
        let a = grad_kick(&ModifiedHenonHeiles, &s, d, 0.0).unwrap();
        let g = ModifiedHenonHeiles.potential_gradient(&s.q);
        prop_assert_eq!(a.q, s.q);
        prop_assert_eq!(a.p, [s.p[0] - d * g[0], s.p[1] - d * g[1]]);
    }
}

fn check_kinetic_flow(id: SystemId, s: &State<2>, h1: f64, h2: f64) -> Result<(), TestCaseError> {
    let sys = id.model();
    let once = k_flow(sys, s, h1 + h2).unwrap();
    let twice = k_flow(sys, &k_flow(sys, s, h1).unwrap(), h2).unwrap();
    prop_assert!(
        max_diff(&once, &twice) <= FLOW_TOL * (1.0 + s.norm()),
        "group law {:e}",
        max_diff(&once, &twice)
    );
    let back = k_flow(sys, &k_flow(sys, s, h1).unwrap(), -h1).unwrap();
    prop_assert!(
        max_diff(&back, s) <= FLOW_TOL * (1.0 + s.norm()),
        "reversibility"
    );
    let k0 = kinetic_energy(sys, s).unwrap();
    let k1 = kinetic_energy(sys, &once).unwrap();
    prop_assert!(
        (k0 - k1).abs() <= FLOW_TOL * (1.0 + k0.abs()),
        "kinetic energy {k0} -> {k1}"
    );
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mhh_kinetic_flow_laws(s in states(SystemId::ModifiedHenonHeiles), h1 in -0.3..0.3f64, h2 in -0.3..0.3f64) {
        check_kinetic_flow(SystemId::ModifiedHenonHeiles, &s, h1, h2)?;
    }

    #[test]
    fn hh_kinetic_flow_laws(s in states(SystemId::StandardHenonHeiles), h1 in -0.3..0.3f64, h2 in -0.3..0.3f64) {
        check_kinetic_flow(SystemId::StandardHenonHeiles, &s, h1, h2)?;
    }

    #[test]
    fn spring_kinetic_flow_laws(s in states(SystemId::SpringPendulum), h1 in -0.2..0.2f64, h2 in -0.2..0.2f64) {
        check_kinetic_flow(SystemId::SpringPendulum, &s, h1, h2)?;
        let out = k_flow(&SpringPendulum, &s, h1).unwrap();
        // angular momentum is a constant of the free rotor
        prop_assert_eq!(out.p[1], s.p[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn every_scheme_is_time_reversible(
        s_mhh in states(SystemId::ModifiedHenonHeiles),
        s_hh in states(SystemId::StandardHenonHeiles),
        s_sp in states(SystemId::SpringPendulum),
    ) {
        let tau = 0.1;
        for (id, s) in [
            (SystemId::ModifiedHenonHeiles, s_mhh),
            (SystemId::StandardHenonHeiles, s_hh),
            (SystemId::SpringPendulum, s_sp),
        ] {
            for scheme in registry() {
                let fwd = step(scheme, id.model(), &s, tau).unwrap();
                let back = step(scheme, id.model(), &fwd, -tau).unwrap();
                let err = max_diff(&back, &s);
                prop_assert!(err <= REVERSE_TOL * (1.0 + s.norm()), "{} on {}: {err:e}", scheme.name, id.name());
            }
        }
    }
}

#[test]
fn closed_form_kinetic_flow_matches_reference_integrator() {
    let s = State::new([0.1, -2.0], [1.0, 0.5]);
    let h = 0.3;
    for id in [SystemId::ModifiedHenonHeiles, SystemId::StandardHenonHeiles] {
        let exact = k_flow(id.model(), &s, h).unwrap();
        let traj = rkf89_integrate(&KineticOnly(id), &s, h, 1e-15, &[]).unwrap();
        let err = max_diff(&exact, traj.last().unwrap());
        assert!(err <= FLOW_TOL, "{}: {err:e}", id.name());
    }
    let s = State::new([1.15, 0.3], [0.2, 0.4]);
    let exact = k_flow(&SpringPendulum, &s, h).unwrap();
    let traj = rkf89_integrate(&KineticOnly(SystemId::SpringPendulum), &s, h, 1e-15, &[]).unwrap();
    let err = max_diff(&exact, traj.last().unwrap());
    assert!(err <= FLOW_TOL, "spring: {err:e}");
}

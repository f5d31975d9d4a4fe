//! The Hamiltonian-system interface `H = K(p, q) + V(q)` with
//! `K = sum_jk a_jk(q) p_j p_k + sum_i b_i(q) p_i`, and the checked
//! operations every integrator and diagnostic goes through.

use crate::error::{Error, Result};
use crate::state::State;

pub type Matrix<const N: usize> = [[f64; N]; N];
/// `t[i][j][k]`; for kinetic tensors the first index is the differentiated coordinate.
pub type Tensor3<const N: usize> = [[[f64; N]; N]; N];

/// A Hamiltonian whose kinetic part is quadratic in the momenta and has an
/// exactly solvable flow.
///
/// Implementations are plain immutable values; every method is a pure
/// function of its arguments.
pub trait SystemModel<const N: usize>: Send + Sync {
    fn name(&self) -> &'static str;

    fn coordinate_names(&self) -> [&'static str; N];

    fn momentum_names(&self) -> [&'static str; N];

    /// Rejects coordinates where the model is undefined.
    fn check_domain(&self, _q: &[f64; N]) -> Result<()> {
        Ok(())
    }

    fn potential(&self, q: &[f64; N]) -> f64;

    fn potential_gradient(&self, q: &[f64; N]) -> [f64; N];

    fn potential_hessian(&self, q: &[f64; N]) -> Matrix<N>;

    /// Symmetric coefficients `a_jk(q)`.
    fn kinetic_matrix(&self, q: &[f64; N]) -> Matrix<N>;

    /// `da[i][j][k] = d a_jk / d q_i`.
    fn kinetic_matrix_derivative(&self, q: &[f64; N]) -> Tensor3<N>;

    /// Linear coefficients `b_i(q)`.
    fn kinetic_linear(&self, _q: &[f64; N]) -> [f64; N] {
        [0.0; N]
    }

    /// `db[i][j] = d b_j / d q_i`.
    fn kinetic_linear_derivative(&self, _q: &[f64; N]) -> Matrix<N> {
        [[0.0; N]; N]
    }

    /// Exact flow of Hamilton's equations for `K` alone over time `h`.
    fn kinetic_flow(&self, s: &State<N>, h: f64) -> Result<State<N>>;

    /// Coordinates that are angles (stored unwrapped).
    fn angular_coordinates(&self) -> [bool; N] {
        [false; N]
    }
}

fn checked<const N: usize, S: SystemModel<N> + ?Sized>(system: &S, q: &[f64; N]) -> Result<()> {
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("coordinates {q:?}")));
    }
    system.check_domain(q)
}

/// `K(p, q)` evaluated from the interface coefficients.
pub fn kinetic_energy<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    s: &State<N>,
) -> Result<f64> {
    s.ensure_finite()?;
    checked(system, &s.q)?;
    Ok(kinetic_unchecked(system, &s.q, &s.p))
}

pub(crate) fn kinetic_unchecked<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    q: &[f64; N],
    p: &[f64; N],
) -> f64 {
    let a = system.kinetic_matrix(q);
    let b = system.kinetic_linear(q);
    let mut k = 0.0;
    for j in 0..N {
        for l in 0..N {
            k += a[j][l] * p[j] * p[l];
        }
        k += b[j] * p[j];
    }
    k
}

/// Total energy `K + V`.
pub fn energy<const N: usize, S: SystemModel<N> + ?Sized>(system: &S, s: &State<N>) -> Result<f64> {
    s.ensure_finite()?;
    checked(system, &s.q)?;
    Ok(energy_unchecked(system, s))
}

pub(crate) fn energy_unchecked<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    s: &State<N>,
) -> f64 {
    kinetic_unchecked(system, &s.q, &s.p) + system.potential(&s.q)
}

pub fn v_gradient<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    q: &[f64; N],
) -> Result<[f64; N]> {
    checked(system, q)?;
    Ok(system.potential_gradient(q))
}

pub fn v_hessian<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    q: &[f64; N],
) -> Result<Matrix<N>> {
    checked(system, q)?;
    Ok(system.potential_hessian(q))
}

/// `d^2 K / dp_j dp_k = 2 a_jk`.
pub fn k_pp<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    q: &[f64; N],
) -> Result<Matrix<N>> {
    checked(system, q)?;
    Ok(k_pp_unchecked(system, q))
}

pub(crate) fn k_pp_unchecked<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    q: &[f64; N],
) -> Matrix<N> {
    let mut m = system.kinetic_matrix(q);
    m.iter_mut().flatten().for_each(|v| *v *= 2.0);
    m
}

/// `d^3 K / dq_i dp_j dp_k = 2 da_jk/dq_i`.
pub fn k_qpp<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    q: &[f64; N],
) -> Result<Tensor3<N>> {
    checked(system, q)?;
    Ok(k_qpp_unchecked(system, q))
}

pub(crate) fn k_qpp_unchecked<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    q: &[f64; N],
) -> Tensor3<N> {
    let mut t = system.kinetic_matrix_derivative(q);
    t.iter_mut().flatten().flatten().for_each(|v| *v *= 2.0);
    t
}

/// Exact kinetic flow with input and output validation.
pub fn k_flow<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    s: &State<N>,
    h: f64,
) -> Result<State<N>> {
    s.ensure_finite()?;
    if !h.is_finite() {
        return Err(Error::NonFinite(format!("time increment {h}")));
    }
    checked(system, &s.q)?;
    if h == 0.0 {
        return Ok(*s);
    }
    let out = system.kinetic_flow(s, h)?;
    if !out.is_finite() {
        return Err(Error::Overflow(format!("kinetic flow over {h}")));
    }
    Ok(out)
}

/// Right-hand side of Hamilton's equations for the full `H`,
/// returned as `(dq/dt, dp/dt)`.
pub fn vector_field<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    q: &[f64; N],
    p: &[f64; N],
) -> ([f64; N], [f64; N]) {
    let a = system.kinetic_matrix(q);
    let da = system.kinetic_matrix_derivative(q);
    let b = system.kinetic_linear(q);
    let db = system.kinetic_linear_derivative(q);
    let grad = system.potential_gradient(q);
    let mut dq = [0.0; N];
    let mut dp = [0.0; N];
    for j in 0..N {
        let mut v = b[j];
        for k in 0..N {
            v += 2.0 * a[j][k] * p[k];
        }
        dq[j] = v;
    }
    for i in 0..N {
        let mut kq = 0.0;
        for j in 0..N {
            for k in 0..N {
                kq += da[i][j][k] * p[j] * p[k];
            }
            kq += db[i][j] * p[j];
        }
        dp[i] = -kq - grad[i];
    }
    (dq, dp)
}

/// Installs the momentum `p[closure]` that puts `s` on the energy level
/// `target`, taking the positive root of the quadratic `K(p) = target - V(q)`.
pub fn solve_missing_momentum<const N: usize, S: SystemModel<N> + ?Sized>(
    system: &S,
    s: &State<N>,
    closure: usize,
    target: f64,
) -> Result<State<N>> {
    if closure >= N {
        return Err(Error::Parameter(format!(
            "closure momentum index {closure} out of range for dimension {N}"
        )));
    }
    if !target.is_finite() {
        return Err(Error::NonFinite(format!("target energy {target}")));
    }
    let mut out = *s;
    out.p[closure] = 0.0;
    out.ensure_finite()?;
    checked(system, &out.q)?;

    let q = &out.q;
    let a = system.kinetic_matrix(q);
    let b = system.kinetic_linear(q);
    // K = qa p^2 + qb p + (K with p = 0)
    let qa = a[closure][closure];
    let mut qb = b[closure];
    for k in 0..N {
        if k != closure {
            qb += 2.0 * a[closure][k] * out.p[k];
        }
    }
    let qc = kinetic_unchecked(system, q, &out.p) + system.potential(q) - target;

    let infeasible = |reason: &str| Error::InfeasibleEnergy {
        energy: target,
        reason: reason.to_string(),
    };
    let root = if qa == 0.0 {
        if qb == 0.0 {
            return Err(infeasible("energy does not depend on the closure momentum"));
        }
        -qc / qb
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return Err(infeasible("negative discriminant"));
        }
        let sq = disc.sqrt();
        let w = -0.5 * (qb + qb.signum() * sq);
        let (r1, r2) = if w == 0.0 {
            (0.0, 0.0)
        } else {
            (w / qa, qc / w)
        };
        r1.max(r2)
    };
    if !(root > 0.0) {
        return Err(infeasible("no positive root"));
    }
    out.p[closure] = root;
    Ok(out)
}

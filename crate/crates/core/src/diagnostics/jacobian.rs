//! Phase-volume check: the Jacobian `S = d z(t) / d z(0)` of the whole
//! propagation map, built by central finite differences, and its determinant.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrator::Method;
use crate::state::State;
use crate::system::SystemModel;

/// Relative perturbation of each phase component.
pub const FD_RELATIVE_STEP: f64 = 1e-6;

/// Base relative perturbation for the one-step Jacobians of
/// [`stepwise_determinant`]. Two Richardson levels push the truncation error
/// of this step below rounding; much smaller steps let rounding bias build up
/// over thousands of steps.
pub const STEPWISE_RELATIVE_STEP: f64 = 4e-3;

/// Determinant by LU factorization with partial pivoting.
pub fn determinant(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    let mut m: Vec<Vec<f64>> = matrix.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for k in col..n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    det
}

fn sampled_run<const N: usize, S: SystemModel<N> + ?Sized>(
    method: &Method,
    system: &S,
    s0: &State<N>,
    tau: f64,
    n_steps: usize,
    sample_every: usize,
) -> Result<Vec<State<N>>> {
    let mut out = Vec::with_capacity(n_steps / sample_every + 2);
    let mut count = 0usize;
    method
        .propagate(system, s0, tau, n_steps, |s| {
            if count % sample_every == 0 || count == n_steps {
                out.push(*s);
            }
            count += 1;
        })
        .map_err(|(_, e)| e)?;
    Ok(out)
}

/// Sample times paired with the `2N x 2N` Jacobian of the map `z(0) -> z(t)`.
///
/// The `4N` perturbed trajectories run in parallel and are combined in index
/// order, so the result does not depend on scheduling.
pub fn jacobian_matrix<const N: usize, S: SystemModel<N> + ?Sized>(
    method: &Method,
    system: &S,
    s0: &State<N>,
    tau: f64,
    n_steps: usize,
    sample_every: usize,
) -> Result<Vec<(f64, Vec<Vec<f64>>)>> {
    s0.ensure_finite()?;
    system.check_domain(&s0.q)?;
    let dim = 2 * N;
    if n_steps == 0 {
        let id = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        return Ok(vec![(s0.t, id)]);
    }
    if sample_every == 0 {
        return Err(Error::Parameter("sample_every must be at least 1".into()));
    }
    let steps: Vec<f64> = (0..dim)
        .map(|i| FD_RELATIVE_STEP * s0.component(i).abs().max(1.0))
        .collect();
    let runs: Vec<Result<Vec<State<N>>>> = (0..2 * dim)
        .into_par_iter()
        .map(|job| {
            let comp = job / 2;
            let sign = if job % 2 == 0 { 1.0 } else { -1.0 };
            let mut start = *s0;
            *start.component_mut(comp) += sign * steps[comp];
            sampled_run(method, system, &start, tau, n_steps, sample_every)
        })
        .collect();
    let runs: Vec<Vec<State<N>>> = runs.into_iter().collect::<Result<_>>()?;
    let n_samples = runs[0].len();
    let mut out = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let mut m = vec![vec![0.0; dim]; dim];
        for col in 0..dim {
            let plus = &runs[2 * col][k];
            let minus = &runs[2 * col + 1][k];
            for (row, m_row) in m.iter_mut().enumerate() {
                m_row[col] = (plus.component(row) - minus.component(row)) / (2.0 * steps[col]);
            }
        }
        out.push((runs[0][k].t, m));
    }
    Ok(out)
}

/// `(t, det S(t))` at every sample.
pub fn jacobian_determinant<const N: usize, S: SystemModel<N> + ?Sized>(
    method: &Method,
    system: &S,
    s0: &State<N>,
    tau: f64,
    n_steps: usize,
    sample_every: usize,
) -> Result<Vec<(f64, f64)>> {
    Ok(
        jacobian_matrix(method, system, s0, tau, n_steps, sample_every)?
            .into_iter()
            .map(|(t, m)| (t, determinant(&m)))
            .collect(),
    )
}

/// Jacobian of one step `z -> Phi_tau(z)` by central differences with two
/// levels of Richardson extrapolation (steps `h`, `h/2`, `h/4`).
pub fn one_step_jacobian<const N: usize, S: SystemModel<N> + ?Sized>(
    method: &Method,
    system: &S,
    s: &State<N>,
    tau: f64,
) -> Result<Vec<Vec<f64>>> {
    let dim = 2 * N;
    let column = |j: usize, h: f64| -> Result<Vec<f64>> {
        let mut plus = *s;
        *plus.component_mut(j) += h;
        let mut minus = *s;
        *minus.component_mut(j) -= h;
        let a = method.single_step(system, &plus, tau)?;
        let b = method.single_step(system, &minus, tau)?;
        Ok((0..dim)
            .map(|i| (a.component(i) - b.component(i)) / (2.0 * h))
            .collect())
    };
    let mut m = vec![vec![0.0; dim]; dim];
    for j in 0..dim {
        let z = s.component(j);
        // the step actually taken, so that z +- h is exact
        let h = (z + STEPWISE_RELATIVE_STEP * z.abs().max(1.0)) - z;
        let c1 = column(j, h)?;
        let c2 = column(j, 0.5 * h)?;
        let c4 = column(j, 0.25 * h)?;
        for (i, row) in m.iter_mut().enumerate() {
            let r1 = (4.0 * c2[i] - c1[i]) / 3.0;
            let r2 = (4.0 * c4[i] - c2[i]) / 3.0;
            row[j] = (16.0 * r2 - r1) / 15.0;
        }
    }
    Ok(m)
}

/// `(t, det S(t))` from the chain rule: the product of one-step Jacobian
/// determinants along the reference trajectory.
///
/// Unlike [`jacobian_determinant`] this stays linear on chaotic orbits, where
/// finitely perturbed whole trajectories separate beyond the linear regime.
pub fn stepwise_determinant<const N: usize, S: SystemModel<N> + ?Sized>(
    method: &Method,
    system: &S,
    s0: &State<N>,
    tau: f64,
    n_steps: usize,
    sample_every: usize,
) -> Result<Vec<(f64, f64)>> {
    s0.ensure_finite()?;
    system.check_domain(&s0.q)?;
    if n_steps == 0 {
        return Ok(vec![(s0.t, 1.0)]);
    }
    if sample_every == 0 {
        return Err(Error::Parameter("sample_every must be at least 1".into()));
    }
    let path = sampled_run(method, system, s0, tau, n_steps, 1)?;
    let dets: Vec<Result<f64>> = path[..n_steps]
        .par_iter()
        .map(|s| one_step_jacobian(method, system, s, tau).map(|m| determinant(&m)))
        .collect();
    let mut out = vec![(s0.t, 1.0)];
    let mut log_sum = 0.0;
    for (k, det) in dets.into_iter().enumerate() {
        let det = det?;
        if !(det > 0.0) {
            return Err(Error::Overflow(format!(
                "one-step determinant {det} at step {k}"
            )));
        }
        log_sum += (det - 1.0).ln_1p();
        let done = k + 1;
        if done % sample_every == 0 || done == n_steps {
            out.push((path[done].t, log_sum.exp()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModifiedHenonHeiles, SpringPendulum};
    use crate::scheme::lookup;

    #[test]
    fn determinant_of_known_matrices() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        assert!((determinant(&m) - 5.0).abs() < 1e-15);
        let p = vec![
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 4.0],
        ];
        assert!((determinant(&p) + 4.0).abs() < 1e-15);
        assert_eq!(determinant(&[vec![1.0, 2.0], vec![2.0, 4.0]]), 0.0);
    }

    #[test]
    fn zero_steps_is_identity() {
        let s0 = State::new([0.0, -0.988], [1.0, 0.0]);
        let m = Method::Splitting(lookup("grad2").unwrap());
        let d = jacobian_determinant(&m, &ModifiedHenonHeiles, &s0, 0.01, 0, 1).unwrap();
        assert_eq!(d, vec![(0.0, 1.0)]);
    }

    #[test]
    fn symplectic_step_preserves_two_form() {
        // S^T J S = J with J the canonical structure in (q, p) ordering
        let s0 = State::new([1.1, 0.4], [0.05, 0.9]);
        let m = Method::Splitting(lookup("chin4").unwrap());
        let jac = jacobian_matrix(&m, &SpringPendulum, &s0, 0.1, 20, 20).unwrap();
        let s = &jac.last().unwrap().1;
        let j = |r: usize, c: usize| -> f64 {
            match (r, c) {
                (0, 2) | (1, 3) => 1.0,
                (2, 0) | (3, 1) => -1.0,
                _ => 0.0,
            }
        };
        for r in 0..4 {
            for c in 0..4 {
                let mut v = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        v += s[a][r] * j(a, b) * s[b][c];
                    }
                }
                assert!((v - j(r, c)).abs() < 1e-8, "({r},{c}) = {v}");
            }
        }
    }

    #[test]
    fn stepwise_separates_symplectic_from_rk4() {
        let s0 = State::new([1.1, 0.4], [0.05, 0.9]);
        let run = |name: &str| {
            let m = Method::by_name(name).unwrap();
            let d = stepwise_determinant(&m, &SpringPendulum, &s0, 0.05, 400, 100).unwrap();
            assert_eq!(d.len(), 5);
            assert!((d[4].0 - 20.0).abs() < 1e-12);
            d.iter().map(|(_, v)| (v - 1.0).abs()).fold(0.0, f64::max)
        };
        let sym = run("chin4");
        let rk = run("rk4");
        assert!(sym < 1e-10, "{sym:e}");
        assert!(rk > 1e3 * sym, "{rk:e} vs {sym:e}");
    }

    #[test]
    fn one_step_jacobian_of_linear_drift() {
        // standard kinetic part: q' = q + tau p exactly
        let sys = crate::models::StandardHenonHeiles;
        let s = State::new([0.2, -0.1], [0.3, 0.4]);
        let m = Method::Splitting(lookup("verlet2").unwrap());
        let j = one_step_jacobian(&m, &sys, &s, 1e-3).unwrap();
        assert!((j[0][2] - 1e-3).abs() < 1e-8);
        assert!((determinant(&j) - 1.0).abs() < 1e-13);
    }
}

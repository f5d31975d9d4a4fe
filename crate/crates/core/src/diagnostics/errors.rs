use crate::error::{Error, Result};
use crate::state::Trajectory;

/// Non-negative error values against sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ErrorSeries {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// `log10` of the largest value.
    pub fn max_order(&self) -> f64 {
        self.max().log10()
    }
}

/// `|H(state_k) - e0|` from the energies cached on the trajectory.
pub fn energy_error_series<const N: usize>(traj: &Trajectory<N>, e0: f64) -> Result<ErrorSeries> {
    if traj.is_empty() {
        return Err(Error::Parameter("empty trajectory".into()));
    }
    Ok(ErrorSeries {
        times: traj.times(),
        values: traj.energies.iter().map(|e| (e - e0).abs()).collect(),
    })
}

/// Euclidean distance over the coordinate block between two trajectories
/// sampled on the same time grid.
pub fn position_error_series<const N: usize>(
    traj: &Trajectory<N>,
    reference: &Trajectory<N>,
) -> Result<ErrorSeries> {
    if traj.len() != reference.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples vs {} reference samples",
            traj.len(),
            reference.len()
        )));
    }
    let mut times = Vec::with_capacity(traj.len());
    let mut values = Vec::with_capacity(traj.len());
    for (a, b) in traj.states.iter().zip(&reference.states) {
        if (a.t - b.t).abs() > 1e-9 * a.t.abs().max(1.0) {
            return Err(Error::GridMismatch(format!(
                "t = {} vs reference t = {}",
                a.t, b.t
            )));
        }
        times.push(a.t);
        values.push(
            a.q.iter()
                .zip(&b.q)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt(),
        );
    }
    Ok(ErrorSeries { times, values })
}

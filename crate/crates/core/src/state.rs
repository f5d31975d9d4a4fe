//! Phase-space points and sampled orbits.

use crate::error::{Error, Result};

/// A point `(q, p)` in a `2N`-dimensional phase space together with its time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State<const N: usize> {
    pub q: [f64; N],
    pub p: [f64; N],
    pub t: f64,
}

impl<const N: usize> State<N> {
    pub fn new(q: [f64; N], p: [f64; N]) -> Self {
        Self { q, p, t: 0.0 }
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.q.iter().all(|v| v.is_finite())
            && self.p.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(format!("{self:?}")))
        }
    }

    /// Flattened phase-space vector `(q_1..q_N, p_1..p_N)`.
    pub fn phase(&self) -> Vec<f64> {
        self.q.iter().chain(self.p.iter()).copied().collect()
    }

    /// Component `i` of the flattened phase vector.
    pub fn component(&self, i: usize) -> f64 {
        if i < N {
            self.q[i]
        } else {
            self.p[i - N]
        }
    }

    pub fn component_mut(&mut self, i: usize) -> &mut f64 {
        if i < N {
            &mut self.q[i]
        } else {
            &mut self.p[i - N]
        }
    }

    /// Euclidean distance over the raw `(q, p)` tuple (angles are not wrapped).
    pub fn distance(&self, other: &Self) -> f64 {
        (0..2 * N)
            .map(|i| (self.component(i) - other.component(i)).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Euclidean norm of the phase vector.
    pub fn norm(&self) -> f64 {
        (0..2 * N)
            .map(|i| self.component(i).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Time-ordered samples of an orbit with their energies.
///
/// A run that fails part-way keeps everything computed before the failure and
/// records the cause in `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub states: Vec<State<N>>,
    pub energies: Vec<f64>,
    pub error: Option<Error>,
}

impl<const N: usize> Trajectory<N> {
    pub fn new() -> Self {
        Self {
            states: Vec::new(),
            energies: Vec::new(),
            error: None,
        }
    }

    pub fn push(&mut self, state: State<N>, energy: f64) {
        self.states.push(state);
        self.energies.push(energy);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> Option<&State<N>> {
        self.states.last()
    }

    pub fn is_complete(&self) -> bool {
        self.error.is_none()
    }
}

impl<const N: usize> Default for Trajectory<N> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_follow_q_then_p() {
        let s = State::new([1.0, 2.0], [3.0, 4.0]);
        assert_eq!(s.phase(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.component(3), 4.0);
        assert_eq!(s.distance(&State::new([1.0, 2.0], [3.0, 4.0])), 0.0);
        assert!((s.norm() - 30f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn nan_is_detected() {
        let s = State::new([f64::NAN, 0.0], [0.0, 0.0]);
        assert!(matches!(s.ensure_finite(), Err(Error::NonFinite(_))));
    }
}

//! Uniform time grids and epsilon ladders.
//!
//! All estimators use the boundary extension convention: a path indexed by
//! `[0, T]` is extended with `X(t) = X(0)` for `t <= 0` and `X(t) = X(T)` for
//! `t >= T`. On the grid this is the index clamp in [`TimeGrid::clamp`].

use crate::error::{Error, Result};

/// Uniform grid on `[0, T]` with `steps` intervals, so `steps + 1` nodes and
/// `dt = T / steps` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid horizon must be positive and finite, got {horizon}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("grid needs at least one step".into()));
        }
        Ok(TimeGrid { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Number of nodes, `steps + 1`.
    pub fn n_nodes(&self) -> usize {
        self.steps + 1
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }

    /// Boundary-extension index clamp: negative indices map to 0, indices
    /// past the horizon map to the last node.
    pub fn clamp(&self, j: i64) -> usize {
        j.clamp(0, self.steps as i64) as usize
    }

    /// Grid with the same horizon and `factor` times more steps.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        TimeGrid::new(self.horizon, self.steps * factor)
    }
}

/// Ladder of regularization widths `eps = m * dt`, exact grid multiples.
///
/// The rungs are strictly increasing with `m >= 4`; estimators are evaluated
/// at each rung and convergence "down the ladder" means from the largest
/// rung toward the smallest.
#[derive(Debug, Clone)]
pub struct EpsLadder {
    multiples: Vec<usize>,
}

impl EpsLadder {
    pub fn new(multiples: Vec<usize>, grid: &TimeGrid) -> Result<Self> {
        if multiples.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "epsilon ladder needs at least 3 rungs, got {}",
                multiples.len()
            )));
        }
        for w in multiples.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidArgument(
                    "epsilon ladder multiples must be strictly increasing".into(),
                ));
            }
        }
        for &m in &multiples {
            if m < 4 {
                return Err(Error::InvalidArgument(format!(
                    "epsilon multiple {m} below minimum 4"
                )));
            }
            if (m as f64) * grid.dt() >= grid.horizon() / 4.0 {
                return Err(Error::InvalidArgument(format!(
                    "epsilon {} not below T/4",
                    m as f64 * grid.dt()
                )));
            }
        }
        Ok(EpsLadder { multiples })
    }

    pub fn multiples(&self) -> &[usize] {
        &self.multiples
    }

    /// Rungs from largest epsilon to smallest: the order in which the
    /// limit `eps -> 0` is probed.
    pub fn descending(&self) -> impl Iterator<Item = usize> + '_ {
        self.multiples.iter().rev().copied()
    }

    pub fn eps(&self, m: usize, grid: &TimeGrid) -> f64 {
        m as f64 * grid.dt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_dt_times_steps_is_horizon() {
        let g = TimeGrid::new(1.0, 1 << 12).unwrap();
        assert_eq!(g.dt() * g.steps() as f64, 1.0);
        assert_eq!(g.n_nodes(), (1 << 12) + 1);
    }

    #[test]
    fn clamp_applies_boundary_extension() {
        let g = TimeGrid::new(1.0, 8).unwrap();
        assert_eq!(g.clamp(-3), 0);
        assert_eq!(g.clamp(5), 5);
        assert_eq!(g.clamp(12), 8);
    }

    #[test]
    fn ladder_rejects_bad_shapes() {
        let g = TimeGrid::new(1.0, 4096).unwrap();
        assert!(EpsLadder::new(vec![4, 16], &g).is_err());
        assert!(EpsLadder::new(vec![4, 16, 16], &g).is_err());
        assert!(EpsLadder::new(vec![2, 16, 64], &g).is_err());
        assert!(EpsLadder::new(vec![4, 16, 2048], &g).is_err());
        assert!(EpsLadder::new(vec![4, 16, 64], &g).is_ok());
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(TimeGrid::new(0.0, 4).is_err());
        assert!(TimeGrid::new(-1.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `t_k = k T / steps` on `[0, T]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::ConfigInvalid(format!("horizon must be > 0, got {horizon}")));
        }
        if steps == 0 {
            return Err(Error::ConfigInvalid("steps must be >= 1".into()));
        }
        Ok(Self { horizon, steps })
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

    /// Exact at both ends: `time(steps) == horizon`.
    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.horizon
        } else {
            self.horizon * k as f64 / self.steps as f64
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }

    /// Index of the grid cell `(t_k, t_{k+1}]` containing `t > 0`.
    pub fn cell_of(&self, t: f64) -> usize {
        let k = (t / self.dt()).ceil() as usize;
        k.clamp(1, self.steps) - 1
    }

    pub fn refine(&self, factor: usize) -> Result<Self> {
        Self::new(self.horizon, self.steps * factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g = TimeGrid::new(0.7, 3).unwrap();
        let t = g.times();
        assert_eq!(t.len(), 4);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[3], 0.7);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::new(-1.0, 3).is_err());
    }

    #[test]
    fn cells() {
        let g = TimeGrid::new(1.0, 4).unwrap();
        assert_eq!(g.cell_of(0.1), 0);
        assert_eq!(g.cell_of(0.25), 0);
        assert_eq!(g.cell_of(0.2500001), 1);
        assert_eq!(g.cell_of(1.0), 3);
    }
}

use serde::{Deserialize, Serialize};

use super::grid::TimeGrid;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Realization {
    /// Martingale increments `dM_k` (row-major, `steps x dim`) and the
    /// realised bracket increments `[M,M](t_{k+1}) - [M,M](t_k)`.
    Increments { dim: usize, increments: Vec<f64>, bracket: Vec<f64> },
    /// Sorted `(time, mark)` atoms of a Poisson random measure.
    Events { marks: usize, events: Vec<(f64, usize)> },
}

/// One realisation of the driving noise on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisePath {
    pub stream: u64,
    pub grid: TimeGrid,
    pub realization: Realization,
}

impl NoisePath {
    pub fn is_martingale(&self) -> bool {
        matches!(self.realization, Realization::Increments { .. })
    }

    pub fn dim(&self) -> usize {
        match &self.realization {
            Realization::Increments { dim, .. } => *dim,
            Realization::Events { marks, .. } => *marks,
        }
    }

    /// `dM_k`; panics on a measure path.
    pub fn increment(&self, k: usize) -> &[f64] {
        match &self.realization {
            Realization::Increments { dim, increments, .. } => &increments[k * dim..(k + 1) * dim],
            Realization::Events { .. } => panic!("measure path has no martingale increments"),
        }
    }

    pub fn events(&self) -> &[(f64, usize)] {
        match &self.realization {
            Realization::Events { events, .. } => events,
            Realization::Increments { .. } => &[],
        }
    }

    /// `M(t_k)` for a martingale path.
    pub fn value(&self, k: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for j in 0..k {
            for (a, b) in m.iter_mut().zip(self.increment(j)) {
                *a += b;
            }
        }
        m
    }

    /// Realised quadratic variation `[M,M](t_k)`. For a measure path this
    /// counts events up to `t_k` (unit mark size).
    pub fn quadratic_variation(&self, k: usize) -> f64 {
        match &self.realization {
            Realization::Increments { bracket, .. } => bracket[..k].iter().sum(),
            Realization::Events { events, .. } => {
                let t = self.grid.time(k);
                events.iter().filter(|e| e.0 <= t).count() as f64
            }
        }
    }

    /// Predictable bracket `<M,M>(t_k) = t_k` under the normalisation
    /// `Q_M = Q`.
    pub fn angle_bracket(&self, k: usize) -> f64 {
        self.grid.time(k)
    }

    /// Per-cell event counts per mark minus `m dt` (measure paths).
    pub fn compensated_counts(&self, intensities: &[f64]) -> Vec<f64> {
        let marks = intensities.len();
        let dt = self.grid.dt();
        let mut out = vec![0.0; marks * self.grid.steps()];
        for k in 0..self.grid.steps() {
            for (i, m) in intensities.iter().enumerate() {
                out[k * marks + i] = -m * dt;
            }
        }
        for &(t, z) in self.events() {
            out[self.grid.cell_of(t) * marks + z] += 1.0;
        }
        out
    }

    /// Sum `factor` consecutive increments: the same path on a coarser grid.
    pub fn coarsen(&self, factor: usize) -> NoisePath {
        assert!(factor >= 1 && self.grid.steps() % factor == 0, "factor must divide steps");
        let grid = TimeGrid::new(self.grid.horizon(), self.grid.steps() / factor)
            .expect("coarse grid is valid");
        let realization = match &self.realization {
            Realization::Increments { dim, increments, bracket } => {
                let mut inc = vec![0.0; dim * grid.steps()];
                let mut br = vec![0.0; grid.steps()];
                for k in 0..self.grid.steps() {
                    let c = k / factor;
                    for j in 0..*dim {
                        inc[c * dim + j] += increments[k * dim + j];
                    }
                    br[c] += bracket[k];
                }
                Realization::Increments { dim: *dim, increments: inc, bracket: br }
            }
            ev @ Realization::Events { .. } => ev.clone(),
        };
        NoisePath { stream: self.stream, grid, realization }
    }
}

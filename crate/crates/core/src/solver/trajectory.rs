use serde::{Deserialize, Serialize};

/// States `u(t_0), .., u(t_steps)` of one path, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dim: usize,
    pub states: Vec<f64>,
}

impl Trajectory {
    pub fn with_capacity(dim: usize, points: usize) -> Self {
        Self { dim, states: Vec::with_capacity(dim * points) }
    }

    pub fn zeros(dim: usize, points: usize) -> Self {
        Self { dim, states: vec![0.0; dim * points] }
    }

    pub fn push(&mut self, u: &[f64]) {
        debug_assert_eq!(u.len(), self.dim);
        self.states.extend_from_slice(u);
    }

    pub fn len(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn last(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn norm_at(&self, k: usize) -> f64 {
        self.state(k).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dist_at(&self, other: &Trajectory, k: usize) -> f64 {
        self.state(k).iter().zip(other.state(k)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// `sup_{s <= t_k} |u(s)|^p` for every k.
    pub fn running_sup_pow(&self, p: f64) -> Vec<f64> {
        running_sup((0..self.len()).map(|k| self.norm_at(k)), p)
    }

    /// `sup_{s <= t_k} |u(s) - v(s)|^p` for every k.
    pub fn running_sup_diff_pow(&self, other: &Trajectory, p: f64) -> Vec<f64> {
        running_sup((0..self.len()).map(|k| self.dist_at(other, k)), p)
    }

    pub fn sup_pow(&self, p: f64) -> f64 {
        (0..self.len()).map(|k| self.norm_at(k)).fold(0.0, f64::max).powf(p)
    }

    pub fn sup_diff_pow(&self, other: &Trajectory, p: f64) -> f64 {
        (0..self.len()).map(|k| self.dist_at(other, k)).fold(0.0, f64::max).powf(p)
    }

    pub fn sub(&self, other: &Trajectory) -> Trajectory {
        Trajectory {
            dim: self.dim,
            states: self.states.iter().zip(&other.states).map(|(a, b)| a - b).collect(),
        }
    }
}

fn running_sup(norms: impl Iterator<Item = f64>, p: f64) -> Vec<f64> {
    let mut m = 0.0_f64;
    norms
        .map(|n| {
            m = m.max(n);
            m.powf(p)
        })
        .collect()
}

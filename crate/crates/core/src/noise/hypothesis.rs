use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::driver::NoiseDriver;
use super::path::NoisePath;
use crate::stats::Moments;

/// Empirical check of `d<<M,M>> <= Q dt`, cell by cell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HypothesisQReport {
    /// Per cell: smallest eigenvalue of `dt Q - C_k` plus its tolerance.
    pub cell_margin: Vec<f64>,
    pub cell_pass: Vec<bool>,
    /// Cell-pooled estimate of `Q` (row-major) and its standard errors.
    pub q_hat: Vec<f64>,
    pub q_se: Vec<f64>,
    pub q_declared: Vec<f64>,
    /// Every cell satisfies the bound.
    pub bound_pass: bool,
    /// Pooled estimate agrees entrywise with `Q` within 4 standard errors.
    pub equality_pass: bool,
}

/// Needs at least 100 paths for meaningful standard errors.
pub fn verify_hypothesis_q(driver: &NoiseDriver, paths: &[NoisePath]) -> HypothesisQReport {
    assert!(paths.len() >= 2, "need an ensemble");
    let grid = paths[0].grid;
    let q = driver.covariance();
    let d = q.nrows();
    let dt = grid.dt();
    let cells: Vec<Vec<f64>> = match driver {
        NoiseDriver::Martingale(_) => paths
            .iter()
            .map(|p| (0..grid.steps()).flat_map(|k| p.increment(k).to_vec()).collect())
            .collect(),
        NoiseDriver::Prm(prm) => paths.iter().map(|p| p.compensated_counts(&prm.intensities)).collect(),
    };
    let mut pooled = vec![Moments::default(); d * d];
    let mut cell_margin = Vec::with_capacity(grid.steps());
    let mut cell_pass = Vec::with_capacity(grid.steps());
    for k in 0..grid.steps() {
        let mut m = vec![Moments::default(); d * d];
        for inc in &cells {
            let x = &inc[k * d..(k + 1) * d];
            for a in 0..d {
                for b in 0..d {
                    let v = x[a] * x[b];
                    m[a * d + b].push(v);
                    pooled[a * d + b].push(v / dt);
                }
            }
        }
        let c = DMatrix::from_fn(d, d, |a, b| m[a * d + b].mean);
        let se = DMatrix::from_fn(d, d, |a, b| m[a * d + b].estimate().se);
        let gap = &q * dt - &c;
        let sym = (&gap + gap.transpose()) * 0.5;
        let min_eig = SymmetricEigen::new(sym).eigenvalues.min();
        let tol = 4.0 * se.norm();
        cell_margin.push(min_eig + tol);
        cell_pass.push(min_eig >= -tol);
    }
    let q_hat: Vec<f64> = pooled.iter().map(|m| m.mean).collect();
    let q_se: Vec<f64> = pooled.iter().map(|m| m.estimate().se).collect();
    let q_declared: Vec<f64> = (0..d * d).map(|i| q[(i / d, i % d)]).collect();
    let equality_pass = q_hat
        .iter()
        .zip(&q_se)
        .zip(&q_declared)
        .all(|((h, s), t)| (h - t).abs() <= 4.0 * s + 1e-14);
    HypothesisQReport {
        bound_pass: cell_pass.iter().all(|&p| p),
        cell_margin,
        cell_pass,
        q_hat,
        q_se,
        q_declared,
        equality_pass,
    }
}

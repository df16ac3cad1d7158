use std::io::Write;

use rayon::prelude::*;

use super::problem::EvolutionProblem;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::noise::TimeGrid;
use crate::stats::{moments_of, Estimate};

/// Monte Carlo paths on a shared grid. Path `i` was driven by stream `i`
/// of `base_seed`, so two ensembles with the same seed and size are coupled.
#[derive(Clone, Debug, PartialEq)]
pub struct PathEnsemble {
    pub grid: TimeGrid,
    pub dim: usize,
    pub base_seed: u64,
    pub scheme: String,
    pub paths: Vec<Trajectory>,
}

impl PathEnsemble {
    pub fn generate(problem: &EvolutionProblem, n: usize, base_seed: u64) -> Result<Self> {
        let paths = (0..n as u64)
            .into_par_iter()
            .map(|i| problem.solve_path(base_seed, i).map(|(_, t)| t))
            .collect::<Result<Vec<_>>>()?;
        let scheme = match problem.noise {
            super::NoiseTerm::Poisson { .. } => "jump-adapted exponential Euler",
            _ => "exponential Euler",
        };
        Ok(Self { grid: problem.grid, dim: problem.dim(), base_seed, scheme: scheme.into(), paths })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// CSV rows `path_id,t,coord_0..coord_{d-1}`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let coords: Vec<String> = (0..self.dim).map(|j| format!("coord_{j}")).collect();
        writeln!(w, "path_id,t,{}", coords.join(","))?;
        for (i, p) in self.paths.iter().enumerate() {
            for k in 0..p.len() {
                let vals: Vec<String> = p.state(k).iter().map(|x| format!("{x:e}")).collect();
                writeln!(w, "{i},{:e},{}", self.grid.time(k), vals.join(","))?;
            }
        }
        Ok(())
    }
}

/// CSV rows `statistic,value,stderr`.
pub fn write_summary(mut w: impl Write, rows: &[(&str, Estimate)]) -> Result<()> {
    writeln!(w, "statistic,value,stderr")?;
    for (name, e) in rows {
        writeln!(w, "{name},{:e},{:e}", e.value, e.se)?;
    }
    Ok(())
}

/// `(E sup_k |u(t_k)|^p)^{1/p}` with a delta-method standard error.
pub fn hp_norm_estimate(ensemble: &PathEnsemble, p: f64) -> Result<Estimate> {
    if ensemble.len() < 2 {
        return Err(Error::ConfigInvalid("H_p estimate needs at least 2 paths".into()));
    }
    let sups: Vec<f64> = ensemble.paths.iter().map(|t| t.sup_pow(p)).collect();
    Ok(moments_of(&sups).estimate().pth_root(p))
}

/// H_p norm of the pathwise difference of two coupled ensembles.
pub fn difference_hp(a: &PathEnsemble, b: &PathEnsemble, p: f64) -> Result<Estimate> {
    if a.base_seed != b.base_seed || a.len() != b.len() || a.grid != b.grid || a.dim != b.dim {
        return Err(Error::CouplingMismatch(format!(
            "seeds {} / {}, sizes {} / {}",
            a.base_seed,
            b.base_seed,
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::ConfigInvalid("H_p estimate needs at least 2 paths".into()));
    }
    let sups: Vec<f64> = a.paths.iter().zip(&b.paths).map(|(x, y)| x.sup_diff_pow(y, p)).collect();
    Ok(moments_of(&sups).estimate().pth_root(p))
}

use super::problem::{EvolutionProblem, NoiseTerm};
use super::schedule::solve_traced;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::noise::NoisePath;

/// Jump-adapted scheme for `du + Au dt + f(u) dt = int_Z G(z, u-) mu_bar(dz, dt)`.
///
/// Between consecutive points of the merged grid/event set the state follows
/// `u' = -Au - f(u) - int_Z G(z, u) m(dz)` by one exponential-Euler step; at an
/// event `(tau, z)` it jumps by `G(z, u(tau-))`. Grid values are post-jump.
pub fn solve_mild_poisson(problem: &EvolutionProblem, path: &NoisePath, u0: &[f64]) -> Result<Trajectory> {
    if !matches!(problem.noise, NoiseTerm::Poisson { .. }) {
        return Err(Error::DriverMismatch("problem is not driven by a Poisson measure".into()));
    }
    let (fine, schedule) = solve_traced(problem, Some(path), u0)?;
    Ok(schedule.on_grid(&fine))
}

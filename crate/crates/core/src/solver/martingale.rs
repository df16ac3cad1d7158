use super::problem::{EvolutionProblem, NoiseTerm};
use super::schedule::solve_traced;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::noise::NoisePath;

/// Exponential Euler for `du + Au dt + f(u) dt = B(u-) dM`:
///
/// `u_{k+1} = S(dt) [u_k + B(u_k) dM_k] - phi(dt) f(u_k)`,
/// with `phi(dt) = int_0^dt S(r) dr` applied exactly on the spectrum.
/// Coefficients see the pre-jump state `u_k`.
pub fn solve_mild_martingale(
    problem: &EvolutionProblem,
    path: &NoisePath,
    u0: &[f64],
) -> Result<Trajectory> {
    if !matches!(problem.noise, NoiseTerm::Martingale { .. }) {
        return Err(Error::DriverMismatch("problem is not martingale-driven".into()));
    }
    let (fine, schedule) = solve_traced(problem, Some(path), u0)?;
    Ok(schedule.on_grid(&fine))
}

/// Same recursion without noise.
pub(crate) fn drift_only(problem: &EvolutionProblem, u0: &[f64]) -> Result<Trajectory> {
    let (fine, schedule) = solve_traced(problem, None, u0)?;
    Ok(schedule.on_grid(&fine))
}

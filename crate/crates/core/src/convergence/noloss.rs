//! Running a quasi-monotone problem through its monotone shift.

use rayon::prelude::*;

use crate::error::Result;
use crate::solver::EvolutionProblem;

/// Same equation written with `A + eta I` and a compensating drift `-eta u`,
/// which the propagator integrates exactly.
pub fn shifted_problem(problem: &EvolutionProblem) -> EvolutionProblem {
    let (op, eta) = problem.operator.shift_operator();
    EvolutionProblem { operator: op, linear_drift: problem.linear_drift - eta, ..problem.clone() }
}

/// Largest coordinate difference between the direct and shifted solves over
/// `paths` coupled paths.
pub fn shift_deviation(problem: &EvolutionProblem, paths: usize, seed: u64) -> Result<f64> {
    problem.validate()?;
    let shifted = shifted_problem(problem);
    let devs = (0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let noise = problem.sample_noise(seed, i);
            let u0 = problem.initial.sample(seed, i);
            let a = problem.solve_with(noise.as_ref(), &u0)?;
            let b = shifted.solve_with(noise.as_ref(), &u0)?;
            Ok(a.states.iter().zip(&b.states).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

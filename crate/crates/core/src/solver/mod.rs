//! Exponential-Euler solvers for mild solutions, plain convolutions and
//! Monte Carlo path-norm estimates.

mod convolution;
mod deterministic;
mod ensemble;
mod martingale;
mod poisson;
mod problem;
mod schedule;
mod trajectory;

pub use convolution::{stochastic_convolution, ConvolutionIntegrand};
pub use deterministic::solve_deterministic;
pub use ensemble::{difference_hp, hp_norm_estimate, write_summary, PathEnsemble};
pub use martingale::solve_mild_martingale;
pub use poisson::solve_mild_poisson;
pub use problem::{EvolutionProblem, InitialSpec, NoiseTerm};
pub use schedule::{replay, solve_traced, Decomposition, Op, Schedule};
pub use trajectory::Trajectory;

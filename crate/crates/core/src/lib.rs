//! Monte Carlo laboratory for semilinear stochastic evolution equations
//! `du + Au dt + f(u) dt = B(u-) dM` and their Poisson-measure analogue, on
//! finite spectral truncations of a Hilbert space.

pub mod coefficients;
pub mod config;
pub mod convergence;
pub mod error;
pub mod noise;
pub mod operators;
pub mod rate;
pub mod runner;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};

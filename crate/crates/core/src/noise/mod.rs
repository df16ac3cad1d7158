//! Driving noises on a uniform grid and their quadratic variations.

mod driver;
mod grid;
mod hypothesis;
mod path;
pub mod rng;

pub use driver::{
    CompensatedCompoundPoissonDriver, JumpLaw, MartingaleDriver, NoiseDriver,
    PoissonRandomMeasureDriver, QWienerDriver,
};
pub use grid::TimeGrid;
pub use hypothesis::{verify_hypothesis_q, HypothesisQReport};
pub use path::{NoisePath, Realization};

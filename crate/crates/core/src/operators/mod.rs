//! Spectral truncations of linear maximal quasi-monotone operators.

mod family;
mod propagator;
mod spectral;
mod vector;

pub use family::{default_test_vectors, FamilyKind, OperatorFamily};
pub use propagator::{phi, Propagator};
pub use spectral::{SpectralOperator, ORTHONORMAL_TOL};
pub use vector::HVector;

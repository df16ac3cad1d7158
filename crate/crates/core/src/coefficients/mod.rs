//! Lipschitz nonlinearities `f`, `B`, `G` and convergent sequences of them.

mod audit;
mod builtin;
mod diffusion;
mod drift;
mod jump;
mod sequence;

pub use audit::{
    estimate_lipschitz, gaussian_sampler, DiffusionNorm, JumpNorm, LipschitzAudit,
};
pub use builtin::{builtin_family, Coefficient, ParamValue, Params};
pub use diffusion::{hs_q_squared, DiffusionMap};
pub use drift::DriftMap;
pub use jump::{mark_norm, JumpMap};
pub use sequence::{default_probes, CoefficientSequence, Perturbable, Perturbation};

//! Parameter sweeps with shared-noise coupling, rate fits and audits of
//! the estimates behind the convergence results.

mod deterministic;
mod engine;
pub mod fit;
mod linear;
mod maximal;
mod noloss;
pub mod registry;
mod report;
mod semilinear;

pub use deterministic::{exact_solution, run_trotter_kato, TrotterKatoSetup};
pub use engine::{coupled_moments, SweepOptions, Tolerance, ToleranceOn};
pub use linear::{
    audit_corollary_utile, corollary_cap, probe_lambda, run_resolvent_sweep, run_yosida_sweep, YosidaBound,
};
pub use maximal::{
    audit_maximal, default_maxi2_cases, default_star_cases, maxi2_cap, star_cap, MaximalCase,
};
pub use noloss::{shift_deviation, shifted_problem};
pub use registry::{lookup, TheoremInfo, REGISTRY};
pub use report::{Check, ConvergenceReport, ReportMeta, SweepPoint};
pub use semilinear::{run_additive_sweep, run_semilinear_sweep, NoiseSequence, SemilinearOutcome, SemilinearSetup};
pub(crate) use linear::{linear_id, require_linear};
pub(crate) use semilinear::semilinear_id;

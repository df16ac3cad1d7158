//! Coupled sweeps: every member is solved on the reference's noise path and
//! from the same initial-datum stream.

use serde::{Deserialize, Serialize};

use super::fit::{monotone_beyond_noise, strictly_decreasing_signal};
use super::report::{Check, ConvergenceReport, ReportMeta};
use crate::error::{Error, Result};
use crate::solver::{EvolutionProblem, NoiseTerm};
use crate::stats::{path_moments, Estimate};

/// Which quantity a tolerance is compared with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceOn {
    /// The H_p norm of the difference.
    #[default]
    Norm,
    /// `E sup |u_n - u|^p`.
    Moment,
}

/// The final point passes if it is below `absolute`, or below `relative`
/// times the first point. Unset fields never pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerance {
    pub absolute: Option<f64>,
    pub relative: Option<f64>,
    pub on: ToleranceOn,
}

impl Tolerance {
    pub fn absolute(v: f64) -> Self {
        Self { absolute: Some(v), ..Self::default() }
    }

    pub fn relative(v: f64) -> Self {
        Self { relative: Some(v), ..Self::default() }
    }

    pub fn on_moment(mut self) -> Self {
        self.on = ToleranceOn::Moment;
        self
    }

    pub fn is_set(&self) -> bool {
        self.absolute.is_some() || self.relative.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepOptions {
    pub paths: usize,
    pub seed: u64,
    pub tolerance: Tolerance,
    /// Require the fitted log-log slope to lie in this range.
    pub expected_slope: Option<(f64, f64)>,
    /// Require every point to be signal and the errors to strictly decrease.
    pub strict: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { paths: 1000, seed: 0, tolerance: Tolerance::default(), expected_slope: None, strict: false }
    }
}

impl SweepOptions {
    pub fn new(paths: usize, seed: u64) -> Self {
        Self { paths, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths < 2 {
            return Err(Error::ConfigInvalid(format!("need at least 2 paths, got {}", self.paths)));
        }
        Ok(())
    }

    pub fn meta(&self, problem: &EvolutionProblem) -> ReportMeta {
        ReportMeta {
            base_seed: self.seed,
            paths: self.paths,
            horizon: problem.grid.horizon(),
            steps: problem.grid.steps(),
            p: problem.p,
        }
    }
}

/// Members must be solvable on the reference's noise.
pub(crate) fn check_coupling(reference: &EvolutionProblem, members: &[EvolutionProblem]) -> Result<()> {
    reference.validate()?;
    for m in members {
        m.validate()?;
        if m.grid != reference.grid {
            return Err(Error::CouplingMismatch("sweep members use different grids".into()));
        }
        if m.driver() != reference.driver() {
            return Err(Error::CouplingMismatch("sweep members use different drivers".into()));
        }
        if m.dim() != reference.dim() {
            return Err(Error::CouplingMismatch("sweep members live in different spaces".into()));
        }
        if m.p != reference.p {
            return Err(Error::CouplingMismatch("sweep members use different exponents".into()));
        }
    }
    Ok(())
}

/// `E sup_k |u_n(t_k) - u(t_k)|^p` for each member, over `paths` coupled paths.
pub fn coupled_moments(
    reference: &EvolutionProblem,
    members: &[EvolutionProblem],
    paths: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    check_coupling(reference, members)?;
    let p = reference.p;
    let moments = path_moments(paths, members.len(), |i| {
        let i = i as u64;
        let noise = reference.sample_noise(seed, i);
        let u0 = reference.initial.sample(seed, i);
        let u = reference.solve_with(noise.as_ref(), &u0).expect("validated problem");
        members
            .iter()
            .map(|m| {
                let v0 = m.initial.sample(seed, i);
                let v = m.solve_with(noise.as_ref(), &v0).expect("validated problem");
                v.sup_diff_pow(&u, p)
            })
            .collect()
    });
    Ok(moments.iter().map(|m| m.estimate()).collect())
}

/// Standard checks on a sweep whose errors should go to zero.
pub(crate) fn convergence_checks(report: &mut ConvergenceReport, opts: &SweepOptions) {
    let errs = report.errors();
    report.push(Check::required(
        "monotone_beyond_noise",
        monotone_beyond_noise(&errs),
        "signal points (error > 5 se) never grow by more than 20%",
    ));
    if opts.strict {
        report.push(Check::required(
            "strictly_decreasing",
            strictly_decreasing_signal(&errs),
            "every point is signal and errors strictly decrease",
        ));
    }
    if let (Some(first), Some(last)) = (report.points.first(), report.points.last()) {
        let tol = opts.tolerance;
        if tol.is_set() {
            let (a, b) = match tol.on {
                ToleranceOn::Norm => (first.error, last.error),
                ToleranceOn::Moment => (first.moment, last.moment),
            };
            let abs_ok = tol.absolute.is_some_and(|t| b < t);
            let rel_ok = tol.relative.is_some_and(|r| b < r * a);
            report.push(Check::required(
                "final_tolerance",
                abs_ok || rel_ok,
                format!("final {b:e} vs first {a:e}, tolerance {tol:?}"),
            ));
        }
    }
    if let Some((lo, hi)) = opts.expected_slope {
        let (pass, detail) = match &report.fit {
            Some(f) => (f.slope >= lo && f.slope <= hi, format!("slope {:.4} expected in [{lo}, {hi}]", f.slope)),
            None => (false, "fewer than two signal points".to_string()),
        };
        report.push(Check::required("slope", pass, detail));
    }
}

pub(crate) fn noise_is_state_independent(noise: &NoiseTerm) -> bool {
    match noise {
        NoiseTerm::None => true,
        NoiseTerm::Martingale { diffusion, .. } => diffusion.is_additive(),
        NoiseTerm::Poisson { jump, .. } => jump.is_state_independent(),
    }
}

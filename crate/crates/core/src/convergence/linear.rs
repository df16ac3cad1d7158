//! Sweeps over operator approximations for linear equations: Yosida
//! regularisation, families converging in the strong resolvent sense, and
//! the explicit error bound for Yosida approximations with smooth data.

use nalgebra::{DMatrix, DVector};

use super::engine::{convergence_checks, coupled_moments, noise_is_state_independent, SweepOptions};
use super::report::{Check, ConvergenceReport, SweepPoint};
use crate::coefficients::hs_q_squared;
use crate::error::{Error, Result};
use crate::operators::{default_test_vectors, OperatorFamily};
use crate::solver::{EvolutionProblem, InitialSpec, NoiseTerm};

/// `f = 0` and noise coefficients that ignore the state.
pub(crate) fn require_linear(base: &EvolutionProblem) -> Result<()> {
    if !base.drift.is_zero() {
        return Err(Error::HypothesisViolated("linear sweep needs zero drift".into()));
    }
    if !noise_is_state_independent(&base.noise) {
        return Err(Error::HypothesisViolated("linear sweep needs state-independent noise".into()));
    }
    Ok(())
}

pub(crate) fn linear_id(base: &EvolutionProblem, yosida: bool) -> &'static str {
    match (&base.noise, yosida, base.p == 2.0) {
        (NoiseTerm::Poisson { .. }, true, _) => "trippona_lambda",
        (NoiseTerm::Poisson { .. }, false, _) => "trippona",
        (_, true, true) => "yo2sc",
        (_, true, false) => "yopsc",
        (_, false, true) => "nyo2sc",
        (_, false, false) => "nyotta",
    }
}

fn yosida_members(base: &EvolutionProblem, lambdas: &[f64]) -> Result<Vec<EvolutionProblem>> {
    if lambdas.is_empty() {
        return Err(Error::ConfigInvalid("empty lambda list".into()));
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::ConfigInvalid("lambda list must be strictly decreasing".into()));
    }
    lambdas
        .iter()
        .map(|&l| {
            let mut m = base.clone();
            m.operator = base.operator.yosida_operator(l)?;
            Ok(m)
        })
        .collect()
}

/// Errors `|y_lambda - y|_{H_p}` of Yosida-regularised linear equations
/// against the unregularised one, all driven by the same noise.
pub fn run_yosida_sweep(
    base: &EvolutionProblem,
    lambdas: &[f64],
    opts: &SweepOptions,
) -> Result<ConvergenceReport> {
    opts.validate()?;
    require_linear(base)?;
    let members = yosida_members(base, lambdas)?;
    let moments = coupled_moments(base, &members, opts.paths, opts.seed)?;
    let points = lambdas.iter().zip(moments).map(|(&l, m)| SweepPoint::from_moment(l, m, base.p)).collect();
    let mut report = ConvergenceReport::new(linear_id(base, true), "lambda", points, opts.meta(base));
    convergence_checks(&mut report, opts);
    Ok(report)
}

/// Resolvent parameter used to report strong-resolvent distances.
pub fn probe_lambda(family: &OperatorFamily) -> f64 {
    if family.lambda0.is_finite() {
        0.5 * family.lambda0
    } else {
        0.5
    }
}

/// Errors of linear equations with `A_n` from `family` against `A`.
pub fn run_resolvent_sweep(
    base: &EvolutionProblem,
    family: &OperatorFamily,
    ns: &[usize],
    opts: &SweepOptions,
) -> Result<ConvergenceReport> {
    opts.validate()?;
    require_linear(base)?;
    if family.limit != base.operator {
        return Err(Error::ConfigInvalid("family limit differs from the problem's operator".into()));
    }
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) || ns[0] == 0 {
        return Err(Error::ConfigInvalid("n list must be positive and strictly increasing".into()));
    }
    let lambda = probe_lambda(family);
    let tests = default_test_vectors(base.dim(), 4, opts.seed);
    let distances = family.resolvent_profile(ns, lambda, &tests)?;
    if let Some((n, eta)) = family.eta_excess(ns)? {
        return Err(Error::HypothesisViolated(format!("member {n} has shift {eta} above the limit's")));
    }
    let members: Vec<EvolutionProblem> = ns
        .iter()
        .map(|&n| {
            let mut m = base.clone();
            m.operator = family.member(n)?;
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let moments = coupled_moments(base, &members, opts.paths, opts.seed)?;
    let points = ns
        .iter()
        .zip(moments)
        .zip(&distances)
        .map(|((&n, m), &dist)| SweepPoint {
            resolvent_distance: Some(dist),
            ..SweepPoint::from_moment(n as f64, m, base.p)
        })
        .collect();
    let mut report = ConvergenceReport::new(linear_id(base, false), "n", points, opts.meta(base));
    report.detail("resolvent_lambda", lambda);
    if let Some(tol) = opts.tolerance.absolute {
        let star = report.points.iter().position(|p| match opts.tolerance.on {
            super::ToleranceOn::Norm => p.error <= tol,
            super::ToleranceOn::Moment => p.moment <= tol,
        });
        if let Some(i) = star {
            report.detail("n_star", ns[i] as f64);
        }
    }
    convergence_checks(&mut report, opts);
    Ok(report)
}

/// `E |M u_0|^2` for a linear map `M` and the problem's initial law.
fn expected_sq(m: &DMatrix<f64>, initial: &InitialSpec) -> f64 {
    match initial {
        InitialSpec::Deterministic { value } => (m * DVector::from_column_slice(value)).norm_squared(),
        InitialSpec::Gaussian { mean, sd } => {
            let mut s = (m * DVector::from_column_slice(mean)).norm_squared();
            for (k, sk) in sd.iter().enumerate() {
                s += sk * sk * m.column(k).norm_squared();
            }
            s
        }
    }
}

/// The explicit bound on `E sup |y - y_lambda|^2`, split at a resolvent
/// parameter `eps`.
#[derive(Clone, Debug)]
pub struct YosidaBound {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    q: DMatrix<f64>,
    initial: InitialSpec,
    horizon: f64,
}

impl YosidaBound {
    pub fn new(base: &EvolutionProblem) -> Result<Self> {
        let (b, q) = match &base.noise {
            NoiseTerm::Martingale { driver, diffusion } if diffusion.is_additive() => {
                let q = driver.covariance();
                (diffusion.matrix(&vec![0.0; base.dim()], q.nrows()), q)
            }
            NoiseTerm::None => (DMatrix::zeros(base.dim(), 1), DMatrix::zeros(1, 1)),
            _ => {
                return Err(Error::HypothesisViolated(
                    "the explicit Yosida bound needs additive martingale noise".into(),
                ))
            }
        };
        Ok(Self { a: base.operator.matrix(), b, q, initial: base.initial.clone(), horizon: base.grid.horizon() })
    }

    fn resolvent(&self, eps: f64) -> DMatrix<f64> {
        let d = self.a.nrows();
        let m = DMatrix::identity(d, d) + &self.a * eps;
        m.lu().try_inverse().expect("I + eps A is invertible for admissible eps")
    }

    /// `E|y0 - J y0|^2 + T|(B - JB)Q^{1/2}|^2 + T lambda (E|AJ y0|^2 + T|AJB Q^{1/2}|^2)`
    pub fn rhs(&self, eps: f64, lambda: f64) -> f64 {
        let d = self.a.nrows();
        let j = self.resolvent(eps);
        let i_j = DMatrix::identity(d, d) - &j;
        let aj = &self.a * &j;
        let t = self.horizon;
        expected_sq(&i_j, &self.initial)
            + t * hs_q_squared(&(&i_j * &self.b), &self.q)
            + t * lambda * (expected_sq(&aj, &self.initial) + t * hs_q_squared(&(&aj * &self.b), &self.q))
    }

    /// `(E|A y0|^2 + T|AB Q^{1/2}|^2) + T (E|y0|^2 + T|B Q^{1/2}|^2)`; with
    /// `eps = lambda^{1/4}` and a monotone `A`, `rhs <= sqrt(lambda) * envelope`.
    pub fn envelope(&self) -> f64 {
        let d = self.a.nrows();
        let t = self.horizon;
        let id = DMatrix::identity(d, d);
        expected_sq(&self.a, &self.initial)
            + t * hs_q_squared(&(&self.a * &self.b), &self.q)
            + t * (expected_sq(&id, &self.initial) + t * hs_q_squared(&self.b, &self.q))
    }
}

/// Largest constant the bound may need: Doob's inequality for the noise
/// part and `(a + b)^2 <= 2a^2 + 2b^2` for the splits, times `e^{2 eta T}`.
pub fn corollary_cap(eta: f64, horizon: f64) -> f64 {
    48.0 * (2.0 * eta * horizon).exp()
}

/// Fits one constant `C` with `E sup|y - y_lambda|^2 <= C rhs(eps, lambda)`
/// over all `lambdas` and `eps` in `epsilons` plus `lambda^{1/4}`.
pub fn audit_corollary_utile(
    base: &EvolutionProblem,
    lambdas: &[f64],
    epsilons: &[f64],
    opts: &SweepOptions,
) -> Result<ConvergenceReport> {
    opts.validate()?;
    require_linear(base)?;
    if base.p != 2.0 {
        return Err(Error::HypothesisViolated("the explicit Yosida bound is an H_2 estimate".into()));
    }
    let bound = YosidaBound::new(base)?;
    let members = yosida_members(base, lambdas)?;
    for &e in epsilons {
        base.operator.check_lambda(e)?;
    }
    let moments = coupled_moments(base, &members, opts.paths, opts.seed)?;
    let points: Vec<SweepPoint> =
        lambdas.iter().zip(&moments).map(|(&l, m)| SweepPoint::from_moment(l, *m, 2.0)).collect();
    let mut report = ConvergenceReport::new("cor_utile", "lambda", points, opts.meta(base));

    let mut fitted = 0.0_f64;
    let mut fitted_upper = 0.0_f64;
    let mut envelope_ok = true;
    let env = bound.envelope();
    let monotone = base.operator.eta() == 0.0;
    for (&l, m) in lambdas.iter().zip(&moments) {
        let quarter = l.powf(0.25);
        let mut eps: Vec<f64> = epsilons.to_vec();
        if base.operator.check_lambda(quarter).is_ok() {
            eps.push(quarter);
        }
        for e in eps {
            let rhs = bound.rhs(e, l);
            let (r, ru) = if rhs > 0.0 {
                (m.value / rhs, (m.value + 3.0 * m.se) / rhs)
            } else if m.value == 0.0 {
                (0.0, 0.0)
            } else {
                (f64::INFINITY, f64::INFINITY)
            };
            fitted = fitted.max(r);
            fitted_upper = fitted_upper.max(ru);
        }
        if monotone && base.operator.check_lambda(quarter).is_ok() {
            let rhs = bound.rhs(quarter, l);
            envelope_ok &= rhs <= l.sqrt() * env * (1.0 + 1e-12);
        }
    }
    let cap = corollary_cap(base.operator.eta(), base.grid.horizon());
    report.detail("fitted_constant", fitted);
    report.detail("fitted_constant_upper", fitted_upper);
    report.detail("constant_cap", cap);
    report.detail("envelope", env);
    report.push(Check::required(
        "bound_holds",
        fitted_upper <= cap,
        format!("E sup|y - y_lambda|^2 <= C rhs with C = {fitted:.4} (C + 3se: {fitted_upper:.4}), cap {cap:.1}"),
    ));
    if monotone {
        report.push(Check::required(
            "sqrt_lambda_envelope",
            envelope_ok,
            "rhs(lambda^{1/4}, lambda) <= sqrt(lambda) * envelope for every lambda",
        ));
    }
    if let (Some(&l), Some(m)) = (lambdas.last(), moments.last()) {
        let floor_ok = epsilons.iter().all(|&e| m.value < bound.rhs(e, l));
        report.push(Check::info(
            "below_eps_floor",
            floor_ok,
            "at the smallest lambda the error sits below every fixed-eps bound",
        ));
    }
    Ok(report)
}

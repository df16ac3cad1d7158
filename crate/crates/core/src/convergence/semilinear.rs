//! Joint perturbation of operator, drift, noise coefficient and initial
//! datum, with the mild-formula decomposition of the error and empirical
//! versions of the three estimates that close the Gronwall argument.

use super::engine::{check_coupling, convergence_checks, SweepOptions};
use super::fit::monotone_beyond_noise;
use super::maximal::{maxi2_cap, star_cap};
use super::report::{Check, ConvergenceReport, SweepPoint};
use crate::coefficients::{
    estimate_lipschitz, gaussian_sampler, CoefficientSequence, DiffusionMap, DiffusionNorm, DriftMap, JumpMap,
    JumpNorm,
};
use crate::error::{Error, Result};
use crate::operators::OperatorFamily;
use crate::rate::Rate;
use crate::solver::{replay, solve_traced, EvolutionProblem, NoiseTerm, Trajectory};
use crate::stats::{path_moments, Estimate};

#[derive(Clone, Debug, PartialEq)]
pub enum NoiseSequence {
    None,
    Diffusion(CoefficientSequence<DiffusionMap>),
    Jump(CoefficientSequence<JumpMap>),
}

/// `(A_n, f_n, B_n or G_n, u_{0n})` around a reference problem.
#[derive(Clone, Debug)]
pub struct SemilinearSetup {
    pub base: EvolutionProblem,
    pub family: OperatorFamily,
    pub drift: CoefficientSequence<DriftMap>,
    pub noise: NoiseSequence,
    /// `u_{0n} = u_0 + rate(n) c`
    pub initial_shift: Option<(Vec<f64>, Rate)>,
}

impl SemilinearSetup {
    /// Every sequence constant.
    pub fn unperturbed(base: EvolutionProblem) -> Self {
        let noise = match &base.noise {
            NoiseTerm::None => NoiseSequence::None,
            NoiseTerm::Martingale { diffusion, .. } => {
                NoiseSequence::Diffusion(CoefficientSequence::constant(diffusion.clone()))
            }
            NoiseTerm::Poisson { jump, .. } => NoiseSequence::Jump(CoefficientSequence::constant(jump.clone())),
        };
        Self {
            family: OperatorFamily::constant(base.operator.clone()),
            drift: CoefficientSequence::constant(base.drift.clone()),
            noise,
            initial_shift: None,
            base,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::ConfigInvalid(format!("{what} sequence does not converge to the problem's")));
        if self.family.limit != self.base.operator {
            return bad("operator");
        }
        if self.drift.limit != self.base.drift {
            return bad("drift");
        }
        match (&self.noise, &self.base.noise) {
            (NoiseSequence::None, NoiseTerm::None) => {}
            (NoiseSequence::Diffusion(s), NoiseTerm::Martingale { diffusion, .. }) if &s.limit == diffusion => {}
            (NoiseSequence::Jump(s), NoiseTerm::Poisson { jump, .. }) if &s.limit == jump => {}
            _ => return bad("noise coefficient"),
        }
        if let Some((c, _)) = &self.initial_shift {
            if c.len() != self.base.dim() {
                return Err(Error::DimensionMismatch { expected: self.base.dim(), got: c.len() });
            }
        }
        Ok(())
    }

    pub fn member(&self, n: usize) -> Result<EvolutionProblem> {
        let mut m = self.base.clone();
        m.operator = self.family.member(n)?;
        m.drift = self.drift.member(n);
        m.noise = match (&self.noise, &self.base.noise) {
            (NoiseSequence::Diffusion(s), NoiseTerm::Martingale { driver, .. }) => {
                NoiseTerm::Martingale { driver: driver.clone(), diffusion: s.member(n) }
            }
            (NoiseSequence::Jump(s), NoiseTerm::Poisson { driver, .. }) => {
                NoiseTerm::Poisson { driver: driver.clone(), jump: s.member(n) }
            }
            _ => self.base.noise.clone(),
        };
        if let Some((c, rate)) = &self.initial_shift {
            m.initial = self.base.initial.shifted(c, rate.at(n));
        }
        m.validate()?;
        Ok(m)
    }

    /// Declared Lipschitz constants, audited by sampling, and their maxima
    /// over the limit and the members `ns`: `(L_f, L_noise)`.
    pub fn lipschitz_bounds(&self, ns: &[usize], seed: u64) -> Result<(f64, f64)> {
        let d = self.base.dim();
        let sampler = || gaussian_sampler(d, 1.0);
        let mut problems = vec![self.base.clone()];
        for &n in ns {
            problems.push(self.member(n)?);
        }
        let audit = |r: Result<f64>| {
            r.map_err(|e| Error::HypothesisViolated(format!("uniform Lipschitz audit failed: {e}")))
        };
        let (mut lf, mut ln) = (0.0_f64, 0.0_f64);
        for (j, m) in problems.iter().enumerate() {
            let s = seed.wrapping_add(j as u64);
            audit(estimate_lipschitz(&m.drift, sampler(), 200, s))?;
            lf = lf.max(m.drift.lipschitz());
            match &m.noise {
                NoiseTerm::None => {}
                NoiseTerm::Martingale { driver, diffusion } => {
                    let q = driver.covariance();
                    let norm = DiffusionNorm { map: diffusion, q: &q };
                    audit(estimate_lipschitz(&norm, sampler(), 200, s))?;
                    ln = ln.max(diffusion.lipschitz(&q));
                }
                NoiseTerm::Poisson { driver, jump } => {
                    let norm = JumpNorm { map: jump, intensities: &driver.intensities, p: m.p };
                    audit(estimate_lipschitz(&norm, sampler(), 200, s))?;
                    ln = ln.max(jump.lipschitz(&driver.intensities, m.p));
                }
            }
        }
        Ok((lf, ln))
    }
}

/// Number of audited times in `(0, T]`.
const AUDIT_POINTS: usize = 10;
/// Per-member slots before the audit block.
const HEAD: usize = 5;
/// Quantities per audited time.
const PER_TIME: usize = 12;

/// Offsets inside an audit block.
mod slot {
    pub const X: usize = 0;
    pub const INTEGRAL: usize = 1;
    pub const UNO_LHS: usize = 2;
    pub const UNO_B: usize = 3;
    pub const DUE_LHS: usize = 4;
    pub const DUE: [usize; 3] = [5, 6, 7];
    pub const STO_LHS: usize = 8;
    pub const STO: [usize; 3] = [9, 10, 11];
}

fn audit_indices(steps: usize) -> Vec<usize> {
    let a = AUDIT_POINTS.min(steps);
    let mut idx: Vec<usize> = (1..=a).map(|j| (j * steps).div_ceil(a)).collect();
    idx.dedup();
    idx
}

fn sup_pow_at(a: &Trajectory, b: &Trajectory, p: f64, upto: &[usize]) -> Vec<f64> {
    let run = a.running_sup_diff_pow(b, p);
    upto.iter().map(|&j| run[j]).collect()
}

fn dist_pow(a: &[f64], b: &[f64], p: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt().powf(p)
}

#[derive(Clone, Debug)]
pub struct SemilinearOutcome {
    pub report: ConvergenceReport,
    /// `lemma_uno`, `lemma_due` and, with noise, `lemma_tre` or `lemma_treppe`.
    pub lemmas: Vec<ConvergenceReport>,
}

impl SemilinearOutcome {
    pub fn lemma(&self, id: &str) -> Option<&ConvergenceReport> {
        self.lemmas.iter().find(|r| r.theorem_id == id)
    }
}

pub(crate) fn semilinear_id(base: &EvolutionProblem) -> &'static str {
    match &base.noise {
        NoiseTerm::Poisson { .. } => "nyop",
        NoiseTerm::Martingale { diffusion, .. } if base.p > 2.0 && diffusion.is_additive() => "additive_p",
        _ => "nyo2",
    }
}

/// Errors `|u_n - u|_{H_p}` along `ns`, the three mild-formula pieces of each
/// error, and the lemma audits.
pub fn run_semilinear_sweep(
    setup: &SemilinearSetup,
    ns: &[usize],
    opts: &SweepOptions,
) -> Result<SemilinearOutcome> {
    run_with_id(setup, ns, opts, semilinear_id(&setup.base))
}

pub(crate) fn run_with_id(
    setup: &SemilinearSetup,
    ns: &[usize],
    opts: &SweepOptions,
    id: &str,
) -> Result<SemilinearOutcome> {
    opts.validate()?;
    setup.check()?;
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) || ns[0] == 0 {
        return Err(Error::ConfigInvalid("n list must be positive and strictly increasing".into()));
    }
    if let Some((n, eta)) = setup.family.eta_excess(ns)? {
        return Err(Error::HypothesisViolated(format!("member {n} has shift {eta} above the limit's")));
    }
    let base = &setup.base;
    let (lf, ln) = setup.lipschitz_bounds(ns, opts.seed)?;
    let members: Vec<EvolutionProblem> = ns.iter().map(|&n| setup.member(n)).collect::<Result<_>>()?;
    // Members' operators with the limit's coefficients.
    let mixed: Vec<EvolutionProblem> = members
        .iter()
        .map(|m| EvolutionProblem { drift: base.drift.clone(), noise: base.noise.clone(), ..m.clone() })
        .collect();
    check_coupling(base, &members)?;

    let p = base.p;
    let audit = audit_indices(base.grid.steps());
    let width_member = HEAD + audit.len() * PER_TIME;
    let seed = opts.seed;
    let moments = path_moments(opts.paths, members.len() * width_member, |i| {
        let i = i as u64;
        let noise = base.sample_noise(seed, i);
        let noise = noise.as_ref();
        let u0 = base.initial.sample(seed, i);
        let (u, sched) = solve_traced(base, noise, &u0).expect("validated problem");
        let refd = replay(base, noise, &sched, &u, &u0).expect("validated problem");
        let fine_at: Vec<usize> = audit.iter().map(|&k| sched.grid_index[k]).collect();
        let last = *sched.grid_index.last().expect("grid has points");
        let mut out = Vec::with_capacity(members.len() * width_member);
        for (m, mx) in members.iter().zip(&mixed) {
            let v0 = m.initial.sample(seed, i);
            let (v, _) = solve_traced(m, noise, &v0).expect("validated problem");
            let own = replay(m, noise, &sched, &v, &v0).expect("validated problem");
            let aux = replay(m, noise, &sched, &u, &u0).expect("validated problem");
            let mid = replay(mx, noise, &sched, &u, &u0).expect("validated problem");

            let grid_err = sched.grid_index.iter().map(|&j| dist_pow(v.state(j), u.state(j), p)).fold(0.0, f64::max);
            let x = v.running_sup_diff_pow(&u, p);
            out.push(grid_err);
            out.push(own.semigroup.sup_diff_pow(&refd.semigroup, p));
            out.push(own.drift.sup_diff_pow(&refd.drift, p));
            out.push(own.noise.sup_diff_pow(&refd.noise, p));
            out.push(dist_pow(&v0, &u0, p));

            let mut integral = vec![0.0; sched.ops.len() + 1];
            for j in 0..sched.ops.len() {
                integral[j + 1] = integral[j] + sched.duration(j) * x[j];
            }
            let series = [
                sup_pow_at(&own.semigroup, &refd.semigroup, p, &fine_at),
                sup_pow_at(&aux.semigroup, &refd.semigroup, p, &fine_at),
                sup_pow_at(&own.drift, &refd.drift, p, &fine_at),
                sup_pow_at(&own.drift, &aux.drift, p, &fine_at),
                sup_pow_at(&aux.drift, &mid.drift, p, &fine_at),
                sup_pow_at(&mid.drift, &refd.drift, p, &fine_at),
                sup_pow_at(&own.noise, &refd.noise, p, &fine_at),
                sup_pow_at(&own.noise, &aux.noise, p, &fine_at),
                sup_pow_at(&aux.noise, &mid.noise, p, &fine_at),
                sup_pow_at(&mid.noise, &refd.noise, p, &fine_at),
            ];
            for (a, &j) in fine_at.iter().enumerate() {
                out.push(x[j]);
                out.push(integral[j]);
                for s in &series {
                    out.push(s[a]);
                }
            }
            debug_assert_eq!(fine_at.last(), Some(&last));
        }
        out
    });
    let est: Vec<Estimate> = moments.iter().map(|m| m.estimate()).collect();
    let blocks: Vec<&[Estimate]> = est.chunks(width_member).collect();
    let at = |b: &[Estimate], a: usize, s: usize| b[HEAD + a * PER_TIME + s];

    let points: Vec<SweepPoint> =
        ns.iter().zip(&blocks).map(|(&n, b)| SweepPoint::from_moment(n as f64, b[0], p)).collect();
    let mut report = ConvergenceReport::new(id, "n", points, opts.meta(base));
    convergence_checks(&mut report, opts);

    // Mild-formula decomposition.
    let mut triangle = true;
    for (&n, b) in ns.iter().zip(&blocks) {
        let parts: Vec<f64> = (1..4).map(|s| b[s].pth_root(p).value).collect();
        let err = b[0].pth_root(p).value;
        triangle &= err <= 3.0 * parts.iter().sum::<f64>() * (1.0 + 1e-12) + 1e-300;
        report.detail(&format!("semigroup_part[n={n}]"), parts[0]);
        report.detail(&format!("drift_part[n={n}]"), parts[1]);
        report.detail(&format!("noise_part[n={n}]"), parts[2]);
    }
    report.push(Check::required(
        "triangle_decomposition",
        triangle,
        "error <= 3 (|s_n - s| + |D_n - D| + |Y_n - Y|) in H_p",
    ));

    // Constants of the three estimates.
    let horizon = base.grid.horizon();
    let eta = base.operator.eta();
    let k = 3f64.powf(p - 1.0);
    let gamma_due = k * ((eta * horizon).exp() * lf).powf(p) * horizon.powf(p - 1.0);
    let sto_cap = match &base.noise {
        NoiseTerm::None => 0.0,
        NoiseTerm::Martingale { .. } => maxi2_cap(eta, horizon),
        NoiseTerm::Poisson { .. } => 2.0 * star_cap(p, eta, horizon),
    };
    let gamma_sto = k * sto_cap * ln.powf(p);
    let gamma = k * (gamma_due + gamma_sto);
    report.detail("lipschitz_drift", lf);
    report.detail("lipschitz_noise", ln);
    report.detail("gamma", gamma);

    let times: Vec<f64> = audit.iter().map(|&a| base.grid.time(a)).collect();
    let last = audit.len() - 1;
    let mut uno = Audit::default();
    let mut due = Audit::default();
    let mut sto = Audit::default();
    let mut gronwall_ok = true;
    let mut gamma_fit_due = 0.0_f64;
    let mut gamma_fit_sto = 0.0_f64;
    let mut closure_margin = f64::INFINITY;
    let mut closure = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let u0_norm = b[4].pth_root(p);
        let uno_rhs = |a: usize| {
            let e = (eta * times[a]).exp();
            let sb = at(b, a, slot::UNO_B).pth_root(p);
            Estimate { value: e * u0_norm.value + sb.value, se: e * u0_norm.se + sb.se }
        };
        let pair = |slots: [usize; 3]| {
            let (t2, t3) = (at(b, last, slots[1]), at(b, last, slots[2]));
            Estimate { value: k * (t2.value + t3.value), se: k * t2.se.hypot(t3.se) }
        };
        let d_uno = {
            let r = uno_rhs(last);
            Estimate { value: r.value.powf(p), se: p * r.value.powf(p - 1.0) * r.se }
        };
        let d_due = pair(slot::DUE);
        let d_sto = pair(slot::STO);
        let eps = k * (d_uno.value + d_due.value + d_sto.value);
        for a in 0..audit.len() {
            let integral = at(b, a, slot::INTEGRAL).value;
            uno.record(at(b, a, slot::UNO_LHS).pth_root(p).value, uno_rhs(a).value);
            due.record(at(b, a, slot::DUE_LHS).value, d_due.value + gamma_due * integral);
            sto.record(at(b, a, slot::STO_LHS).value, d_sto.value + gamma_sto * integral);
            let x = at(b, a, slot::X).value;
            gronwall_ok &= x <= (eps + gamma * integral) * (1.0 + 1e-12) + 1e-300;
            if integral > 0.0 {
                gamma_fit_due = gamma_fit_due.max(at(b, a, slot::DUE[0]).value / integral);
                gamma_fit_sto = gamma_fit_sto.max(at(b, a, slot::STO[0]).value / integral);
            }
        }
        let x_t = at(b, last, slot::X).value;
        closure.push((x_t, eps));
        let bound = (gamma * horizon).exp() * eps;
        gronwall_ok &= x_t <= bound * (1.0 + 1e-12) + 1e-300;
        if bound > 0.0 {
            closure_margin = closure_margin.min(1.0 - x_t / bound);
        }
        uno.deltas.push(d_uno);
        due.deltas.push(d_due);
        sto.deltas.push(d_sto);
    }
    report.push(Check::required(
        "gronwall_closure",
        gronwall_ok,
        format!("E sup|u_n - u|^p <= e^(gamma T) eps' at T, gamma = {gamma:e}"),
    ));
    if closure_margin.is_finite() {
        report.detail("gronwall_min_margin", closure_margin);
    }
    // Same closure with the constants measured on this ensemble.
    let gamma_fit = k * k * (gamma_fit_due + gamma_fit_sto);
    let fitted_ok = closure.iter().all(|&(x, eps)| x <= (gamma_fit * horizon).exp() * eps * (1.0 + 1e-12) + 1e-300);
    report.detail("gamma_fit", gamma_fit);
    report.push(Check::required(
        "gronwall_closure_fitted",
        fitted_ok,
        format!("same closure with the fitted gamma = {gamma_fit:e}"),
    ));

    let meta = opts.meta(base);
    let mut lemmas = vec![
        uno.report("lemma_uno", ns, meta.clone(), &[]),
        due.report(
            "lemma_due",
            ns,
            meta.clone(),
            &[("gamma_declared", gamma_due), ("gamma_fit", k * gamma_fit_due), ("lipschitz", lf)],
        ),
    ];
    match &base.noise {
        NoiseTerm::None => {}
        noise => {
            let id = if matches!(noise, NoiseTerm::Poisson { .. }) { "lemma_treppe" } else { "lemma_tre" };
            let n_fit = if ln > 0.0 { gamma_fit_sto / ln.powf(p) } else { 0.0 };
            lemmas.push(sto.report(
                id,
                ns,
                meta,
                &[
                    ("gamma_declared", gamma_sto),
                    ("gamma_fit", k * gamma_fit_sto),
                    ("lipschitz", ln),
                    ("maximal_constant_cap", sto_cap),
                    ("maximal_constant_fit", n_fit),
                ],
            ));
        }
    }
    Ok(SemilinearOutcome { report, lemmas })
}

/// Left- and right-hand sides of one estimate across members and times.
struct Audit {
    holds: bool,
    min_margin: f64,
    deltas: Vec<Estimate>,
}

impl Default for Audit {
    fn default() -> Self {
        Self { holds: true, min_margin: f64::INFINITY, deltas: Vec::new() }
    }
}

impl Audit {
    fn record(&mut self, lhs: f64, rhs: f64) {
        self.holds &= lhs <= rhs * (1.0 + 1e-12) + 1e-300;
        if rhs > 0.0 {
            self.min_margin = self.min_margin.min(1.0 - lhs / rhs);
        }
    }

    fn report(
        &self,
        id: &str,
        ns: &[usize],
        meta: super::report::ReportMeta,
        extra: &[(&str, f64)],
    ) -> ConvergenceReport {
        let points = ns
            .iter()
            .zip(&self.deltas)
            .map(|(&n, d)| SweepPoint {
                param: n as f64,
                error: d.value,
                stderr: d.se,
                moment: d.value,
                moment_se: d.se,
                resolvent_distance: None,
            })
            .collect();
        let mut r = ConvergenceReport::new(id, "n", points, meta);
        r.push(Check::required("inequality_holds", self.holds, "left side <= delta + gamma * integral at every audited time"));
        r.push(Check::required(
            "delta_decreasing",
            monotone_beyond_noise(&self.deltas),
            "delta terms never grow by more than 20% between signal points",
        ));
        if self.min_margin.is_finite() {
            r.detail("min_margin", self.min_margin);
        }
        for (k, v) in extra {
            r.detail(k, *v);
        }
        r
    }
}

/// Semilinear sweep restricted to additive martingale noise, any `p >= 2`.
pub fn run_additive_sweep(
    setup: &SemilinearSetup,
    ns: &[usize],
    opts: &SweepOptions,
) -> Result<SemilinearOutcome> {
    let additive = match (&setup.base.noise, &setup.noise) {
        (NoiseTerm::Martingale { diffusion, .. }, NoiseSequence::Diffusion(s)) => {
            diffusion.is_additive() && ns.iter().all(|&n| s.member(n).is_additive())
        }
        _ => false,
    };
    if !additive {
        return Err(Error::HypothesisViolated("additive sweep needs additive martingale noise".into()));
    }
    let mut out = run_with_id(setup, ns, opts, "additive_p")?;
    if setup.base.operator.eta() > 0.0 {
        let dev = super::noloss::shift_deviation(&setup.base, opts.paths.min(50), opts.seed)?;
        out.report.detail("shift_max_deviation", dev);
        out.report.push(Check::required(
            "shift_equivalence",
            dev <= 1e-10,
            format!("shifted monotone run vs direct run: max deviation {dev:e}"),
        ));
    }
    Ok(out)
}

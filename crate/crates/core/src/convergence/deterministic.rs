//! Deterministic approximation of `u' + Au = f` by `u_n' + A_n u_n = f_n`.

use super::report::{Check, ConvergenceReport, ReportMeta, SweepPoint};
use crate::error::{Error, Result};
use crate::noise::TimeGrid;
use crate::operators::{phi, OperatorFamily, SpectralOperator};
use crate::rate::Rate;
use crate::solver::{solve_deterministic, Trajectory};

/// Constant forcing, optionally perturbed to `f_n = f + rate(n) g`.
#[derive(Clone, Debug)]
pub struct TrotterKatoSetup {
    pub family: OperatorFamily,
    pub forcing: Vec<f64>,
    pub forcing_shift: Option<(Vec<f64>, Rate)>,
    pub u0: Vec<f64>,
    pub grid: TimeGrid,
}

/// `u(t_k) = S(t_k) u0 + int_0^{t_k} S(r) f dr` in closed form.
pub fn exact_solution(op: &SpectralOperator, forcing: &[f64], u0: &[f64], grid: &TimeGrid) -> Trajectory {
    let mut t = Trajectory::with_capacity(op.dim(), grid.steps() + 1);
    for s in grid.times() {
        let a = op.spectral_map(u0, |a| (-s * a).exp());
        let b = op.spectral_map(forcing, |a| phi(a, s));
        let u: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        t.push(&u);
    }
    t
}

fn sup_dist(a: &Trajectory, b: &Trajectory) -> f64 {
    (0..a.len()).map(|k| a.dist_at(b, k)).fold(0.0, f64::max)
}

fn solve_const(op: &SpectralOperator, f: &[f64], u0: &[f64], grid: &TimeGrid) -> Trajectory {
    solve_deterministic(op, |_, out| out.copy_from_slice(f), u0, grid)
}

/// Sup-norm errors of the approximations against the closed-form limit.
pub fn run_trotter_kato(setup: &TrotterKatoSetup, ns: &[usize], tolerance: f64) -> Result<ConvergenceReport> {
    let op = &setup.family.limit;
    let d = op.dim();
    for v in [&setup.forcing, &setup.u0] {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: v.len() });
        }
    }
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) || ns[0] == 0 {
        return Err(Error::ConfigInvalid("n list must be positive and strictly increasing".into()));
    }
    let exact = exact_solution(op, &setup.forcing, &setup.u0, &setup.grid);
    let t = setup.grid.horizon();
    let mut points = Vec::new();
    let mut forcing_ok = true;
    for &n in ns {
        let an = setup.family.member(n)?;
        let op_only = solve_const(&an, &setup.forcing, &setup.u0, &setup.grid);
        let mut err = sup_dist(&op_only, &exact);
        if let Some((g, rate)) = &setup.forcing_shift {
            if g.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: g.len() });
            }
            let r = rate.at(n);
            let fn_: Vec<f64> = setup.forcing.iter().zip(g).map(|(f, c)| f + r * c).collect();
            let full = solve_const(&an, &fn_, &setup.u0, &setup.grid);
            let extra = sup_dist(&full, &op_only);
            let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let bound = (an.eta() * t).exp() * t * gnorm * r;
            forcing_ok &= extra <= bound * (1.0 + 1e-9) + 1e-15;
            err = sup_dist(&full, &exact);
        }
        points.push(SweepPoint {
            param: n as f64,
            error: err,
            stderr: 0.0,
            moment: err,
            moment_se: 0.0,
            resolvent_distance: None,
        });
    }
    let meta = ReportMeta { base_seed: 0, paths: 1, horizon: t, steps: setup.grid.steps(), p: f64::INFINITY };
    let mut report = ConvergenceReport::new("titikaka", "n", points, meta);
    let errs: Vec<f64> = report.points.iter().map(|p| p.error).collect();
    report.push(Check::required(
        "decreasing",
        errs.windows(2).all(|w| w[1] < w[0] || (w[1] == 0.0 && w[0] == 0.0)),
        "sup error decreases in n",
    ));
    let last = *errs.last().expect("non-empty sweep");
    report.push(Check::required("final_tolerance", last < tolerance, format!("final {last:e} < {tolerance:e}")));
    if setup.forcing_shift.is_some() {
        report.push(Check::required(
            "forcing_bound",
            forcing_ok,
            "extra error from f_n - f stays below e^(eta T) T |g| r_n",
        ));
    }
    Ok(report)
}

//! The sequence of elementary updates a path goes through. Martingale paths
//! take one combined update per grid cell; Poisson-measure paths split each
//! cell at its event times into drift sub-steps and jumps.

use super::problem::{EvolutionProblem, NoiseTerm};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::noise::{NoisePath, TimeGrid};
use crate::operators::Propagator;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Op {
    /// Grid cell `k`: `u <- S(dt)[u + B(u) dM_k] - phi(dt) f(u)`.
    Cell(usize),
    /// `u <- S(h) u - phi(h) [f(u) + int G(z,u) m(dz)]`
    Drift(f64),
    /// `u <- u + G(z, u)`
    Jump(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub ops: Vec<Op>,
    /// Position in the fine sequence of each grid point; length `steps + 1`.
    pub grid_index: Vec<usize>,
    pub dt: f64,
}

impl Schedule {
    pub fn for_path(noise: Option<&NoisePath>, grid: &TimeGrid) -> Schedule {
        let dt = grid.dt();
        let mut ops = Vec::with_capacity(grid.steps());
        let mut grid_index = Vec::with_capacity(grid.steps() + 1);
        grid_index.push(0);
        match noise {
            Some(path) if !path.is_martingale() => {
                let events = path.events();
                let mut next = 0;
                for k in 0..grid.steps() {
                    let t1 = grid.time(k + 1);
                    let mut s = grid.time(k);
                    let mut hit = false;
                    while next < events.len() && events[next].0 <= t1 {
                        let (tau, z) = events[next];
                        if tau > s {
                            ops.push(Op::Drift(tau - s));
                        }
                        ops.push(Op::Jump(z));
                        s = tau;
                        hit = true;
                        next += 1;
                    }
                    if !hit {
                        ops.push(Op::Drift(dt));
                    } else if t1 > s {
                        ops.push(Op::Drift(t1 - s));
                    }
                    grid_index.push(ops.len());
                }
            }
            _ => {
                for k in 0..grid.steps() {
                    ops.push(Op::Cell(k));
                    grid_index.push(ops.len());
                }
            }
        }
        Schedule { ops, grid_index, dt }
    }

    pub fn duration(&self, j: usize) -> f64 {
        match self.ops[j] {
            Op::Cell(_) => self.dt,
            Op::Drift(h) => h,
            Op::Jump(_) => 0.0,
        }
    }

    /// Fine-level values at the grid points.
    pub fn on_grid(&self, fine: &Trajectory) -> Trajectory {
        let mut t = Trajectory::with_capacity(fine.dim, self.grid_index.len());
        for &j in &self.grid_index {
            t.push(fine.state(j));
        }
        t
    }
}

/// Propagators keyed by step size; the full grid step is prebuilt.
struct Steps<'a> {
    problem: &'a EvolutionProblem,
    full: Propagator,
}

impl<'a> Steps<'a> {
    fn new(problem: &'a EvolutionProblem) -> Self {
        Self { problem, full: Propagator::new(&problem.operator, problem.grid.dt(), problem.linear_drift) }
    }

    fn get(&self, h: f64) -> std::borrow::Cow<'_, Propagator> {
        if h == self.full.step_size() {
            std::borrow::Cow::Borrowed(&self.full)
        } else {
            std::borrow::Cow::Owned(Propagator::new(&self.problem.operator, h, self.problem.linear_drift))
        }
    }
}

pub(crate) fn check_path(problem: &EvolutionProblem, noise: Option<&NoisePath>) -> Result<()> {
    match (&problem.noise, noise) {
        (NoiseTerm::None, _) => Ok(()),
        (NoiseTerm::Martingale { driver, .. }, Some(p)) if p.is_martingale() && p.dim() == driver.dim() => {
            same_grid(problem, p)
        }
        (NoiseTerm::Poisson { driver, .. }, Some(p)) if !p.is_martingale() && p.dim() == driver.marks() => {
            same_grid(problem, p)
        }
        (_, None) => Err(Error::DriverMismatch("noise path missing".into())),
        _ => Err(Error::DriverMismatch("noise path does not come from the problem's driver".into())),
    }
}

fn same_grid(problem: &EvolutionProblem, p: &NoisePath) -> Result<()> {
    if p.grid == problem.grid {
        Ok(())
    } else {
        Err(Error::DriverMismatch("noise path lives on a different grid".into()))
    }
}

/// Runs the scheme and returns every intermediate state (fine level).
pub fn solve_traced(
    problem: &EvolutionProblem,
    noise: Option<&NoisePath>,
    u0: &[f64],
) -> Result<(Trajectory, Schedule)> {
    check_path(problem, noise)?;
    let d = problem.dim();
    if u0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: u0.len() });
    }
    let schedule = Schedule::for_path(noise, &problem.grid);
    let steps = Steps::new(problem);
    let mut fine = Trajectory::with_capacity(d, schedule.ops.len() + 1);
    let mut u = u0.to_vec();
    let mut g = vec![0.0; d];
    let mut b = vec![0.0; d];
    let mut scratch = vec![0.0; d];
    fine.push(&u);
    for op in &schedule.ops {
        match (*op, &problem.noise) {
            (Op::Cell(k), term) => {
                problem.drift.eval_into(&u, &mut g);
                if let (NoiseTerm::Martingale { diffusion, .. }, Some(p)) = (term, noise) {
                    diffusion.apply_into(&u, p.increment(k), &mut b);
                    for (ui, bi) in u.iter_mut().zip(&b) {
                        *ui += bi;
                    }
                }
                steps.full.advance(&mut u, &g, &mut scratch);
            }
            (Op::Drift(h), NoiseTerm::Poisson { driver, jump }) => {
                problem.drift.eval_into(&u, &mut g);
                jump.compensator_into(&driver.intensities, &u, &mut b);
                for (gi, ci) in g.iter_mut().zip(&b) {
                    *gi += ci;
                }
                steps.get(h).advance(&mut u, &g, &mut scratch);
            }
            (Op::Jump(z), NoiseTerm::Poisson { jump, .. }) => {
                jump.eval_into(z, &u, &mut b);
                for (ui, bi) in u.iter_mut().zip(&b) {
                    *ui += bi;
                }
            }
            _ => unreachable!("schedule built from a mismatched path"),
        }
        fine.push(&u);
    }
    Ok((fine, schedule))
}

/// Mild-formula pieces on the fine level: `S(t) s0`, `int S(t-r) f(x(r)) dr`
/// and the stochastic convolution of the problem's noise coefficient, all
/// with coefficients evaluated along the given fine path `along`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub semigroup: Trajectory,
    pub drift: Trajectory,
    pub noise: Trajectory,
}

impl Decomposition {
    /// `s - D + Y`
    pub fn recombine(&self) -> Trajectory {
        Trajectory {
            dim: self.semigroup.dim,
            states: self
                .semigroup
                .states
                .iter()
                .zip(&self.drift.states)
                .zip(&self.noise.states)
                .map(|((s, d), y)| s - d + y)
                .collect(),
        }
    }
}

/// Replays `schedule` with the operator and coefficients of `problem`, but
/// with the coefficients fed the states of `along` instead of its own.
pub fn replay(
    problem: &EvolutionProblem,
    noise: Option<&NoisePath>,
    schedule: &Schedule,
    along: &Trajectory,
    s0: &[f64],
) -> Result<Decomposition> {
    check_path(problem, noise)?;
    let d = problem.dim();
    if along.len() != schedule.ops.len() + 1 || along.dim != d || s0.len() != d {
        return Err(Error::DimensionMismatch { expected: schedule.ops.len() + 1, got: along.len() });
    }
    let steps = Steps::new(problem);
    let n = schedule.ops.len() + 1;
    let mut out = Decomposition {
        semigroup: Trajectory::with_capacity(d, n),
        drift: Trajectory::with_capacity(d, n),
        noise: Trajectory::with_capacity(d, n),
    };
    let mut s = s0.to_vec();
    let mut dd = vec![0.0; d];
    let mut y = vec![0.0; d];
    let mut g = vec![0.0; d];
    let mut b = vec![0.0; d];
    let mut tmp = vec![0.0; d];
    let mut tmp2 = vec![0.0; d];
    let zero = vec![0.0; d];
    out.semigroup.push(&s);
    out.drift.push(&dd);
    out.noise.push(&y);
    for (j, op) in schedule.ops.iter().enumerate() {
        let x = along.state(j);
        match (*op, &problem.noise) {
            (Op::Cell(k), term) => {
                let p = &steps.full;
                problem.drift.eval_into(x, &mut g);
                p.step(&s, &mut tmp);
                s.copy_from_slice(&tmp);
                p.advance(&mut dd, &zero, &mut tmp2);
                p.integrate(&g, &mut tmp);
                for (a, c) in dd.iter_mut().zip(&tmp) {
                    *a += c;
                }
                if let (NoiseTerm::Martingale { diffusion, .. }, Some(path)) = (term, noise) {
                    diffusion.apply_into(x, path.increment(k), &mut b);
                    for (yi, bi) in y.iter_mut().zip(&b) {
                        *yi += bi;
                    }
                }
                p.advance(&mut y, &zero, &mut tmp2);
            }
            (Op::Drift(h), NoiseTerm::Poisson { driver, jump }) => {
                let p = steps.get(h);
                problem.drift.eval_into(x, &mut g);
                jump.compensator_into(&driver.intensities, x, &mut b);
                p.step(&s, &mut tmp);
                s.copy_from_slice(&tmp);
                p.advance(&mut dd, &zero, &mut tmp2);
                p.integrate(&g, &mut tmp);
                for (a, c) in dd.iter_mut().zip(&tmp) {
                    *a += c;
                }
                p.advance(&mut y, &b, &mut tmp2);
            }
            (Op::Jump(z), NoiseTerm::Poisson { jump, .. }) => {
                jump.eval_into(z, x, &mut b);
                for (yi, bi) in y.iter_mut().zip(&b) {
                    *yi += bi;
                }
            }
            _ => unreachable!("schedule built from a mismatched path"),
        }
        out.semigroup.push(&s);
        out.drift.push(&dd);
        out.noise.push(&y);
    }
    Ok(out)
}

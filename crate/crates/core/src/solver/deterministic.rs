use super::trajectory::Trajectory;
use crate::noise::TimeGrid;
use crate::operators::{Propagator, SpectralOperator};

/// Mild solution of `u' + Au = f(t)`, `u(0) = u0`, with `f` frozen at the left
/// end of each cell and integrated exactly against the semigroup:
/// `u_{k+1} = S(dt) u_k + phi(dt) f(t_k)`.
pub fn solve_deterministic(
    op: &SpectralOperator,
    forcing: impl Fn(f64, &mut [f64]),
    u0: &[f64],
    grid: &TimeGrid,
) -> Trajectory {
    let d = op.dim();
    assert_eq!(u0.len(), d, "initial state dimension");
    let prop = Propagator::new(op, grid.dt(), 0.0);
    let mut traj = Trajectory::with_capacity(d, grid.steps() + 1);
    let mut u = u0.to_vec();
    let mut f = vec![0.0; d];
    let mut su = vec![0.0; d];
    let mut pf = vec![0.0; d];
    traj.push(&u);
    for k in 0..grid.steps() {
        forcing(grid.time(k), &mut f);
        prop.step(&u, &mut su);
        prop.integrate(&f, &mut pf);
        for ((ui, a), b) in u.iter_mut().zip(&su).zip(&pf) {
            *ui = a + b;
        }
        traj.push(&u);
    }
    traj
}

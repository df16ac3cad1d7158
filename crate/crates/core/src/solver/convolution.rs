use nalgebra::DMatrix;

use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::noise::NoisePath;
use crate::operators::{Propagator, SpectralOperator};

/// State-independent integrand, piecewise constant on grid cells.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvolutionIntegrand {
    /// `B_k: K -> H` on cell k
    Martingale(Vec<DMatrix<f64>>),
    /// `G_k(z_i)` on cell k, with the mark intensities
    Poisson { cells: Vec<Vec<Vec<f64>>>, intensities: Vec<f64> },
}

impl ConvolutionIntegrand {
    pub fn constant_matrix(b: DMatrix<f64>, steps: usize) -> Self {
        ConvolutionIntegrand::Martingale(vec![b; steps])
    }

    pub fn constant_marks(values: Vec<Vec<f64>>, intensities: Vec<f64>, steps: usize) -> Self {
        ConvolutionIntegrand::Poisson { cells: vec![values; steps], intensities }
    }
}

/// `Y(t_k)` for `Y(t) = int_0^t S(t-s) B(s) dM(s)` or its compensated
/// Poisson-measure analogue, by the solvers' recursion with `f = 0`, `u_0 = 0`.
pub fn stochastic_convolution(
    op: &SpectralOperator,
    integrand: &ConvolutionIntegrand,
    path: &NoisePath,
) -> Result<Trajectory> {
    let grid = path.grid;
    let d = op.dim();
    let prop = Propagator::new(op, grid.dt(), 0.0);
    let mut traj = Trajectory::with_capacity(d, grid.steps() + 1);
    let mut y = vec![0.0; d];
    let mut scratch = vec![0.0; d];
    traj.push(&y);
    match integrand {
        ConvolutionIntegrand::Martingale(cells) => {
            if !path.is_martingale() {
                return Err(Error::DriverMismatch("martingale integrand needs increments".into()));
            }
            if cells.len() != grid.steps() {
                return Err(Error::DimensionMismatch { expected: grid.steps(), got: cells.len() });
            }
            let zero = vec![0.0; d];
            for (k, b) in cells.iter().enumerate() {
                let dm = path.increment(k);
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi += b.row(i).iter().zip(dm).map(|(a, c)| a * c).sum::<f64>();
                }
                prop.advance(&mut y, &zero, &mut scratch);
                traj.push(&y);
            }
        }
        ConvolutionIntegrand::Poisson { cells, intensities } => {
            if path.is_martingale() {
                return Err(Error::DriverMismatch("mark integrand needs a measure path".into()));
            }
            if cells.len() != grid.steps() {
                return Err(Error::DimensionMismatch { expected: grid.steps(), got: cells.len() });
            }
            let events = path.events();
            let mut next = 0;
            for (k, g) in cells.iter().enumerate() {
                let mut comp = vec![0.0; d];
                for (gi, m) in g.iter().zip(intensities) {
                    for (c, v) in comp.iter_mut().zip(gi) {
                        *c += m * v;
                    }
                }
                let t1 = grid.time(k + 1);
                let mut s = grid.time(k);
                while next < events.len() && events[next].0 <= t1 {
                    let (tau, z) = events[next];
                    if tau > s {
                        Propagator::new(op, tau - s, 0.0).advance(&mut y, &comp, &mut scratch);
                    }
                    for (yi, gi) in y.iter_mut().zip(&g[z]) {
                        *yi += gi;
                    }
                    s = tau;
                    next += 1;
                }
                if t1 > s {
                    let p = if s == grid.time(k) { prop.clone() } else { Propagator::new(op, t1 - s, 0.0) };
                    p.advance(&mut y, &comp, &mut scratch);
                }
                traj.push(&y);
            }
        }
    }
    Ok(traj)
}

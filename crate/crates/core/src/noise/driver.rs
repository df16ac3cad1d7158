use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::grid::TimeGrid;
use super::path::{NoisePath, Realization};
use super::rng;
use crate::error::{Error, Result};

/// Q-Wiener process with `Q = diag(q)` in the standard basis of K.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QWienerDriver {
    pub q: Vec<f64>,
}

/// Mean-zero jump distribution on K.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum JumpLaw {
    Atoms { atoms: Vec<Vec<f64>>, probs: Vec<f64> },
    Gaussian { variances: Vec<f64> },
}

impl JumpLaw {
    /// `+-1` with probability 1/2 each, in one dimension.
    pub fn symmetric_unit() -> Self {
        JumpLaw::Atoms { atoms: vec![vec![1.0], vec![-1.0]], probs: vec![0.5, 0.5] }
    }

    pub fn dim(&self) -> usize {
        match self {
            JumpLaw::Atoms { atoms, .. } => atoms.first().map_or(0, Vec::len),
            JumpLaw::Gaussian { variances } => variances.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            JumpLaw::Atoms { atoms, probs } => {
                let d = self.dim();
                if atoms.is_empty() || atoms.len() != probs.len() || d == 0 {
                    return Err(Error::ConfigInvalid("jump atoms and probabilities disagree".into()));
                }
                if atoms.iter().any(|a| a.len() != d) {
                    return Err(Error::ConfigInvalid("jump atoms have mixed dimension".into()));
                }
                if probs.iter().any(|&p| !(p >= 0.0)) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12
                {
                    return Err(Error::ConfigInvalid("jump probabilities must sum to 1".into()));
                }
                for j in 0..d {
                    let m: f64 = atoms.iter().zip(probs).map(|(a, p)| a[j] * p).sum();
                    if m.abs() > 1e-12 {
                        return Err(Error::ConfigInvalid(format!(
                            "jump law has mean {m} in component {j}; it must be centred"
                        )));
                    }
                }
                Ok(())
            }
            JumpLaw::Gaussian { variances } => {
                if variances.is_empty() || variances.iter().any(|&v| !(v >= 0.0)) {
                    return Err(Error::ConfigInvalid("jump variances must be >= 0".into()));
                }
                Ok(())
            }
        }
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        let d = self.dim();
        match self {
            JumpLaw::Atoms { atoms, probs } => {
                let mut c = DMatrix::zeros(d, d);
                for (a, p) in atoms.iter().zip(probs) {
                    let v = DVector::from_column_slice(a);
                    c += &v * v.transpose() * *p;
                }
                c
            }
            JumpLaw::Gaussian { variances } => {
                DMatrix::from_diagonal(&DVector::from_column_slice(variances))
            }
        }
    }

    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match self {
            JumpLaw::Atoms { atoms, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = atoms.len() - 1;
                for (i, p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                out.copy_from_slice(&atoms[pick]);
            }
            JumpLaw::Gaussian { variances } => {
                for (o, v) in out.iter_mut().zip(variances) {
                    let z: f64 = StandardNormal.sample(rng);
                    *o = v.sqrt() * z;
                }
            }
        }
    }
}

/// Compound Poisson process with centred jumps; a martingale with
/// `Q = rate Cov(jump)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompensatedCompoundPoissonDriver {
    pub rate: f64,
    pub jump_law: JumpLaw,
}

impl CompensatedCompoundPoissonDriver {
    pub fn q_effective(&self) -> DMatrix<f64> {
        self.jump_law.covariance() * self.rate
    }
}

/// Poisson random measure on the finite mark set `{0, .., m-1}` with
/// intensity `intensities[i]` per unit time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonRandomMeasureDriver {
    pub intensities: Vec<f64>,
}

impl PoissonRandomMeasureDriver {
    pub fn marks(&self) -> usize {
        self.intensities.len()
    }

    pub fn total_intensity(&self) -> f64 {
        self.intensities.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MartingaleDriver {
    Wiener(QWienerDriver),
    #[serde(rename = "cpoisson")]
    CompoundPoisson(CompensatedCompoundPoissonDriver),
}

impl MartingaleDriver {
    pub fn wiener(q: Vec<f64>) -> Self {
        MartingaleDriver::Wiener(QWienerDriver { q })
    }

    pub fn compound_poisson(rate: f64, jump_law: JumpLaw) -> Self {
        MartingaleDriver::CompoundPoisson(CompensatedCompoundPoissonDriver { rate, jump_law })
    }

    pub fn dim(&self) -> usize {
        match self {
            MartingaleDriver::Wiener(w) => w.q.len(),
            MartingaleDriver::CompoundPoisson(c) => c.jump_law.dim(),
        }
    }

    /// The operator `Q` of hypothesis (Q), with `d<M,M> = dt`.
    pub fn covariance(&self) -> DMatrix<f64> {
        match self {
            MartingaleDriver::Wiener(w) => DMatrix::from_diagonal(&DVector::from_column_slice(&w.q)),
            MartingaleDriver::CompoundPoisson(c) => c.q_effective(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MartingaleDriver::Wiener(w) => {
                if w.q.is_empty() || w.q.iter().any(|&q| !(q >= 0.0 && q.is_finite())) {
                    return Err(Error::ConfigInvalid("Wiener covariance must be >= 0".into()));
                }
                Ok(())
            }
            MartingaleDriver::CompoundPoisson(c) => {
                if !(c.rate >= 0.0 && c.rate.is_finite()) {
                    return Err(Error::ConfigInvalid("jump rate must be >= 0".into()));
                }
                c.jump_law.validate()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NoiseDriver {
    Martingale(MartingaleDriver),
    Prm(PoissonRandomMeasureDriver),
}

impl From<MartingaleDriver> for NoiseDriver {
    fn from(d: MartingaleDriver) -> Self {
        NoiseDriver::Martingale(d)
    }
}

impl From<PoissonRandomMeasureDriver> for NoiseDriver {
    fn from(d: PoissonRandomMeasureDriver) -> Self {
        NoiseDriver::Prm(d)
    }
}

impl NoiseDriver {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseDriver::Martingale(m) => m.validate(),
            NoiseDriver::Prm(p) => {
                if p.intensities.is_empty()
                    || p.intensities.iter().any(|&m| !(m >= 0.0 && m.is_finite()))
                {
                    return Err(Error::ConfigInvalid("mark intensities must be finite and >= 0".into()));
                }
                Ok(())
            }
        }
    }

    /// `Q` for martingales; `diag(m)` for the compensated counts of a PRM.
    pub fn covariance(&self) -> DMatrix<f64> {
        match self {
            NoiseDriver::Martingale(m) => m.covariance(),
            NoiseDriver::Prm(p) => {
                DMatrix::from_diagonal(&DVector::from_column_slice(&p.intensities))
            }
        }
    }

    pub fn sample(&self, grid: &TimeGrid, stream_id: u64) -> NoisePath {
        let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(stream_id);
        let realization = match self {
            NoiseDriver::Martingale(MartingaleDriver::Wiener(w)) => sample_wiener(w, grid, &mut rng),
            NoiseDriver::Martingale(MartingaleDriver::CompoundPoisson(c)) => {
                sample_compound_poisson(c, grid, &mut rng)
            }
            NoiseDriver::Prm(p) => sample_prm(p, grid, &mut rng),
        };
        NoisePath { stream: stream_id, grid: *grid, realization }
    }

    /// Path `index` of the driving-noise group under `base_seed`.
    pub fn sample_path(&self, grid: &TimeGrid, base_seed: u64, index: u64) -> NoisePath {
        self.sample(grid, rng::stream_id(base_seed, rng::NOISE_GROUP, index))
    }
}

fn sample_wiener(w: &QWienerDriver, grid: &TimeGrid, rng: &mut ChaCha8Rng) -> Realization {
    let dim = w.q.len();
    let dt = grid.dt();
    let sd: Vec<f64> = w.q.iter().map(|q| (q * dt).sqrt()).collect();
    let mut increments = Vec::with_capacity(dim * grid.steps());
    let mut bracket = Vec::with_capacity(grid.steps());
    for _ in 0..grid.steps() {
        let mut qv = 0.0;
        for s in &sd {
            let z: f64 = StandardNormal.sample(rng);
            let dm = s * z;
            qv += dm * dm;
            increments.push(dm);
        }
        bracket.push(qv);
    }
    Realization::Increments { dim, increments, bracket }
}

fn sample_compound_poisson(
    c: &CompensatedCompoundPoissonDriver,
    grid: &TimeGrid,
    rng: &mut ChaCha8Rng,
) -> Realization {
    let dim = c.jump_law.dim();
    let mean = c.rate * grid.dt();
    let counter = (mean > 0.0).then(|| Poisson::new(mean).expect("positive Poisson mean"));
    let mut increments = vec![0.0; dim * grid.steps()];
    let mut bracket = vec![0.0; grid.steps()];
    let mut jump = vec![0.0; dim];
    for k in 0..grid.steps() {
        let count = counter.as_ref().map_or(0, |p| p.sample(rng) as u64);
        let cell = &mut increments[k * dim..(k + 1) * dim];
        for _ in 0..count {
            c.jump_law.sample_into(rng, &mut jump);
            for (x, j) in cell.iter_mut().zip(&jump) {
                *x += j;
            }
            bracket[k] += jump.iter().map(|j| j * j).sum::<f64>();
        }
    }
    Realization::Increments { dim, increments, bracket }
}

fn sample_prm(p: &PoissonRandomMeasureDriver, grid: &TimeGrid, rng: &mut ChaCha8Rng) -> Realization {
    let horizon = grid.horizon();
    let mut events = Vec::new();
    for (mark, &m) in p.intensities.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        let gap = Exp::new(m).expect("positive intensity");
        let mut t = 0.0;
        loop {
            t += gap.sample(rng);
            if t > horizon {
                break;
            }
            events.push((t, mark));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Realization::Events { marks: p.marks(), events }
}

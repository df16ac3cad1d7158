use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use super::{martingale, poisson};
use crate::coefficients::{DiffusionMap, DriftMap, JumpMap};
use crate::error::{Error, Result};
use crate::noise::{rng, MartingaleDriver, NoiseDriver, NoisePath, PoissonRandomMeasureDriver, TimeGrid};
use crate::operators::SpectralOperator;

/// The noise term of the equation together with its driver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NoiseTerm {
    None,
    /// `B(u(t-)) dM(t)`
    Martingale { driver: MartingaleDriver, diffusion: DiffusionMap },
    /// `int_Z G(z, u(t-)) mu_bar(dz, dt)`
    Poisson { driver: PoissonRandomMeasureDriver, jump: JumpMap },
}

impl NoiseTerm {
    pub fn driver(&self) -> Option<NoiseDriver> {
        match self {
            NoiseTerm::None => None,
            NoiseTerm::Martingale { driver, .. } => Some(NoiseDriver::Martingale(driver.clone())),
            NoiseTerm::Poisson { driver, .. } => Some(NoiseDriver::Prm(driver.clone())),
        }
    }
}

/// Law of the initial datum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    Deterministic { value: Vec<f64> },
    /// Independent components `mean_k + sd_k Z_k`.
    Gaussian { mean: Vec<f64>, sd: Vec<f64> },
}

impl InitialSpec {
    pub fn fixed(value: Vec<f64>) -> Self {
        InitialSpec::Deterministic { value }
    }

    pub fn dim(&self) -> usize {
        match self {
            InitialSpec::Deterministic { value } => value.len(),
            InitialSpec::Gaussian { mean, .. } => mean.len(),
        }
    }

    /// Draw for path `index`, from the initial-datum stream group.
    pub fn sample(&self, base_seed: u64, index: u64) -> Vec<f64> {
        match self {
            InitialSpec::Deterministic { value } => value.clone(),
            InitialSpec::Gaussian { mean, sd } => {
                let mut r = rng::stream(base_seed, rng::INITIAL_GROUP, index);
                mean.iter()
                    .zip(sd)
                    .map(|(m, s)| {
                        let z: f64 = StandardNormal.sample(&mut r);
                        m + s * z
                    })
                    .collect()
            }
        }
    }

    /// Same randomness, mean moved by `weight * shift`.
    pub fn shifted(&self, shift: &[f64], weight: f64) -> Self {
        let add = |v: &[f64]| v.iter().zip(shift).map(|(a, c)| a + weight * c).collect();
        match self {
            InitialSpec::Deterministic { value } => InitialSpec::Deterministic { value: add(value) },
            InitialSpec::Gaussian { mean, sd } => {
                InitialSpec::Gaussian { mean: add(mean), sd: sd.clone() }
            }
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, InitialSpec::Deterministic { .. })
    }
}

/// `du + (A + kappa) u dt + f(u) dt = noise`, `u(0) = u_0`, on a grid.
///
/// `linear_drift` (kappa) is integrated exactly inside the propagator.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionProblem {
    pub operator: SpectralOperator,
    pub linear_drift: f64,
    pub drift: DriftMap,
    pub noise: NoiseTerm,
    pub initial: InitialSpec,
    pub grid: TimeGrid,
    pub p: f64,
}

impl EvolutionProblem {
    pub fn new(
        operator: SpectralOperator,
        drift: DriftMap,
        noise: NoiseTerm,
        initial: InitialSpec,
        grid: TimeGrid,
        p: f64,
    ) -> Result<Self> {
        let prob = Self { operator, linear_drift: 0.0, drift, noise, initial, grid, p };
        prob.validate()?;
        Ok(prob)
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.initial.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: self.initial.dim() });
        }
        if let Some(k) = self.drift.fixed_dim() {
            if k != d {
                return Err(Error::DimensionMismatch { expected: d, got: k });
            }
        }
        if !(self.p >= 2.0 && self.p.is_finite()) {
            return Err(Error::ConfigInvalid(format!("moment exponent p must be >= 2, got {}", self.p)));
        }
        match &self.noise {
            NoiseTerm::None => {}
            NoiseTerm::Martingale { driver, diffusion } => {
                driver.validate()?;
                if let Some(k) = diffusion.noise_dim() {
                    if k != driver.dim() {
                        return Err(Error::DriverMismatch(format!(
                            "diffusion takes {k} noise components, driver has {}",
                            driver.dim()
                        )));
                    }
                }
                if let Some(k) = diffusion.state_dim() {
                    if k != d {
                        return Err(Error::DimensionMismatch { expected: d, got: k });
                    }
                }
                if self.p > 2.0 && !diffusion.is_additive() {
                    return Err(Error::HypothesisViolated(
                        "martingale-driven equations with multiplicative noise are solved in H_2 only"
                            .into(),
                    ));
                }
            }
            NoiseTerm::Poisson { driver, jump } => {
                NoiseDriver::Prm(driver.clone()).validate()?;
                if let Some(m) = jump.marks() {
                    if m != driver.marks() {
                        return Err(Error::DriverMismatch(format!(
                            "jump map has {m} marks, driver has {}",
                            driver.marks()
                        )));
                    }
                }
                if let Some(k) = jump.state_dim() {
                    if k != d {
                        return Err(Error::DimensionMismatch { expected: d, got: k });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn driver(&self) -> Option<NoiseDriver> {
        self.noise.driver()
    }

    pub fn sample_noise(&self, base_seed: u64, index: u64) -> Option<NoisePath> {
        self.driver().map(|d| d.sample_path(&self.grid, base_seed, index))
    }

    /// Solve with a given noise path and initial state.
    pub fn solve_with(&self, noise: Option<&NoisePath>, u0: &[f64]) -> Result<Trajectory> {
        match (&self.noise, noise) {
            (NoiseTerm::None, _) => martingale::drift_only(self, u0),
            (NoiseTerm::Martingale { .. }, Some(path)) => martingale::solve_mild_martingale(self, path, u0),
            (NoiseTerm::Poisson { .. }, Some(path)) => poisson::solve_mild_poisson(self, path, u0),
            (_, None) => Err(Error::DriverMismatch("noise path missing".into())),
        }
    }

    /// Path `index` under `base_seed`: noise and initial datum from their streams.
    pub fn solve_path(&self, base_seed: u64, index: u64) -> Result<(Option<NoisePath>, Trajectory)> {
        let noise = self.sample_noise(base_seed, index);
        let u0 = self.initial.sample(base_seed, index);
        let traj = self.solve_with(noise.as_ref(), &u0)?;
        Ok((noise, traj))
    }
}

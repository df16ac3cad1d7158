//! TOML experiment configs.
//!
//! ```toml
//! seed = 7
//! paths = 100
//! out = "reports"
//!
//! [space]
//! dim = 3
//! spectrum = "heat"          # or "linear" (a_k = k), or explicit `eigenvalues`
//!
//! [grid]
//! horizon = 1.0
//! steps = 50
//!
//! [driver]
//! kind = "wiener"            # "cpoisson" (rate, variances) | "prm" (intensities)
//! q = [1.0, 0.5, 0.25]
//!
//! [initial]
//! value = [1.0, 0.0, 0.0]
//!
//! [coefficients.drift]
//! family = "saturating_sigmoid"
//! params = { s = 1.0 }
//!
//! [[sweep]]
//! theorem = "yo2sc"
//! params = [0.1, 0.01, 0.001]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coefficients::{
    builtin_family, Coefficient, CoefficientSequence, DiffusionMap, DriftMap, JumpMap, Params, Perturbable,
    Perturbation,
};
use crate::convergence::{lookup, NoiseSequence, SemilinearSetup, SweepOptions, Tolerance, ToleranceOn, TrotterKatoSetup};
use crate::error::{Error, Result};
use crate::noise::{JumpLaw, MartingaleDriver, PoissonRandomMeasureDriver, TimeGrid};
use crate::operators::{FamilyKind, OperatorFamily, SpectralOperator};
use crate::rate::Rate;
use crate::solver::{EvolutionProblem, InitialSpec, NoiseTerm};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub paths: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    pub space: SpaceConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub driver: Option<DriverConfig>,
    pub initial: InitialConfig,
    #[serde(default)]
    pub coefficients: CoefficientsConfig,
    pub sweep: Vec<SweepConfig>,
}

fn default_out() -> PathBuf {
    PathBuf::from("reports")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spectrum {
    /// `a_k = (k pi)^2`
    #[default]
    Heat,
    /// `a_k = k`
    Linear,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dim: usize,
    #[serde(default)]
    pub spectrum: Spectrum,
    #[serde(default)]
    pub eigenvalues: Option<Vec<f64>>,
    #[serde(default)]
    pub eta: f64,
    /// Dense operator with a seeded random eigenbasis when set.
    #[serde(default)]
    pub basis_seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub horizon: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriverConfig {
    Wiener { q: Vec<f64> },
    Cpoisson { rate: f64, variances: Vec<f64> },
    Prm { intensities: Vec<f64> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum InitialConfig {
    Fixed { value: Vec<f64> },
    Gaussian { mean: Vec<f64>, sd: Vec<f64> },
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsConfig {
    #[serde(default)]
    pub drift: Option<CoefficientConfig>,
    /// Diffusion `B` for martingale drivers, jump map `G` for `prm`.
    #[serde(default)]
    pub noise: Option<CoefficientConfig>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub family: String,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub perturbation: Option<PerturbationConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationMode {
    None,
    Scale,
    Additive,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub mode: PerturbationMode,
    #[serde(default)]
    pub rate: Rate,
    /// Required for `additive`.
    #[serde(default)]
    pub direction: Option<Box<CoefficientConfig>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyConfig {
    Constant,
    Yosida,
    Galerkin,
    SpectralPerturbation,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    #[serde(default)]
    pub absolute: Option<f64>,
    #[serde(default)]
    pub relative: Option<f64>,
    #[serde(default)]
    pub on: ToleranceOn,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub theorem: String,
    /// `lambda` values for Yosida sweeps, `n` values otherwise.
    pub params: Vec<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub family: Option<FamilyConfig>,
    #[serde(default)]
    pub rate: Option<Rate>,
    #[serde(default)]
    pub initial_shift: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerance: Option<ToleranceConfig>,
    #[serde(default)]
    pub expected_slope: Option<(f64, f64)>,
    #[serde(default)]
    pub strict: bool,
    /// Extra resolvent parameters for `cor_utile`.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// Constant forcing for `titikaka`, and its perturbation direction.
    #[serde(default)]
    pub forcing: Option<Vec<f64>>,
    #[serde(default)]
    pub forcing_shift: Option<Vec<f64>>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::ConfigInvalid(msg.into())
}

/// Any failure to build the configured objects is a configuration error.
pub fn as_config_error(e: Error) -> Error {
    match e {
        Error::ConfigInvalid(_) | Error::UnknownTheorem(_) | Error::UnknownFamily(_) | Error::Io(_) => e,
        other => Error::ConfigInvalid(other.to_string()),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path)?;
        let text = std::str::from_utf8(&bytes).map_err(|e| invalid(e.to_string()))?;
        Ok((Self::parse(text)?, bytes))
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths < 2 {
            return Err(invalid(format!("paths = {} but at least 2 are needed", self.paths)));
        }
        if self.grid.steps < 1 {
            return Err(invalid("grid.steps must be >= 1"));
        }
        if self.sweep.is_empty() {
            return Err(invalid("no [[sweep]] entries"));
        }
        for s in &self.sweep {
            if lookup(&s.theorem).is_none() {
                return Err(Error::UnknownTheorem(s.theorem.clone()));
            }
            if s.params.is_empty() || s.params.iter().any(|&x| !(x > 0.0)) {
                return Err(invalid(format!("{}: params must be positive", s.theorem)));
            }
        }
        self.base_problem(2.0).map_err(as_config_error)?;
        Ok(())
    }

    pub fn operator(&self) -> Result<SpectralOperator> {
        let d = self.space.dim;
        if d == 0 {
            return Err(invalid("space.dim must be >= 1"));
        }
        let eig = match &self.space.eigenvalues {
            Some(e) if e.len() != d => return Err(Error::DimensionMismatch { expected: d, got: e.len() }),
            Some(e) => e.clone(),
            None => match self.space.spectrum {
                Spectrum::Heat => SpectralOperator::heat(d).eigenvalues().to_vec(),
                Spectrum::Linear => (1..=d).map(|k| k as f64).collect(),
            },
        };
        match self.space.basis_seed {
            Some(s) => SpectralOperator::dense_random(eig, self.space.eta, s),
            None => SpectralOperator::diagonal(eig, self.space.eta),
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.grid.horizon, self.grid.steps)
    }

    pub fn initial_spec(&self) -> InitialSpec {
        match &self.initial {
            InitialConfig::Fixed { value } => InitialSpec::fixed(value.clone()),
            InitialConfig::Gaussian { mean, sd } => InitialSpec::Gaussian { mean: mean.clone(), sd: sd.clone() },
        }
    }

    fn drift(&self) -> Result<DriftMap> {
        match &self.coefficients.drift {
            None => Ok(DriftMap::Zero),
            Some(c) => match builtin_family(&c.family, &c.params)? {
                Coefficient::Drift(f) => Ok(f),
                _ => Err(invalid(format!("`{}` is not a drift family", c.family))),
            },
        }
    }

    fn noise(&self) -> Result<NoiseTerm> {
        let coeff = match &self.coefficients.noise {
            Some(c) => Some(builtin_family(&c.family, &c.params)?),
            None => None,
        };
        let d = self.space.dim;
        let term = match (&self.driver, coeff) {
            (None, None) => NoiseTerm::None,
            (None, Some(_)) => return Err(invalid("noise coefficient given without a driver")),
            (Some(DriverConfig::Prm { intensities }), c) => {
                let jump = match c {
                    Some(Coefficient::Jump(g)) => g,
                    None => return Err(invalid("a prm driver needs a jump coefficient")),
                    Some(_) => return Err(invalid("a prm driver needs a jump family such as `mark_affine`")),
                };
                NoiseTerm::Poisson {
                    driver: PoissonRandomMeasureDriver { intensities: intensities.clone() },
                    jump,
                }
            }
            (Some(m), c) => {
                let driver = match m {
                    DriverConfig::Wiener { q } => MartingaleDriver::wiener(q.clone()),
                    DriverConfig::Cpoisson { rate, variances } => {
                        MartingaleDriver::compound_poisson(*rate, JumpLaw::Gaussian { variances: variances.clone() })
                    }
                    DriverConfig::Prm { .. } => unreachable!(),
                };
                let diffusion = match c {
                    Some(Coefficient::Diffusion(b)) => b,
                    None => DiffusionMap::additive_identity(d, 1.0),
                    Some(_) => return Err(invalid("a martingale driver needs a diffusion family")),
                };
                NoiseTerm::Martingale { driver, diffusion }
            }
        };
        Ok(term)
    }

    /// The unperturbed problem, integrated in `H_p`.
    pub fn base_problem(&self, p: f64) -> Result<EvolutionProblem> {
        EvolutionProblem::new(self.operator()?, self.drift()?, self.noise()?, self.initial_spec(), self.time_grid()?, p)
    }

    pub fn sweep_options(&self, sweep: &SweepConfig) -> SweepOptions {
        let mut opts = SweepOptions::new(self.paths, self.seed);
        if let Some(t) = &sweep.tolerance {
            opts.tolerance = Tolerance { absolute: t.absolute, relative: t.relative, on: t.on };
        }
        opts.expected_slope = sweep.expected_slope;
        opts.strict = sweep.strict;
        opts
    }

    pub fn family(&self, sweep: &SweepConfig, default: FamilyConfig) -> Result<OperatorFamily> {
        let op = self.operator()?;
        let rate = sweep.rate.unwrap_or_default();
        let kind = match sweep.family.unwrap_or(default) {
            FamilyConfig::Constant => FamilyKind::Constant,
            FamilyConfig::Yosida => FamilyKind::Yosida,
            FamilyConfig::Galerkin => FamilyKind::Galerkin,
            FamilyConfig::SpectralPerturbation => FamilyKind::SpectralPerturbation,
        };
        let rate = if matches!(kind, FamilyKind::Constant | FamilyKind::Galerkin) { Rate::zero() } else { rate };
        Ok(OperatorFamily::new(op, kind, rate))
    }

    pub fn semilinear_setup(&self, sweep: &SweepConfig, p: f64) -> Result<SemilinearSetup> {
        let base = self.base_problem(p)?;
        let family = self.family(sweep, FamilyConfig::SpectralPerturbation)?;
        let drift = sequence(self.drift()?, self.coefficients.drift.as_ref(), |c| match c {
            Coefficient::Drift(f) => Some(f),
            _ => None,
        })?;
        let noise_cfg = self.coefficients.noise.as_ref();
        let noise = match &base.noise {
            NoiseTerm::None => NoiseSequence::None,
            NoiseTerm::Martingale { diffusion, .. } => {
                NoiseSequence::Diffusion(sequence(diffusion.clone(), noise_cfg, |c| match c {
                    Coefficient::Diffusion(b) => Some(b),
                    _ => None,
                })?)
            }
            NoiseTerm::Poisson { jump, .. } => NoiseSequence::Jump(sequence::<JumpMap>(jump.clone(), noise_cfg, |c| {
                match c {
                    Coefficient::Jump(g) => Some(g),
                    _ => None,
                }
            })?),
        };
        let initial_shift = sweep.initial_shift.clone().map(|c| (c, sweep.rate.unwrap_or_default()));
        Ok(SemilinearSetup { base, family, drift, noise, initial_shift })
    }

    pub fn trotter_kato_setup(&self, sweep: &SweepConfig) -> Result<TrotterKatoSetup> {
        let d = self.space.dim;
        let u0 = match &self.initial {
            InitialConfig::Fixed { value } => value.clone(),
            InitialConfig::Gaussian { .. } => return Err(invalid("titikaka needs a fixed initial value")),
        };
        let forcing = sweep.forcing.clone().unwrap_or_else(|| vec![0.0; d]);
        for v in [Some(&forcing), sweep.forcing_shift.as_ref()].into_iter().flatten() {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
        }
        Ok(TrotterKatoSetup {
            family: self.family(sweep, FamilyConfig::Yosida)?,
            forcing,
            forcing_shift: sweep.forcing_shift.clone().map(|g| (g, sweep.rate.unwrap_or_default())),
            u0,
            grid: self.time_grid()?,
        })
    }
}

fn sequence<T: Perturbable>(
    limit: T,
    cfg: Option<&CoefficientConfig>,
    pick: impl Fn(Coefficient) -> Option<T>,
) -> Result<CoefficientSequence<T>> {
    let Some(p) = cfg.and_then(|c| c.perturbation.as_ref()) else {
        return Ok(CoefficientSequence::constant(limit));
    };
    let perturbation = match p.mode {
        PerturbationMode::None => Perturbation::None,
        PerturbationMode::Scale => Perturbation::Scale,
        PerturbationMode::Additive => {
            let dir = p.direction.as_ref().ok_or_else(|| invalid("additive perturbation needs a direction"))?;
            let c = builtin_family(&dir.family, &dir.params)?;
            let direction = pick(c).ok_or_else(|| invalid("perturbation direction has the wrong kind"))?;
            Perturbation::Additive { direction }
        }
    };
    Ok(CoefficientSequence::make_convergent_sequence(limit, perturbation, p.rate))
}

/// Converts sweep values to sequence indices, rejecting non-integers.
pub fn indices(params: &[f64]) -> Result<Vec<usize>> {
    params
        .iter()
        .map(|&x| {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(invalid(format!("sweep index {x} is not a positive integer")))
            }
        })
        .collect()
}

//! Runs every sweep of a config and writes one report directory per sweep.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{as_config_error, indices, ExperimentConfig, SweepConfig};
use crate::convergence::{
    audit_corollary_utile, linear_id, require_linear, run_additive_sweep, run_resolvent_sweep, run_semilinear_sweep,
    run_trotter_kato, run_yosida_sweep, semilinear_id, ConvergenceReport, NoiseSequence, SemilinearSetup,
    TrotterKatoSetup,
};
use crate::error::{Error, Result};
use crate::operators::OperatorFamily;
use crate::solver::{EvolutionProblem, NoiseTerm};

/// A validated sweep, ready to run.
enum Job {
    Yosida(EvolutionProblem, Vec<f64>),
    Resolvent(EvolutionProblem, OperatorFamily, Vec<usize>),
    Semilinear(Box<SemilinearSetup>, Vec<usize>),
    Additive(Box<SemilinearSetup>, Vec<usize>),
    TrotterKato(TrotterKatoSetup, Vec<usize>, f64),
    Corollary(EvolutionProblem, Vec<f64>, Vec<f64>),
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub theorem: String,
    pub dir: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub seed: u64,
    pub paths: usize,
    pub experiments: Vec<Entry>,
}

impl Manifest {
    pub fn pass(&self) -> bool {
        self.experiments.iter().all(|e| e.pass)
    }
}

fn mismatch(want: &str, got: &str) -> Error {
    Error::ConfigInvalid(format!("sweep asks for `{want}` but the configured problem is a `{got}` setting"))
}

fn default_p(theorem: &str) -> f64 {
    match theorem {
        "yopsc" | "nyotta" | "additive_p" => 4.0,
        _ => 2.0,
    }
}

fn linear(base: EvolutionProblem) -> Result<EvolutionProblem> {
    require_linear(&base)?;
    Ok(base)
}

fn plan(cfg: &ExperimentConfig, sweep: &SweepConfig) -> Result<Job> {
    let id = sweep.theorem.as_str();
    let p = sweep.p.unwrap_or_else(|| default_p(id));
    let job = match id {
        "yo2sc" | "yopsc" | "trippona_lambda" => {
            let base = linear(cfg.base_problem(p)?)?;
            let got = linear_id(&base, true);
            if got != id {
                return Err(mismatch(id, got));
            }
            Job::Yosida(base, sweep.params.clone())
        }
        "nyo2sc" | "nyotta" | "trippona" => {
            let base = linear(cfg.base_problem(p)?)?;
            let got = linear_id(&base, false);
            if got != id {
                return Err(mismatch(id, got));
            }
            let family = cfg.family(sweep, crate::config::FamilyConfig::Yosida)?;
            Job::Resolvent(base, family, indices(&sweep.params)?)
        }
        "nyo2" | "nyop" | "lemma_uno" | "lemma_due" | "lemma_tre" | "lemma_treppe" => {
            let setup = cfg.semilinear_setup(sweep, p)?;
            setup.check()?;
            let got = semilinear_id(&setup.base);
            let ok = match id {
                "lemma_uno" | "lemma_due" => true,
                "lemma_tre" => matches!(setup.noise, NoiseSequence::Diffusion(_) | NoiseSequence::None),
                "lemma_treppe" => matches!(setup.noise, NoiseSequence::Jump(_)),
                _ => got == id,
            };
            if !ok {
                return Err(mismatch(id, got));
            }
            Job::Semilinear(Box::new(setup), indices(&sweep.params)?)
        }
        "additive_p" => {
            let setup = cfg.semilinear_setup(sweep, p)?;
            setup.check()?;
            if !matches!(&setup.base.noise, NoiseTerm::Martingale { diffusion, .. } if diffusion.is_additive()) {
                return Err(mismatch(id, semilinear_id(&setup.base)));
            }
            Job::Additive(Box::new(setup), indices(&sweep.params)?)
        }
        "titikaka" => {
            let tol = sweep.tolerance.as_ref().and_then(|t| t.absolute).unwrap_or(1e-4);
            Job::TrotterKato(cfg.trotter_kato_setup(sweep)?, indices(&sweep.params)?, tol)
        }
        "cor_utile" => Job::Corollary(linear(cfg.base_problem(2.0)?)?, sweep.params.clone(), sweep.epsilons.clone()),
        other => return Err(Error::UnknownTheorem(other.to_string())),
    };
    Ok(job)
}

fn execute(cfg: &ExperimentConfig, sweep: &SweepConfig, job: &Job) -> Result<ConvergenceReport> {
    let opts = cfg.sweep_options(sweep);
    let id = sweep.theorem.as_str();
    match job {
        Job::Yosida(base, lambdas) => run_yosida_sweep(base, lambdas, &opts),
        Job::Resolvent(base, family, ns) => run_resolvent_sweep(base, family, ns, &opts),
        Job::Semilinear(setup, ns) => {
            let out = run_semilinear_sweep(setup, ns, &opts)?;
            if id.starts_with("lemma_") {
                out.lemma(id)
                    .cloned()
                    .ok_or_else(|| Error::ConfigInvalid(format!("sweep produced no `{id}` audit")))
            } else {
                Ok(out.report)
            }
        }
        Job::Additive(setup, ns) => Ok(run_additive_sweep(setup, ns, &opts)?.report),
        Job::TrotterKato(setup, ns, tol) => run_trotter_kato(setup, ns, *tol),
        Job::Corollary(base, lambdas, eps) => audit_corollary_utile(base, lambdas, eps, &opts),
    }
}

fn write_report(dir: &Path, report: &ConvergenceReport) -> Result<()> {
    report.write_csv(BufWriter::new(File::create(dir.join("report.csv"))?))?;
    report.write_plot_csv(BufWriter::new(File::create(dir.join("plot.csv"))?))?;
    report.write_json(BufWriter::new(File::create(dir.join("details.json"))?))?;
    Ok(())
}

fn unique_dir(used: &mut Vec<String>, theorem: &str) -> String {
    let mut name = theorem.to_string();
    let mut k = 2;
    while used.contains(&name) {
        name = format!("{theorem}_{k}");
        k += 1;
    }
    used.push(name.clone());
    name
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Validates every sweep, then runs them in order.
///
/// Configuration problems abort before anything is written. A sweep that
/// errors while running is recorded as failed and the rest still run.
pub fn run(cfg: &ExperimentConfig, config_bytes: &[u8], out: &Path) -> Result<Manifest> {
    cfg.validate()?;
    let jobs: Vec<Job> =
        cfg.sweep.iter().map(|s| plan(cfg, s).map_err(as_config_error)).collect::<Result<_>>()?;
    fs::create_dir_all(out)?;
    let mut used = Vec::new();
    let mut experiments = Vec::new();
    for (sweep, job) in cfg.sweep.iter().zip(&jobs) {
        let name = unique_dir(&mut used, &sweep.theorem);
        let dir: PathBuf = out.join(&name);
        fs::create_dir_all(&dir)?;
        let entry = match execute(cfg, sweep, job) {
            Ok(report) => {
                write_report(&dir, &report)?;
                Entry { theorem: sweep.theorem.clone(), dir: name, pass: report.pass(), error: None }
            }
            Err(e) => {
                fs::write(dir.join("error.txt"), format!("{e}\n"))?;
                Entry { theorem: sweep.theorem.clone(), dir: name, pass: false, error: Some(e.to_string()) }
            }
        };
        experiments.push(entry);
    }
    let manifest =
        Manifest { config_sha256: config_hash(config_bytes), seed: cfg.seed, paths: cfg.paths, experiments };
    let f = BufWriter::new(File::create(out.join("manifest.json"))?);
    serde_json::to_writer_pretty(f, &manifest).map_err(|e| Error::Io(e.into()))?;
    Ok(manifest)
}

use serde::{Deserialize, Serialize};

use super::spectral::SpectralOperator;
use super::vector::{dist, HVector};
use crate::error::{Error, Result};
use crate::rate::Rate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `A_n = A`
    Constant,
    /// `A_n = A_{lambda_n}`, `lambda_n = rate(n)`
    Yosida,
    /// `A_n = A` on the first `min(n, d)` spectral modes, zero on the rest
    Galerkin,
    /// `a_k -> a_k + eps_n |a_k|`, `eps_n = rate(n)`
    SpectralPerturbation,
}

/// Sequence `n -> A_n` approximating a limit operator.
#[derive(Clone, Debug)]
pub struct OperatorFamily {
    pub limit: SpectralOperator,
    pub kind: FamilyKind,
    pub rate: Rate,
    /// Resolvent parameters must stay below this.
    pub lambda0: f64,
}

impl OperatorFamily {
    pub fn new(limit: SpectralOperator, kind: FamilyKind, rate: Rate) -> Self {
        let lambda0 = if limit.eta() > 0.0 { 0.5 / limit.eta() } else { f64::INFINITY };
        Self { limit, kind, rate, lambda0 }
    }

    pub fn constant(limit: SpectralOperator) -> Self {
        Self::new(limit, FamilyKind::Constant, Rate::zero())
    }

    pub fn yosida(limit: SpectralOperator, rate: Rate) -> Self {
        Self::new(limit, FamilyKind::Yosida, rate)
    }

    pub fn galerkin(limit: SpectralOperator) -> Self {
        Self::new(limit, FamilyKind::Galerkin, Rate::zero())
    }

    pub fn spectral_perturbation(limit: SpectralOperator, rate: Rate) -> Self {
        Self::new(limit, FamilyKind::SpectralPerturbation, rate)
    }

    pub fn member(&self, n: usize) -> Result<SpectralOperator> {
        let a = self.limit.eigenvalues();
        match self.kind {
            FamilyKind::Constant => Ok(self.limit.clone()),
            FamilyKind::Yosida => self.limit.yosida_operator(self.rate.at(n)),
            FamilyKind::Galerkin => {
                let keep = n.min(a.len());
                let eig: Vec<f64> =
                    a.iter().enumerate().map(|(k, &v)| if k < keep { v } else { 0.0 }).collect();
                let eta = eig.iter().fold(0.0_f64, |m, &b| m.max(-b));
                self.limit.with_spectrum(eig, eta)
            }
            FamilyKind::SpectralPerturbation => {
                let eps = self.rate.at(n);
                let eig = a.iter().map(|&v| v + eps * v.abs()).collect();
                self.limit.with_spectrum(eig, self.limit.eta())
            }
        }
    }

    /// `max_h |(I + lambda A_n)^{-1} h - (I + lambda A)^{-1} h|`.
    pub fn strong_resolvent_distance(
        &self,
        n: usize,
        lambda: f64,
        test_vectors: &[HVector],
    ) -> Result<f64> {
        if !(lambda > 0.0 && lambda < self.lambda0) {
            return Err(Error::LambdaOutOfRange { lambda, limit: self.lambda0 });
        }
        let an = self.member(n)?;
        let mut worst = 0.0_f64;
        for h in test_vectors {
            let a = an.resolvent(lambda, h)?;
            let b = self.limit.resolvent(lambda, h)?;
            worst = worst.max(dist(&a.0, &b.0));
        }
        Ok(worst)
    }

    /// Resolvent distances along `ns`; errors if they ever increase.
    pub fn resolvent_profile(
        &self,
        ns: &[usize],
        lambda: f64,
        test_vectors: &[HVector],
    ) -> Result<Vec<f64>> {
        let d: Vec<f64> = ns
            .iter()
            .map(|&n| self.strong_resolvent_distance(n, lambda, test_vectors))
            .collect::<Result<_>>()?;
        for (w, n) in d.windows(2).zip(ns.iter().skip(1)) {
            if w[1] > w[0] * (1.0 + 1e-12) + 1e-15 {
                return Err(Error::FamilyNotConvergent(format!(
                    "resolvent distance rose from {:e} to {:e} at n = {n}",
                    w[0], w[1]
                )));
            }
        }
        Ok(d)
    }

    /// Largest `eta_n` over `ns` that exceeds the limit's `eta`, if any.
    pub fn eta_excess(&self, ns: &[usize]) -> Result<Option<(usize, f64)>> {
        for &n in ns {
            let m = self.member(n)?;
            if m.eta() > self.limit.eta() + 1e-12 {
                return Ok(Some((n, m.eta())));
            }
        }
        Ok(None)
    }
}

/// Standard basis vectors plus `extra` seeded unit vectors.
pub fn default_test_vectors(d: usize, extra: usize, seed: u64) -> Vec<HVector> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut out: Vec<HVector> = (0..d).map(|k| HVector::basis(d, k)).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        let x: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = super::vector::norm(&x);
        out.push(HVector(x.into_iter().map(|v| v / n).collect()));
    }
    out
}

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::diffusion::{hs_q_squared, DiffusionMap};
use super::drift::DriftMap;
use super::jump::{mark_norm, JumpMap};
use crate::error::{Error, Result};

const AUDIT_SLACK: f64 = 1e-8;

/// A map with a declared Lipschitz constant and the norm it is measured in.
pub trait LipschitzAudit {
    fn declared(&self) -> f64;
    /// Distance between the images of `u` and `v`.
    fn image_distance(&self, u: &[f64], v: &[f64]) -> f64;
}

impl LipschitzAudit for DriftMap {
    fn declared(&self) -> f64 {
        self.lipschitz()
    }

    fn image_distance(&self, u: &[f64], v: &[f64]) -> f64 {
        crate::operators::HVector(self.eval(u)).sub(&crate::operators::HVector(self.eval(v))).norm()
    }
}

/// `B` measured in `|. Q^{1/2}|_HS`.
pub struct DiffusionNorm<'a> {
    pub map: &'a DiffusionMap,
    pub q: &'a DMatrix<f64>,
}

impl DiffusionNorm<'_> {
    pub fn between(&self, other: &DiffusionMap, u: &[f64], v: &[f64]) -> f64 {
        let k = self.q.nrows();
        hs_q_squared(&(self.map.matrix(u, k) - other.matrix(v, k)), self.q).max(0.0).sqrt()
    }
}

impl LipschitzAudit for DiffusionNorm<'_> {
    fn declared(&self) -> f64 {
        self.map.lipschitz(self.q)
    }

    fn image_distance(&self, u: &[f64], v: &[f64]) -> f64 {
        self.between(self.map, u, v)
    }
}

/// `G` measured in `L_2(Z) cap L_p(Z)`.
pub struct JumpNorm<'a> {
    pub map: &'a JumpMap,
    pub intensities: &'a [f64],
    pub p: f64,
}

impl JumpNorm<'_> {
    pub fn between(&self, other: &JumpMap, u: &[f64], v: &[f64]) -> f64 {
        let diffs: Vec<Vec<f64>> = (0..self.intensities.len())
            .map(|i| {
                let a = self.map.eval(i, u);
                let b = other.eval(i, v);
                a.iter().zip(&b).map(|(x, y)| x - y).collect()
            })
            .collect();
        mark_norm(&diffs, self.intensities, self.p)
    }
}

impl LipschitzAudit for JumpNorm<'_> {
    fn declared(&self) -> f64 {
        self.map.lipschitz(self.intensities, self.p)
    }

    fn image_distance(&self, u: &[f64], v: &[f64]) -> f64 {
        self.between(self.map, u, v)
    }
}

/// Isotropic Gaussian states of standard deviation `scale`.
pub fn gaussian_sampler(d: usize, scale: f64) -> impl Fn(&mut ChaCha8Rng) -> Vec<f64> {
    move |rng| (0..d).map(|_| { let z: f64 = StandardNormal.sample(rng); scale * z }).collect::<Vec<f64>>()
}

/// Largest sampled quotient `|F(u) - F(v)| / |u - v|` over `pairs` draws.
/// A lower bound for the true constant; exceeding the declared bound is an error.
pub fn estimate_lipschitz<M, S>(map: &M, sampler: S, pairs: usize, rng_seed: u64) -> Result<f64>
where
    M: LipschitzAudit + ?Sized,
    S: Fn(&mut ChaCha8Rng) -> Vec<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut best = 0.0_f64;
    for _ in 0..pairs.max(1) {
        let u = sampler(&mut rng);
        let v = sampler(&mut rng);
        let du = crate::operators::HVector(u.clone()).sub(&crate::operators::HVector(v.clone())).norm();
        if du == 0.0 {
            continue;
        }
        best = best.max(map.image_distance(&u, &v) / du);
    }
    let declared = map.declared();
    if best > declared * (1.0 + AUDIT_SLACK) + f64::MIN_POSITIVE {
        return Err(Error::BoundViolated { declared, observed: best });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_quotient_is_exact() {
        let est = estimate_lipschitz(&DriftMap::Linear { c: 2.0 }, gaussian_sampler(3, 1.0), 50, 1)
            .unwrap();
        assert!(est > 2.0 - 1e-6 && est <= 2.0);
    }

    #[test]
    fn constant_and_tanh() {
        let c = DriftMap::Constant { value: vec![1.0, 2.0] };
        assert_eq!(estimate_lipschitz(&c, gaussian_sampler(2, 1.0), 20, 2).unwrap(), 0.0);
        let t = DriftMap::Sigmoid { scale: 1.0, gain: 1.0 };
        let near = estimate_lipschitz(&t, gaussian_sampler(2, 1e-3), 200, 3).unwrap();
        let far = estimate_lipschitz(&t, gaussian_sampler(2, 3.0), 200, 3).unwrap();
        assert!(near <= 1.0 && near > 0.999);
        assert!(far < near);
    }

    #[test]
    fn false_claim_is_caught() {
        struct Liar;
        impl LipschitzAudit for Liar {
            fn declared(&self) -> f64 {
                1.0
            }
            fn image_distance(&self, u: &[f64], v: &[f64]) -> f64 {
                3.0 * (u[0] - v[0]).abs()
            }
        }
        assert!(matches!(
            estimate_lipschitz(&Liar, gaussian_sampler(1, 1.0), 10, 4),
            Err(Error::BoundViolated { .. })
        ));
    }
}

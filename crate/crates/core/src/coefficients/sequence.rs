use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::diffusion::DiffusionMap;
use super::drift::DriftMap;
use super::jump::JumpMap;
use crate::rate::Rate;

/// Coefficient types that can be shifted along a direction or rescaled.
pub trait Perturbable: Clone {
    fn perturbed(&self, direction: &Self, weight: f64) -> Self;
    fn scaled(&self, factor: f64) -> Self;
}

macro_rules! perturbable {
    ($t:ident) => {
        impl Perturbable for $t {
            fn perturbed(&self, direction: &Self, weight: f64) -> Self {
                $t::Perturbed {
                    base: Box::new(self.clone()),
                    direction: Box::new(direction.clone()),
                    weight,
                }
            }

            fn scaled(&self, factor: f64) -> Self {
                $t::Scaled { factor, inner: Box::new(self.clone()) }
            }
        }
    };
}

perturbable!(DriftMap);
perturbable!(DiffusionMap);
perturbable!(JumpMap);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Perturbation<T> {
    /// `F_n = F + r_n g`
    Additive { direction: T },
    /// `F_n = (1 + r_n) F`
    Scale,
    /// `F_n = F`
    None,
}

/// `n -> F_n` converging pointwise to `limit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence<T> {
    pub limit: T,
    pub perturbation: Perturbation<T>,
    pub rate: Rate,
}

impl<T: Perturbable> CoefficientSequence<T> {
    pub fn make_convergent_sequence(limit: T, perturbation: Perturbation<T>, rate: Rate) -> Self {
        Self { limit, perturbation, rate }
    }

    pub fn constant(limit: T) -> Self {
        Self { limit, perturbation: Perturbation::None, rate: Rate::zero() }
    }

    pub fn member(&self, n: usize) -> T {
        let r = self.rate.at(n);
        match &self.perturbation {
            Perturbation::Additive { direction } => self.limit.perturbed(direction, r),
            Perturbation::Scale => self.limit.scaled(1.0 + r),
            Perturbation::None => self.limit.clone(),
        }
    }

    /// Largest member constant over `ns`, under the caller's bound function.
    pub fn uniform_bound(&self, ns: &[usize], bound: impl Fn(&T) -> f64) -> f64 {
        ns.iter().map(|&n| bound(&self.member(n))).fold(bound(&self.limit), f64::max)
    }

    /// `max_h dist(F_n(h), F(h))` over probes.
    pub fn probe_distance(
        &self,
        n: usize,
        probes: &[Vec<f64>],
        dist: impl Fn(&T, &T, &[f64]) -> f64,
    ) -> f64 {
        let m = self.member(n);
        probes.iter().map(|h| dist(&m, &self.limit, h)).fold(0.0, f64::max)
    }
}

/// `{0}`, three seeded unit vectors and two vectors of norm 10.
pub fn default_probes(d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![vec![0.0; d]];
    for radius in [1.0, 1.0, 1.0, 10.0, 10.0] {
        let x: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        out.push(x.into_iter().map(|v| radius * v / n).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{mark_norm, JumpNorm};

    fn drift_dist(a: &DriftMap, b: &DriftMap, h: &[f64]) -> f64 {
        a.eval(h).iter().zip(b.eval(h)).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn additive_constant_direction() {
        let seq = CoefficientSequence::make_convergent_sequence(
            DriftMap::Sigmoid { scale: 1.0, gain: 1.0 },
            Perturbation::Additive { direction: DriftMap::Constant { value: vec![3.0, 4.0] } },
            Rate::harmonic(),
        );
        let probes = default_probes(2, 9);
        for n in [1usize, 3, 10] {
            let d = seq.probe_distance(n, &probes, drift_dist);
            assert!((d - 5.0 / n as f64).abs() < 1e-14);
        }
        assert_eq!(seq.uniform_bound(&[1, 2, 4], DriftMap::lipschitz), 1.0);
    }

    #[test]
    fn zero_rate_is_constant() {
        let seq = CoefficientSequence::make_convergent_sequence(
            DriftMap::Linear { c: 1.0 },
            Perturbation::Additive { direction: DriftMap::Linear { c: 5.0 } },
            Rate::zero(),
        );
        assert_eq!(seq.probe_distance(4, &default_probes(3, 1), drift_dist), 0.0);
    }

    #[test]
    fn scaled_jump_distance() {
        let g = JumpMap::Mark {
            shift: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]],
            gain: vec![0.2, -0.1, 0.3],
            saturation: Some(1.0),
        };
        let m = [1.0, 2.0, 0.5];
        let seq = CoefficientSequence::make_convergent_sequence(g.clone(), Perturbation::Scale, Rate::harmonic());
        let u = [0.4, -1.2];
        for n in [1usize, 2, 8] {
            let norm = JumpNorm { map: &seq.member(n), intensities: &m, p: 4.0 };
            let got = norm.between(&g, &u, &u);
            let values: Vec<Vec<f64>> = (0..3).map(|i| g.eval(i, &u)).collect();
            let want = mark_norm(&values, &m, 4.0) / n as f64;
            assert!((got - want).abs() < 1e-14);
        }
    }
}

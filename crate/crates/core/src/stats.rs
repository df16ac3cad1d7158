//! Order-fixed reductions. Paths are split into fixed chunks, each chunk is
//! accumulated sequentially and chunk summaries are merged along a fixed
//! binary tree, so the result does not depend on how many workers ran.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const CHUNK: usize = 64;

/// Running mean and centred second moment (Welford, merged with Chan's rule).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: f64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        if self.count == 0.0 {
            return *other;
        }
        if other.count == 0.0 {
            return *self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2.0 {
            0.0
        } else {
            self.m2 / (self.count - 1.0)
        }
    }

    pub fn estimate(&self) -> Estimate {
        let se = if self.count < 2.0 {
            0.0
        } else {
            (self.variance() / self.count).sqrt()
        };
        Estimate { value: self.mean, se }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, se: 0.0 };

    /// `(E X)^{1/p}` with the delta-method standard error.
    pub fn pth_root(&self, p: f64) -> Estimate {
        if self.value <= 0.0 {
            return Estimate::ZERO;
        }
        let value = self.value.powf(1.0 / p);
        Estimate { value, se: self.se * value / (p * self.value) }
    }

    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.se
    }
}

fn tree_merge(mut parts: Vec<Vec<Moments>>) -> Vec<Moments> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.iter().zip(&b).map(|(x, y)| x.merge(y)).collect()),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().unwrap_or_default()
}

/// Per-component moments of `f(i)` over `i in 0..n`. Every call of `f` must
/// return a vector of length `width`.
pub fn path_moments<F>(n: usize, width: usize, f: F) -> Vec<Moments>
where
    F: Fn(usize) -> Vec<f64> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Moments::default(); width];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let v = f(i);
                assert_eq!(v.len(), width, "path statistic width changed");
                for (m, x) in acc.iter_mut().zip(v) {
                    m.push(x);
                }
            }
            acc
        })
        .collect();
    if parts.is_empty() {
        return vec![Moments::default(); width];
    }
    tree_merge(parts)
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn moments_of(xs: &[f64]) -> Moments {
    let mut m = Moments::default();
    for &x in xs {
        m.push(x);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.3 - 7.0).collect();
        let whole = moments_of(&xs);
        let merged = moments_of(&xs[..333]).merge(&moments_of(&xs[333..]));
        assert!((whole.mean - merged.mean).abs() < 1e-12);
        assert!((whole.m2 - merged.m2).abs() < 1e-8);
        let naive_mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let naive_var =
            xs.iter().map(|x| (x - naive_mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((whole.variance() - naive_var).abs() < 1e-9);
    }

    #[test]
    fn path_moments_independent_of_pool_size() {
        let f = |i: usize| vec![(i as f64).sin(), (i as f64 * 0.1).exp().ln_1p()];
        let run = |k| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .unwrap()
                .install(|| path_moments(1000, 2, f))
        };
        let a = run(1);
        let b = run(7);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.mean.to_bits(), y.mean.to_bits());
            assert_eq!(x.m2.to_bits(), y.m2.to_bits());
        }
    }

    #[test]
    fn pth_root_delta_method() {
        let e = Estimate { value: 4.0, se: 0.4 };
        let r = e.pth_root(2.0);
        assert_eq!(r.value, 2.0);
        assert!((r.se - 0.1).abs() < 1e-15);
        assert_eq!(Estimate::ZERO.pth_root(4.0), Estimate::ZERO);
    }

    #[test]
    fn pairwise_sum_agrees() {
        let xs: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 5050.0);
    }
}

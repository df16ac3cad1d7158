use serde::{Deserialize, Serialize};

/// Drift `f: H -> H`, entering as `du + Au dt + f(u) dt = ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DriftMap {
    Zero,
    Constant { value: Vec<f64> },
    /// `c x`
    Linear { c: f64 },
    /// componentwise `gain * s * tanh(x_k / s)`
    Sigmoid { scale: f64, gain: f64 },
    /// componentwise `c * min(x_k, r)^2` with `x_k` clipped to `[-r, r]`
    ClippedQuadratic { c: f64, r: f64 },
    Scaled { factor: f64, inner: Box<DriftMap> },
    /// `base + weight * direction`
    Perturbed { base: Box<DriftMap>, direction: Box<DriftMap>, weight: f64 },
}

impl DriftMap {
    /// `out = f(x)`
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            DriftMap::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            DriftMap::Constant { value } => out.copy_from_slice(value),
            DriftMap::Linear { c } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = c * xi;
                }
            }
            DriftMap::Sigmoid { scale, gain } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = gain * scale * (xi / scale).tanh();
                }
            }
            DriftMap::ClippedQuadratic { c, r } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    let y = xi.clamp(-r, *r);
                    *o = c * y * y;
                }
            }
            DriftMap::Scaled { factor, inner } => {
                inner.eval_into(x, out);
                out.iter_mut().for_each(|o| *o *= factor);
            }
            DriftMap::Perturbed { base, direction, weight } => {
                base.eval_into(x, out);
                if *weight != 0.0 {
                    let mut g = vec![0.0; out.len()];
                    direction.eval_into(x, &mut g);
                    for (o, gi) in out.iter_mut().zip(&g) {
                        *o += weight * gi;
                    }
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.eval_into(x, &mut out);
        out
    }

    /// Analytic Lipschitz constant.
    pub fn lipschitz(&self) -> f64 {
        match self {
            DriftMap::Zero | DriftMap::Constant { .. } => 0.0,
            DriftMap::Linear { c } => c.abs(),
            DriftMap::Sigmoid { gain, .. } => gain.abs(),
            DriftMap::ClippedQuadratic { c, r } => 2.0 * c.abs() * r,
            DriftMap::Scaled { factor, inner } => factor.abs() * inner.lipschitz(),
            DriftMap::Perturbed { base, direction, weight } => {
                base.lipschitz() + weight.abs() * direction.lipschitz()
            }
        }
    }

    /// `|f(0)|` on a `d`-dimensional truncation.
    pub fn anchor(&self, d: usize) -> f64 {
        crate::operators::HVector(self.eval(&vec![0.0; d])).norm()
    }

    /// `N` with `|f(x)| <= N (1 + |x|)`.
    pub fn growth_constant(&self, d: usize) -> f64 {
        self.anchor(d).max(self.lipschitz())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, DriftMap::Zero)
    }

    /// Dimension pinned by constant parts, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            DriftMap::Constant { value } => Some(value.len()),
            DriftMap::Scaled { inner, .. } => inner.fixed_dim(),
            DriftMap::Perturbed { base, direction, .. } => base.fixed_dim().or(direction.fixed_dim()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluations() {
        assert_eq!(DriftMap::Linear { c: 2.0 }.eval(&[1.0, -3.0]), vec![2.0, -6.0]);
        let s = DriftMap::Sigmoid { scale: 2.0, gain: 1.0 }.eval(&[2.0]);
        assert!((s[0] - 2.0 * 1f64.tanh()).abs() < 1e-15);
        assert_eq!(DriftMap::ClippedQuadratic { c: 1.0, r: 1.0 }.eval(&[0.5, 3.0]), vec![0.25, 1.0]);
        let p = DriftMap::Perturbed {
            base: Box::new(DriftMap::Linear { c: 1.0 }),
            direction: Box::new(DriftMap::Constant { value: vec![1.0, 1.0] }),
            weight: 0.5,
        };
        assert_eq!(p.eval(&[1.0, 2.0]), vec![1.5, 2.5]);
        assert_eq!(p.lipschitz(), 1.0);
        assert_eq!(p.anchor(2), 0.5f64.hypot(0.5));
    }
}

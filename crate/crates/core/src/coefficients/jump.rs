use serde::{Deserialize, Serialize};

/// Jump coefficient `G: Z x H -> H` on a finite mark set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum JumpMap {
    Zero,
    /// `G(z_i, u) = shift_i + gain_i * sat(u)`, where `sat` is the identity or,
    /// with `saturation = Some(s)`, componentwise `s tanh(u / s)`.
    Mark { shift: Vec<Vec<f64>>, gain: Vec<f64>, saturation: Option<f64> },
    Scaled { factor: f64, inner: Box<JumpMap> },
    /// `base + weight * direction`
    Perturbed { base: Box<JumpMap>, direction: Box<JumpMap>, weight: f64 },
}

impl JumpMap {
    pub fn is_state_independent(&self) -> bool {
        match self {
            JumpMap::Zero => true,
            JumpMap::Mark { gain, .. } => gain.iter().all(|g| *g == 0.0),
            JumpMap::Scaled { inner, .. } => inner.is_state_independent(),
            JumpMap::Perturbed { base, direction, weight } => {
                base.is_state_independent() && (*weight == 0.0 || direction.is_state_independent())
            }
        }
    }

    /// State-independent `G(z_i) = values_i`.
    pub fn constant(values: Vec<Vec<f64>>) -> Self {
        let m = values.len();
        JumpMap::Mark { shift: values, gain: vec![0.0; m], saturation: None }
    }

    pub fn eval_into(&self, mark: usize, u: &[f64], out: &mut [f64]) {
        match self {
            JumpMap::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            JumpMap::Mark { shift, gain, saturation } => {
                let g = gain[mark];
                for (k, o) in out.iter_mut().enumerate() {
                    let s = match saturation {
                        Some(s) => s * (u[k] / s).tanh(),
                        None => u[k],
                    };
                    *o = shift[mark][k] + g * s;
                }
            }
            JumpMap::Scaled { factor, inner } => {
                inner.eval_into(mark, u, out);
                out.iter_mut().for_each(|o| *o *= factor);
            }
            JumpMap::Perturbed { base, direction, weight } => {
                base.eval_into(mark, u, out);
                if *weight != 0.0 {
                    let mut g = vec![0.0; out.len()];
                    direction.eval_into(mark, u, &mut g);
                    for (o, gi) in out.iter_mut().zip(&g) {
                        *o += weight * gi;
                    }
                }
            }
        }
    }

    pub fn eval(&self, mark: usize, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.eval_into(mark, u, &mut out);
        out
    }

    /// `out = sum_i m_i G(z_i, u)`, the compensator density.
    pub fn compensator_into(&self, intensities: &[f64], u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut g = vec![0.0; u.len()];
        for (i, m) in intensities.iter().enumerate() {
            if *m == 0.0 {
                continue;
            }
            self.eval_into(i, u, &mut g);
            for (o, gi) in out.iter_mut().zip(&g) {
                *o += m * gi;
            }
        }
    }

    /// Analytic Lipschitz constant in `L_2(Z) cap L_p(Z)`.
    pub fn lipschitz(&self, intensities: &[f64], p: f64) -> f64 {
        match self {
            JumpMap::Zero => 0.0,
            JumpMap::Mark { gain, .. } => {
                let lq = |q: f64| {
                    gain.iter().zip(intensities).map(|(g, m)| m * g.abs().powf(q)).sum::<f64>().powf(1.0 / q)
                };
                lq(2.0).max(lq(p))
            }
            JumpMap::Scaled { factor, inner } => factor.abs() * inner.lipschitz(intensities, p),
            JumpMap::Perturbed { base, direction, weight } => {
                base.lipschitz(intensities, p) + weight.abs() * direction.lipschitz(intensities, p)
            }
        }
    }

    pub fn marks(&self) -> Option<usize> {
        match self {
            JumpMap::Zero => None,
            JumpMap::Mark { gain, .. } => Some(gain.len()),
            JumpMap::Scaled { inner, .. } => inner.marks(),
            JumpMap::Perturbed { base, direction, .. } => base.marks().or(direction.marks()),
        }
    }

    pub fn state_dim(&self) -> Option<usize> {
        match self {
            JumpMap::Zero => None,
            JumpMap::Mark { shift, .. } => shift.first().map(Vec::len),
            JumpMap::Scaled { inner, .. } => inner.state_dim(),
            JumpMap::Perturbed { base, direction, .. } => base.state_dim().or(direction.state_dim()),
        }
    }
}

/// `max(|phi|_{L_2(Z)}, |phi|_{L_p(Z)})` for `phi(z_i) = values[i]`.
pub fn mark_norm(values: &[Vec<f64>], intensities: &[f64], p: f64) -> f64 {
    let norms: Vec<f64> = values.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let lq = |q: f64| {
        norms.iter().zip(intensities).map(|(n, m)| m * n.powf(q)).sum::<f64>().powf(1.0 / q)
    };
    lq(2.0).max(lq(p))
}

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Noise coefficient `B: H -> L(K, H)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DiffusionMap {
    Zero,
    /// `B(u) = matrix` (rows: H, columns: K)
    Additive { matrix: Vec<Vec<f64>> },
    /// `B(u) = diag(offset + sigma * u)`, K = H
    DiagonalMultiplicative { offset: Vec<f64>, sigma: Vec<f64> },
    Scaled { factor: f64, inner: Box<DiffusionMap> },
    /// `base + weight * direction`
    Perturbed { base: Box<DiffusionMap>, direction: Box<DiffusionMap>, weight: f64 },
}

impl DiffusionMap {
    pub fn additive_identity(d: usize, b: f64) -> Self {
        let matrix = (0..d).map(|i| (0..d).map(|j| if i == j { b } else { 0.0 }).collect()).collect();
        DiffusionMap::Additive { matrix }
    }

    pub fn additive_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let matrix =
            (0..d).map(|i| (0..d).map(|j| if i == j { diag[i] } else { 0.0 }).collect()).collect();
        DiffusionMap::Additive { matrix }
    }

    /// `out = B(u) dm`
    pub fn apply_into(&self, u: &[f64], dm: &[f64], out: &mut [f64]) {
        match self {
            DiffusionMap::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            DiffusionMap::Additive { matrix } => {
                for (o, row) in out.iter_mut().zip(matrix) {
                    *o = row.iter().zip(dm).map(|(a, b)| a * b).sum();
                }
            }
            DiffusionMap::DiagonalMultiplicative { offset, sigma } => {
                for k in 0..out.len() {
                    out[k] = (offset[k] + sigma[k] * u[k]) * dm[k];
                }
            }
            DiffusionMap::Scaled { factor, inner } => {
                inner.apply_into(u, dm, out);
                out.iter_mut().for_each(|o| *o *= factor);
            }
            DiffusionMap::Perturbed { base, direction, weight } => {
                base.apply_into(u, dm, out);
                if *weight != 0.0 {
                    let mut g = vec![0.0; out.len()];
                    direction.apply_into(u, dm, &mut g);
                    for (o, gi) in out.iter_mut().zip(&g) {
                        *o += weight * gi;
                    }
                }
            }
        }
    }

    /// Matrix of `B(u)` with `k` columns.
    pub fn matrix(&self, u: &[f64], k: usize) -> DMatrix<f64> {
        let d = u.len();
        let mut m = DMatrix::zeros(d, k);
        let mut e = vec![0.0; k];
        let mut col = vec![0.0; d];
        for j in 0..k {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            self.apply_into(u, &e, &mut col);
            m.set_column(j, &DVector::from_column_slice(&col));
        }
        m
    }

    /// Analytic Lipschitz constant in the `|. Q^{1/2}|_HS` seminorm.
    pub fn lipschitz(&self, q: &DMatrix<f64>) -> f64 {
        match self {
            DiffusionMap::Zero | DiffusionMap::Additive { .. } => 0.0,
            DiffusionMap::DiagonalMultiplicative { sigma, .. } => sigma
                .iter()
                .enumerate()
                .map(|(k, s)| s.abs() * q[(k, k)].max(0.0).sqrt())
                .fold(0.0, f64::max),
            DiffusionMap::Scaled { factor, inner } => factor.abs() * inner.lipschitz(q),
            DiffusionMap::Perturbed { base, direction, weight } => {
                base.lipschitz(q) + weight.abs() * direction.lipschitz(q)
            }
        }
    }

    /// Whether `B` ignores the state.
    pub fn is_additive(&self) -> bool {
        match self {
            DiffusionMap::Zero | DiffusionMap::Additive { .. } => true,
            DiffusionMap::DiagonalMultiplicative { sigma, .. } => sigma.iter().all(|s| *s == 0.0),
            DiffusionMap::Scaled { inner, .. } => inner.is_additive(),
            DiffusionMap::Perturbed { base, direction, weight } => {
                base.is_additive() && (*weight == 0.0 || direction.is_additive())
            }
        }
    }

    /// Number of noise components `B(u)` accepts, if pinned.
    pub fn noise_dim(&self) -> Option<usize> {
        match self {
            DiffusionMap::Zero => None,
            DiffusionMap::Additive { matrix } => matrix.first().map(Vec::len),
            DiffusionMap::DiagonalMultiplicative { sigma, .. } => Some(sigma.len()),
            DiffusionMap::Scaled { inner, .. } => inner.noise_dim(),
            DiffusionMap::Perturbed { base, direction, .. } => base.noise_dim().or(direction.noise_dim()),
        }
    }

    pub fn state_dim(&self) -> Option<usize> {
        match self {
            DiffusionMap::Zero => None,
            DiffusionMap::Additive { matrix } => Some(matrix.len()),
            DiffusionMap::DiagonalMultiplicative { sigma, .. } => Some(sigma.len()),
            DiffusionMap::Scaled { inner, .. } => inner.state_dim(),
            DiffusionMap::Perturbed { base, direction, .. } => base.state_dim().or(direction.state_dim()),
        }
    }
}

/// `|M Q^{1/2}|_HS^2 = tr(M Q M^T)`.
pub fn hs_q_squared(m: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    (m * q * m.transpose()).trace()
}

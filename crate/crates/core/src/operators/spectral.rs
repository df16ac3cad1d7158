use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::vector::{dot, norm, HVector};
use crate::error::{Error, Result};

pub const ORTHONORMAL_TOL: f64 = 1e-10;
const MONOTONE_TOL: f64 = 1e-10;

/// `A` on a d-dimensional truncation, stored by its spectrum and (in dense
/// mode) an orthogonal basis `Q` with `A = Q diag(a) Q^T`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralOperator {
    eigenvalues: Vec<f64>,
    eta: f64,
    basis: Option<DMatrix<f64>>,
}

impl SpectralOperator {
    pub fn diagonal(eigenvalues: Vec<f64>, eta: f64) -> Result<Self> {
        let op = Self::diagonal_unchecked(eigenvalues, eta)?;
        op.check_spectrum()?;
        Ok(op)
    }

    /// Skips the `a_k >= -eta` check; used to audit operators that may
    /// violate it.
    pub fn diagonal_unchecked(eigenvalues: Vec<f64>, eta: f64) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidOperator("dimension must be at least 1".into()));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidOperator(format!("eta must be finite and >= 0, got {eta}")));
        }
        if eigenvalues.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidOperator("non-finite eigenvalue".into()));
        }
        Ok(Self { eigenvalues, eta, basis: None })
    }

    pub fn dense(eigenvalues: Vec<f64>, eta: f64, basis: DMatrix<f64>) -> Result<Self> {
        let mut op = Self::diagonal_unchecked(eigenvalues, eta)?;
        let d = op.dim();
        if basis.nrows() != d || basis.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: basis.nrows() });
        }
        let defect = (basis.transpose() * &basis - DMatrix::identity(d, d)).amax();
        if defect > ORTHONORMAL_TOL {
            return Err(Error::InvalidOperator(format!(
                "basis is not orthonormal (max defect {defect:e})"
            )));
        }
        op.basis = Some(basis);
        op.check_spectrum()?;
        Ok(op)
    }

    /// Dense operator whose eigenbasis is the Q factor of a seeded Gaussian matrix.
    pub fn dense_random(eigenvalues: Vec<f64>, eta: f64, seed: u64) -> Result<Self> {
        let d = eigenvalues.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
        let q = g.qr().q();
        Self::dense(eigenvalues, eta, q)
    }

    /// Dirichlet Laplacian on (0,1): `a_k = (k pi)^2`, k = 1..=d.
    pub fn heat(d: usize) -> Self {
        let eig = (1..=d).map(|k| (k as f64 * std::f64::consts::PI).powi(2)).collect();
        Self::diagonal(eig, 0.0).expect("heat spectrum is valid")
    }

    fn check_spectrum(&self) -> Result<()> {
        if let Some((k, a)) =
            self.eigenvalues.iter().enumerate().find(|(_, &a)| a < -self.eta - MONOTONE_TOL)
        {
            return Err(Error::InvalidOperator(format!(
                "eigenvalue a_{k} = {a} below -eta = {}",
                -self.eta
            )));
        }
        Ok(())
    }

    /// Same basis, new spectrum.
    pub fn with_spectrum(&self, eigenvalues: Vec<f64>, eta: f64) -> Result<Self> {
        if eigenvalues.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: eigenvalues.len() });
        }
        let mut op = Self::diagonal_unchecked(eigenvalues, eta)?;
        op.basis = self.basis.clone();
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn basis(&self) -> Option<&DMatrix<f64>> {
        self.basis.as_ref()
    }

    pub fn is_dense(&self) -> bool {
        self.basis.is_some()
    }

    /// Ambient matrix of `A`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
        match &self.basis {
            None => d,
            Some(q) => q * d * q.transpose(),
        }
    }

    /// Upper end of the admissible resolvent parameter range.
    pub fn lambda_limit(&self) -> f64 {
        if self.eta > 0.0 {
            1.0 / self.eta
        } else {
            f64::INFINITY
        }
    }

    pub fn check_lambda(&self, lambda: f64) -> Result<()> {
        let limit = self.lambda_limit();
        if lambda > 0.0 && lambda < limit {
            Ok(())
        } else {
            Err(Error::LambdaOutOfRange { lambda, limit })
        }
    }

    pub(crate) fn to_spectral(&self, x: &[f64]) -> Vec<f64> {
        match &self.basis {
            None => x.to_vec(),
            Some(q) => (0..self.dim()).map(|k| dot(q.column(k).as_slice(), x)).collect(),
        }
    }

    pub(crate) fn from_spectral(&self, c: &[f64]) -> Vec<f64> {
        match &self.basis {
            None => c.to_vec(),
            Some(q) => {
                let mut out = vec![0.0; self.dim()];
                for (k, ck) in c.iter().enumerate() {
                    for (o, qik) in out.iter_mut().zip(q.column(k).iter()) {
                        *o += qik * ck;
                    }
                }
                out
            }
        }
    }

    /// `g(A) x` for a scalar function of the spectrum.
    pub fn spectral_map(&self, x: &[f64], g: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut c = self.to_spectral(x);
        for (ck, &a) in c.iter_mut().zip(&self.eigenvalues) {
            *ck *= g(a);
        }
        self.from_spectral(&c)
    }

    pub fn apply(&self, x: &HVector) -> Result<HVector> {
        x.expect_dim(self.dim())?;
        Ok(HVector(self.spectral_map(&x.0, |a| a)))
    }

    /// `J_lambda x = (I + lambda A)^{-1} x`. Dense operators use an LU solve.
    pub fn resolvent(&self, lambda: f64, x: &HVector) -> Result<HVector> {
        self.check_lambda(lambda)?;
        x.expect_dim(self.dim())?;
        match &self.basis {
            None => Ok(HVector(
                x.0.iter().zip(&self.eigenvalues).map(|(xk, a)| xk / (1.0 + lambda * a)).collect(),
            )),
            Some(_) => {
                let d = self.dim();
                let m = DMatrix::identity(d, d) + self.matrix() * lambda;
                let y = m
                    .lu()
                    .solve(&DVector::from_column_slice(&x.0))
                    .ok_or_else(|| Error::InvalidOperator("I + lambda A is singular".into()))?;
                Ok(HVector(y.as_slice().to_vec()))
            }
        }
    }

    /// `A_lambda x = (x - J_lambda x) / lambda`.
    pub fn yosida_apply(&self, lambda: f64, x: &HVector) -> Result<HVector> {
        let j = self.resolvent(lambda, x)?;
        Ok(HVector(x.0.iter().zip(&j.0).map(|(a, b)| (a - b) / lambda).collect()))
    }

    pub fn semigroup_apply(&self, t: f64, x: &HVector) -> Result<HVector> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        x.expect_dim(self.dim())?;
        Ok(HVector(self.spectral_map(&x.0, |a| (-t * a).exp())))
    }

    /// `exp(-t A_lambda) x`.
    pub fn yosida_semigroup_apply(&self, lambda: f64, t: f64, x: &HVector) -> Result<HVector> {
        self.check_lambda(lambda)?;
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        x.expect_dim(self.dim())?;
        Ok(HVector(self.spectral_map(&x.0, |a| (-t * a / (1.0 + lambda * a)).exp())))
    }

    /// The bounded operator `A_lambda` with spectrum `a / (1 + lambda a)`.
    ///
    /// Its shift is the smallest `eta' >= 0` making it quasi-monotone, which
    /// is at most `eta / (1 - lambda eta)`.
    pub fn yosida_operator(&self, lambda: f64) -> Result<Self> {
        self.check_lambda(lambda)?;
        let eig: Vec<f64> = self.eigenvalues.iter().map(|a| a / (1.0 + lambda * a)).collect();
        let eta = eig.iter().fold(0.0_f64, |m, &b| m.max(-b));
        self.with_spectrum(eig, eta)
    }

    /// `(A + eta I, eta)`: a monotone operator and the shift to compensate.
    pub fn shift_operator(&self) -> (Self, f64) {
        let eig = self.eigenvalues.iter().map(|a| a + self.eta).collect();
        let op = self.with_spectrum(eig, 0.0).expect("shifted spectrum is monotone");
        (op, self.eta)
    }

    /// Minimum of `<Ax,x> + eta |x|^2` over seeded random unit vectors plus
    /// the eigenvectors, and whether it clears `-1e-10`.
    pub fn check_quasi_monotone(&self, samples: usize, rng_seed: u64) -> (bool, f64) {
        let d = self.dim();
        let a = self.matrix();
        let form = |x: &[f64]| {
            let ax = &a * DVector::from_column_slice(x);
            dot(ax.as_slice(), x) + self.eta * dot(x, x)
        };
        let mut worst = f64::INFINITY;
        for k in 0..d {
            let e = self.from_spectral(HVector::basis(d, k).as_slice());
            worst = worst.min(form(&e));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        for _ in 0..samples {
            let mut x: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = norm(&x);
            if n == 0.0 {
                continue;
            }
            x.iter_mut().for_each(|v| *v /= n);
            worst = worst.min(form(&x));
        }
        (worst >= -MONOTONE_TOL, worst)
    }
}

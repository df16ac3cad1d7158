use nalgebra::DMatrix;

use super::spectral::SpectralOperator;

/// `(1 - e^{-a h}) / a`, continuous at `a = 0`.
pub fn phi(a: f64, h: f64) -> f64 {
    let z = a * h;
    if z.abs() < 1e-8 {
        h * (1.0 - 0.5 * z)
    } else {
        -(-z).exp_m1() / a
    }
}

/// One-step factors `S(h)` and `phi(h) = int_0^h S(r) dr` of `A + kappa I`.
///
/// `kappa` is a linear drift folded into the exponent, `S(h) = e^{-h A} e^{-kappa h}`.
#[derive(Clone, Debug)]
pub struct Propagator {
    basis: Option<DMatrix<f64>>,
    decay: Vec<f64>,
    weight: Vec<f64>,
    h: f64,
}

impl Propagator {
    pub fn new(op: &SpectralOperator, h: f64, kappa: f64) -> Self {
        assert!(h >= 0.0, "propagator step must be nonnegative");
        let decay = op.eigenvalues().iter().map(|a| (-a * h).exp() * (-kappa * h).exp()).collect();
        let weight = op.eigenvalues().iter().map(|a| phi(a + kappa, h)).collect();
        Self { basis: op.basis().cloned(), decay, weight, h }
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    fn apply_factors(&self, f: &[f64], x: &[f64], out: &mut [f64]) {
        match &self.basis {
            None => {
                for ((o, xi), fi) in out.iter_mut().zip(x).zip(f) {
                    *o = fi * xi;
                }
            }
            Some(q) => {
                let d = f.len();
                out.iter_mut().for_each(|o| *o = 0.0);
                for k in 0..d {
                    let col = q.column(k);
                    let c: f64 = col.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() * f[k];
                    for (o, qik) in out.iter_mut().zip(col.iter()) {
                        *o += qik * c;
                    }
                }
            }
        }
    }

    /// `out = S(h) x`
    pub fn step(&self, x: &[f64], out: &mut [f64]) {
        self.apply_factors(&self.decay, x, out);
    }

    /// `out = phi(h) x`
    pub fn integrate(&self, x: &[f64], out: &mut [f64]) {
        self.apply_factors(&self.weight, x, out);
    }

    /// `x <- S(h) x - phi(h) g`
    pub fn advance(&self, x: &mut [f64], g: &[f64], scratch: &mut [f64]) {
        let mut y = vec![0.0; x.len()];
        self.step(x, &mut y);
        self.integrate(g, scratch);
        for ((xi, yi), si) in x.iter_mut().zip(&y).zip(scratch.iter()) {
            *xi = yi - si;
        }
    }
}

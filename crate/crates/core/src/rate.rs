use serde::{Deserialize, Serialize};

/// Schedule `r_n = scale / n^power` used by every perturbation sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub scale: f64,
    pub power: f64,
}

impl Rate {
    pub const fn new(scale: f64, power: f64) -> Self {
        Self { scale, power }
    }

    pub const fn harmonic() -> Self {
        Self::new(1.0, 1.0)
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 1.0)
    }

    pub fn at(&self, n: usize) -> f64 {
        assert!(n >= 1, "sequence index starts at 1");
        self.scale / (n as f64).powf(self.power)
    }
}

impl Default for Rate {
    fn default() -> Self {
        Self::harmonic()
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::diffusion::DiffusionMap;
use super::drift::DriftMap;
use super::jump::JumpMap;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    List(Vec<f64>),
}

pub type Params = BTreeMap<String, ParamValue>;

#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Drift(DriftMap),
    Diffusion(DiffusionMap),
    Jump(JumpMap),
}

fn scalar(params: &Params, key: &str, family: &str) -> Result<f64> {
    match params.get(key) {
        Some(ParamValue::Scalar(x)) => Ok(*x),
        _ => Err(Error::ConfigInvalid(format!("`{family}` needs scalar parameter `{key}`"))),
    }
}

fn scalar_or(params: &Params, key: &str, default: f64, family: &str) -> Result<f64> {
    if params.contains_key(key) {
        scalar(params, key, family)
    } else {
        Ok(default)
    }
}

fn list(params: &Params, key: &str, family: &str) -> Result<Vec<f64>> {
    match params.get(key) {
        Some(ParamValue::List(x)) => Ok(x.clone()),
        _ => Err(Error::ConfigInvalid(format!("`{family}` needs list parameter `{key}`"))),
    }
}

/// Named coefficient families with exact Lipschitz constants.
///
/// | name | map | params |
/// |---|---|---|
/// | `linear` | `f(x) = c x` | `c` |
/// | `saturating_sigmoid` | `f(x)_k = gain s tanh(x_k/s)` | `s`, `gain` (1) |
/// | `clipped_quadratic` | `f(x)_k = c clip(x_k, r)^2` | `c`, `r` |
/// | `zero_drift` | `f = 0` | |
/// | `constant_drift` | `f(x) = v` | `value` list |
/// | `diagonal_multiplicative` | `B(u) = diag(offset + sigma u)` | `offset`, `sigma` |
/// | `additive_constant` | `B(u) = diag(b)` | `b` list, or `b` scalar with `dim` |
/// | `mark_affine` | `G(z_i,u) = shift_i + gain_i sat(u)` | `shift` (marks x d, flat), `gain`, `saturation` (optional) |
pub fn builtin_family(name: &str, params: &Params) -> Result<Coefficient> {
    let c = match name {
        "linear" => Coefficient::Drift(DriftMap::Linear { c: scalar(params, "c", name)? }),
        "saturating_sigmoid" => {
            let scale = scalar(params, "s", name)?;
            if scale <= 0.0 {
                return Err(Error::ConfigInvalid("sigmoid scale must be > 0".into()));
            }
            Coefficient::Drift(DriftMap::Sigmoid { scale, gain: scalar_or(params, "gain", 1.0, name)? })
        }
        "clipped_quadratic" => Coefficient::Drift(DriftMap::ClippedQuadratic {
            c: scalar(params, "c", name)?,
            r: scalar(params, "r", name)?.abs(),
        }),
        "zero_drift" => Coefficient::Drift(DriftMap::Zero),
        "constant_drift" => Coefficient::Drift(DriftMap::Constant { value: list(params, "value", name)? }),
        "diagonal_multiplicative" => {
            let offset = list(params, "offset", name)?;
            let sigma = list(params, "sigma", name)?;
            if offset.len() != sigma.len() {
                return Err(Error::ConfigInvalid("offset and sigma lengths differ".into()));
            }
            Coefficient::Diffusion(DiffusionMap::DiagonalMultiplicative { offset, sigma })
        }
        "additive_constant" => match params.get("b") {
            Some(ParamValue::List(b)) => Coefficient::Diffusion(DiffusionMap::additive_diagonal(b)),
            Some(ParamValue::Scalar(b)) => {
                let d = scalar(params, "dim", name)? as usize;
                Coefficient::Diffusion(DiffusionMap::additive_identity(d, *b))
            }
            None => return Err(Error::ConfigInvalid("`additive_constant` needs `b`".into())),
        },
        "mark_affine" => {
            let gain = list(params, "gain", name)?;
            let flat = list(params, "shift", name)?;
            let m = gain.len();
            if m == 0 || flat.len() % m != 0 {
                return Err(Error::ConfigInvalid("shift must hold marks x dim entries".into()));
            }
            let d = flat.len() / m;
            let shift = flat.chunks(d).map(<[f64]>::to_vec).collect();
            let saturation = match params.get("saturation") {
                Some(ParamValue::Scalar(s)) if *s > 0.0 => Some(*s),
                None => None,
                _ => return Err(Error::ConfigInvalid("saturation must be a positive scalar".into())),
            };
            Coefficient::Jump(JumpMap::Mark { shift, gain, saturation })
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    Ok(c)
}

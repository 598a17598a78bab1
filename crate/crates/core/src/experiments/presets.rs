use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::grid::SpectralGrid;
use crate::kdv::kdv_soliton;
use crate::spectral::sobolev_norm;

use super::config::PresetSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
    /// Which convergence statement the data is meant to exercise.
    pub hypothesis: &'static str,
}

pub fn presets() -> Vec<PresetInfo> {
    vec![
        PresetInfo {
            name: "sech2",
            description: "N0 = a sech^2(X / w), W0 = 0: equal left- and right-going parts",
            hypothesis: "two-wave KdV approximation; finite M-norms, error O(eps^2)",
        },
        PresetInfo {
            name: "gaussian",
            description: "N0 = a exp(-(X / w)^2), W0 = 0",
            hypothesis: "two-wave KdV approximation; finite M-norms, error O(eps^2)",
        },
        PresetInfo {
            name: "copropagating",
            description: "N0 = W0 = a sech^2(X / w): only the left-going wave, V0 = 0 in frame minus",
            hypothesis: "unidirectional limit with V0 = 0, error O(eps^2)",
        },
        PresetInfo {
            name: "perturbed",
            description: "copropagating data plus a right-going part V0 with ||V0||_{H^k} fixed",
            hypothesis: "unidirectional limit, error O(eps^2 + ||V0||)",
        },
        PresetInfo {
            name: "kdv-soliton",
            description: "N0 = W0 = 3c sech^2(sqrt(c) X / 2): a single KdV soliton in frame minus",
            hypothesis: "KdV travelling-wave oracle",
        },
        PresetInfo {
            name: "dark-soliton",
            description: "exact GP dark soliton of speed c (GP runs only)",
            hypothesis: "GP travelling-wave oracle",
        },
        PresetInfo {
            name: "constant",
            description: "psi = 1, the ground state (GP runs only)",
            hypothesis: "trivial stationary solution",
        },
    ]
}

pub fn preset_info(name: &str) -> Result<PresetInfo> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))
}

fn sech2(a: f64, w: f64) -> impl Fn(f64) -> f64 {
    move |x| {
        let s = 1.0 / (x / w).cosh();
        a * s * s
    }
}

/// Slow initial data `(N0, W0)` of a preset on `grid`.
///
/// `k` is the Sobolev order used to normalise the perturbation of `perturbed`.
pub fn build_preset(spec: &PresetSpec, grid: SpectralGrid, k: usize) -> Result<(RealField, RealField)> {
    preset_info(&spec.name)?;
    if !(spec.width > 0.0 && spec.amplitude.is_finite()) {
        return Err(Error::Config("preset width must be positive".into()));
    }
    let (a, w) = (spec.amplitude, spec.width);
    match spec.name.as_str() {
        "sech2" => Ok((RealField::from_fn(grid, sech2(a, w))?, RealField::zeros(grid))),
        "gaussian" => Ok((
            RealField::from_fn(grid, |x| a * (-(x / w) * (x / w)).exp())?,
            RealField::zeros(grid),
        )),
        "copropagating" => {
            let n = RealField::from_fn(grid, sech2(a, w))?;
            Ok((n.clone(), n))
        }
        "perturbed" => {
            let n = RealField::from_fn(grid, sech2(a, w))?;
            let shape = RealField::from_fn(grid, sech2(1.0, w))?;
            let v0 = shape.scaled(spec.perturbation / sobolev_norm(&shape, k)?);
            let w0 = n.zip_with(&v0, |n, v| n - 2.0 * v)?;
            Ok((n, w0))
        }
        "kdv-soliton" => {
            let n = kdv_soliton(spec.speed, grid, 0.0)?;
            Ok((n.clone(), n))
        }
        "constant" => Ok((RealField::zeros(grid), RealField::zeros(grid))),
        other => Err(Error::Config(format!(
            "preset '{other}' does not define slow initial data"
        ))),
    }
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpectralGrid;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Left edge; defaults to `-length / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<f64>,
    pub length: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn centered(length: f64, n_points: usize) -> Self {
        Self {
            origin: None,
            length,
            n_points,
        }
    }

    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::with_origin(
            self.origin.unwrap_or(-0.5 * self.length),
            self.length,
            self.n_points,
        )
    }
}

/// Named initial data with its shape parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSpec {
    pub name: String,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "one")]
    pub width: f64,
    /// `H^k` size of the counter-propagating part for the `perturbed` preset.
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
    /// Speed parameter for the soliton presets.
    #[serde(default = "half")]
    pub speed: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn default_perturbation() -> f64 {
    0.1
}

impl PresetSpec {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            amplitude: 1.0,
            width: 1.0,
            perturbation: default_perturbation(),
            speed: half(),
        }
    }
}

/// Settings of the free-wave comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSpec {
    pub epsilon: f64,
    pub t_final: f64,
    pub t_samples: usize,
    pub k: usize,
    /// Epsilons of the scaling sweeps.
    pub scaling_epsilons: Vec<f64>,
    /// Fast time of the fixed-`t` sweep.
    pub scaling_time: f64,
    /// Value of `eps t` in the fixed-product sweep.
    pub scaling_product: f64,
}

impl Default for WaveSpec {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            t_final: 100.0,
            t_samples: 21,
            k: 0,
            scaling_epsilons: vec![0.2, 0.141, 0.1],
            scaling_time: 100.0,
            scaling_product: 10.0,
        }
    }
}

/// Settings of the slow-system residual check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualSpec {
    pub epsilon: f64,
    pub tau: f64,
    /// Fast-time half-spacing of the coarse difference stencil; the fine one uses half.
    pub fast_step: f64,
    /// Slow coordinate of the base point `-R`; `None` uses the window's left edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
}

impl Default for ResidualSpec {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            tau: 0.02,
            fast_step: 0.5,
            base: None,
        }
    }
}

/// Everything a study needs; identical configs give byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub version: u32,
    pub epsilons: Vec<f64>,
    pub tau_final: f64,
    pub tau_samples: usize,
    /// Sobolev orders to report.
    pub k: Vec<usize>,
    pub preset: PresetSpec,
    pub fast_grid: GridSpec,
    pub slow_grid: GridSpec,
    pub gp_dt: f64,
    pub kdv_dtau: f64,
    #[serde(default)]
    pub wave: WaveSpec,
    #[serde(default)]
    pub residual: ResidualSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            epsilons: vec![0.2, 0.141, 0.1],
            tau_final: 0.3,
            tau_samples: 31,
            k: vec![0, 2],
            preset: PresetSpec {
                width: 1.5,
                ..PresetSpec::named("sech2")
            },
            fast_grid: GridSpec::centered(4096.0, 8192),
            slow_grid: GridSpec::centered(160.0, 1024),
            gp_dt: 0.0125,
            kdv_dtau: 1e-4,
            wave: WaveSpec::default(),
            residual: ResidualSpec::default(),
            output_dir: None,
        }
    }
}

impl StudyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// `tau_samples` equally spaced times in `[0, tau_final]`.
    pub fn taus(&self) -> Vec<f64> {
        sample_times(self.tau_final, self.tau_samples)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.version != CONFIG_VERSION {
            return bad(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            ));
        }
        for &e in &self.epsilons {
            if !(e > 0.0 && e <= 1.0) {
                return bad(format!("epsilon {e} outside (0, 1]"));
            }
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return bad("epsilons must be strictly decreasing".into());
        }
        if !(self.tau_final.is_finite() && self.tau_final >= 0.0) {
            return bad(format!("tau_final must be non-negative, got {}", self.tau_final));
        }
        if self.tau_samples < 2 {
            return bad("tau_samples must be at least 2".into());
        }
        if self.k.is_empty() || self.k.iter().any(|&k| k > 4) {
            return bad("k must list Sobolev orders between 0 and 4".into());
        }
        if !(self.gp_dt > 0.0 && self.kdv_dtau > 0.0) {
            return bad("time steps must be positive".into());
        }
        let fast = self.fast_grid.grid()?;
        let slow = self.slow_grid.grid()?;
        for &eps in &self.epsilons {
            let t = crate::bridge::fast_time(eps, self.tau_final);
            for frame in crate::bridge::Frame::BOTH {
                let tmax = crate::bridge::max_window_time(&fast, &slow, eps, frame);
                if t > tmax {
                    return bad(format!(
                        "eps = {eps}: the {} window leaves the box at t = {tmax:.1} before t = {t:.1}",
                        frame.label()
                    ));
                }
            }
            if slow.origin() / eps < fast.origin() || slow.end() / eps > fast.end() {
                return bad(format!("eps = {eps}: slow window does not fit in the fast box"));
            }
        }
        Ok(())
    }
}

pub fn sample_times(end: f64, samples: usize) -> Vec<f64> {
    if samples < 2 {
        return vec![0.0];
    }
    (0..samples)
        .map(|i| end * i as f64 / (samples - 1) as f64)
        .collect()
}

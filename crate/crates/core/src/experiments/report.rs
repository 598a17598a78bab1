//! CSV tables and JSON summaries.
//!
//! Report files depend only on the config, so reruns are byte-identical. Wall-clock
//! timings go to a separate `timings.json`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bounds::BoundReport;
use super::config::StudyConfig;
use super::convergence::{EnvelopeFit, ErrorRow, OrderFit, PlateauFit, VNormRow};
use super::runner::{DriftRow, RunSummary};

pub const REPORT_FORMAT: &str = "gpkdv-report";
pub const REPORT_VERSION: u32 = 1;

pub const ORDER_RANGE: (f64, f64) = (1.7, 2.3);
/// Largest allowed ratio between per-epsilon envelope constants.
pub const ENVELOPE_SPREAD_MAX: f64 = 2.0;
pub const PLATEAU_SPREAD_MAX: f64 = 0.3;
pub const SLOPE_SPREAD_MAX: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, range: (f64, f64)) -> Self {
        Self {
            name: name.into(),
            value,
            lo: Some(range.0),
            hi: Some(range.1),
            pass: value >= range.0 && value <= range.1,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lo: None,
            hi: Some(hi),
            pass: value <= hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub format: String,
    pub version: u32,
    pub study: String,
    pub hypothesis: String,
    pub config: StudyConfig,
    pub errors: Vec<ErrorRow>,
    pub fits: Vec<OrderFit>,
    pub envelopes: Vec<EnvelopeFit>,
    pub v_norms: Vec<VNormRow>,
    pub plateaus: Vec<PlateauFit>,
    pub bounds: BoundReport,
    pub drift: Vec<DriftRow>,
    pub checks: Vec<Check>,
}

impl StudyReport {
    pub fn new(study: &str, config: StudyConfig, hypothesis: String) -> Self {
        Self {
            format: REPORT_FORMAT.into(),
            version: REPORT_VERSION,
            study: study.into(),
            hypothesis,
            config,
            errors: Vec::new(),
            fits: Vec::new(),
            envelopes: Vec::new(),
            v_norms: Vec::new(),
            plateaus: Vec::new(),
            bounds: BoundReport::default(),
            drift: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub(crate) fn with_errors(
        mut self,
        errors: Vec<ErrorRow>,
        fits: Vec<OrderFit>,
        envelopes: Vec<EnvelopeFit>,
    ) -> Self {
        self.errors = errors;
        self.fits = fits;
        self.envelopes = envelopes;
        self
    }

    pub(crate) fn with_unidirectional(mut self, v: Vec<VNormRow>, p: Vec<PlateauFit>) -> Self {
        self.v_norms = v;
        self.plateaus = p;
        self
    }

    pub(crate) fn with_bounds(mut self, b: BoundReport) -> Self {
        self.bounds = b;
        self
    }

    pub(crate) fn with_drift(mut self, d: Vec<DriftRow>) -> Self {
        self.drift = d;
        self
    }

    pub(crate) fn with_checks(mut self, c: Vec<Check>) -> Self {
        self.checks = c;
        self
    }

    /// Fit at the final sample time, if one was made.
    pub fn final_order(&self, frame: crate::bridge::Frame, k: usize) -> Option<f64> {
        let tau = self.config.tau_final;
        self.fits
            .iter()
            .find(|f| f.frame == frame && f.k == k && (f.tau - tau).abs() <= 1e-12 * tau.max(1.0))
            .map(|f| f.fitted_order)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("report: {e}")))
    }
}

/// A finished study with its timings.
#[derive(Debug, Clone)]
pub struct StudyOutcome {
    pub report: StudyReport,
    pub runs: Vec<RunSummary>,
}

/// Plain decimal for moderate magnitudes, exponent form otherwise; both round-trip.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Builds CSV text from a header and rows of already formatted cells.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.join(","));
    }
    s
}

pub fn errors_csv(rows: &[ErrorRow]) -> String {
    csv_table(
        &["epsilon", "tau", "frame", "k", "hk_error", "cumulative"],
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.epsilon),
                fmt_f64(r.tau),
                r.frame.label().into(),
                r.k.to_string(),
                fmt_f64(r.hk_error),
                fmt_f64(r.cumulative),
            ]
        }),
    )
}

pub fn fits_csv(rows: &[OrderFit]) -> String {
    csv_table(
        &["frame", "k", "tau", "fitted_order", "intercept", "r_squared"],
        rows.iter().map(|r| {
            vec![
                r.frame.label().into(),
                r.k.to_string(),
                fmt_f64(r.tau),
                fmt_f64(r.fitted_order),
                fmt_f64(r.intercept),
                fmt_f64(r.r_squared),
            ]
        }),
    )
}

fn envelopes_csv(rows: &[EnvelopeFit]) -> String {
    csv_table(
        &["frame", "k", "rate", "constant", "spread"],
        rows.iter().map(|r| {
            vec![
                r.frame.label().into(),
                r.k.to_string(),
                fmt_f64(r.rate),
                fmt_f64(r.constant),
                opt(r.spread),
            ]
        }),
    )
}

fn v_norms_csv(rows: &[VNormRow]) -> String {
    csv_table(
        &["epsilon", "tau", "frame", "k", "v_norm"],
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.epsilon),
                fmt_f64(r.tau),
                r.frame.label().into(),
                r.k.to_string(),
                fmt_f64(r.v_norm),
            ]
        }),
    )
}

fn bounds_csv(b: &BoundReport) -> String {
    csv_table(
        &[
            "epsilon",
            "tau",
            "k",
            "hk_n",
            "eps_dk1_n",
            "hk_dtheta",
            "m_norm_n",
            "m_norm_dtheta",
            "gamma",
        ],
        b.rows.iter().map(|r| {
            vec![
                fmt_f64(r.epsilon),
                fmt_f64(r.tau),
                r.k.to_string(),
                fmt_f64(r.hk_n),
                fmt_f64(r.eps_dk1_n),
                fmt_f64(r.hk_dtheta),
                fmt_f64(r.m_norm_n),
                fmt_f64(r.m_norm_dtheta),
                fmt_f64(r.gamma),
            ]
        }),
    )
}

pub fn drift_csv(rows: &[DriftRow]) -> String {
    csv_table(
        &["epsilon", "t_final", "E", "E2", "E3", "E4", "m_plus", "m_minus"],
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.epsilon),
                fmt_f64(r.t_final),
                fmt_f64(r.energy),
                fmt_f64(r.e2),
                fmt_f64(r.e3),
                fmt_f64(r.e4),
                fmt_f64(r.m_plus),
                fmt_f64(r.m_minus),
            ]
        }),
    )
}

pub fn timings_json(runs: &[RunSummary]) -> String {
    serde_json::to_string_pretty(runs).expect("timings serialise")
}

/// Writes `files` into `dir`, creating it if needed; returns the written paths.
pub fn write_files(dir: &Path, files: Vec<(&str, String)>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::with_capacity(files.len());
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}

pub fn write_report(outcome: &StudyOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    let r = &outcome.report;
    write_files(
        dir,
        vec![
            ("errors.csv", errors_csv(&r.errors)),
            ("fits.csv", fits_csv(&r.fits)),
            ("envelopes.csv", envelopes_csv(&r.envelopes)),
            ("v_norms.csv", v_norms_csv(&r.v_norms)),
            ("bounds.csv", bounds_csv(&r.bounds)),
            ("drift.csv", drift_csv(&r.drift)),
            ("summary.json", r.to_json()),
            ("timings.json", timings_json(&outcome.runs)),
        ],
    )
}

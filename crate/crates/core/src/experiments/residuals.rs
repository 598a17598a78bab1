//! Time-step refinement check of the slow-system residuals.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bridge::{
    extract_slow_frame, fast_time, interaction_terms, slow_system_residuals, build_initial_data,
    Frame, InteractionTerms, ResidualNorms, SlowFrame,
};
use crate::error::{Error, Result};

use super::config::StudyConfig;
use super::presets::build_preset;
use super::report::{csv_table, fmt_f64, timings_json, write_files, Check, REPORT_FORMAT, REPORT_VERSION};
use super::runner::{drive_gp, DriftRow, RunSummary};

/// Coarse-to-fine reduction expected from a second-order difference.
pub const RESIDUAL_RATIO_RANGE: (f64, f64) = (3.0, 5.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub frame: Frame,
    /// Fast-time half-width of the difference stencil.
    pub fast_step: f64,
    pub norms: ResidualNorms,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRatios {
    pub frame: Frame,
    pub kdv: f64,
    pub transport: f64,
    pub upsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub format: String,
    pub version: u32,
    pub study: String,
    pub config: StudyConfig,
    pub rows: Vec<ResidualRow>,
    pub ratios: Vec<ResidualRatios>,
    pub drift: DriftRow,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone)]
pub struct ResidualOutcome {
    pub report: ResidualReport,
    pub runs: Vec<RunSummary>,
}

/// Residual norms at `residual.tau` from stencils of half-width `h` and `h / 2`.
pub fn residual_study(cfg: &StudyConfig) -> Result<ResidualOutcome> {
    let spec = &cfg.residual;
    let eps = spec.epsilon;
    let h = spec.fast_step;
    if !(eps > 0.0 && eps <= 1.0 && h > 0.0 && spec.tau >= 0.0) {
        return Err(Error::Config("residual settings must be positive".into()));
    }
    let tc = fast_time(eps, spec.tau);
    if tc < h {
        return Err(Error::Config(format!(
            "residual.tau = {} is shorter than one stencil step",
            spec.tau
        )));
    }
    let fast = cfg.fast_grid.grid()?;
    let slow = cfg.slow_grid.grid()?;
    let (n0, w0) = build_preset(&cfg.preset, slow, 0)?;
    let state = build_initial_data(&n0, &w0, eps, &fast)?;
    let times: Vec<f64> = (0..5).map(|i| tc + 0.5 * h * (i as f64 - 2.0)).collect();
    let mut samples: Vec<Vec<(SlowFrame, InteractionTerms)>> = vec![Vec::new(); 2];
    let label = format!("residuals eps={eps}");
    let (run, drift) = drive_gp(&label, eps, state, cfg.gp_dt, &times, |gp, _| {
        for (j, frame) in Frame::BOTH.into_iter().enumerate() {
            let sf = extract_slow_frame(gp, eps, frame, &slow)?;
            let terms = interaction_terms(&sf, spec.base)?;
            samples[j].push((sf, terms));
        }
        Ok(())
    })?;

    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    let mut checks = Vec::new();
    for (j, frame) in Frame::BOTH.into_iter().enumerate() {
        let s = &samples[j];
        let coarse = slow_system_residuals(&[s[0].clone(), s[2].clone(), s[4].clone()])?[0];
        let fine = slow_system_residuals(&s[1..4])?[0];
        rows.push(ResidualRow {
            frame,
            fast_step: h,
            norms: coarse,
        });
        rows.push(ResidualRow {
            frame,
            fast_step: 0.5 * h,
            norms: fine,
        });
        let r = ResidualRatios {
            frame,
            kdv: coarse.kdv / fine.kdv,
            transport: coarse.transport / fine.transport,
            upsilon: coarse.upsilon / fine.upsilon,
        };
        for (name, v) in [("kdv", r.kdv), ("transport", r.transport), ("upsilon", r.upsilon)] {
            checks.push(Check::within(
                format!("residual_ratio {} {name}", frame.label()),
                v,
                RESIDUAL_RATIO_RANGE,
            ));
        }
        ratios.push(r);
    }
    Ok(ResidualOutcome {
        report: ResidualReport {
            format: REPORT_FORMAT.into(),
            version: REPORT_VERSION,
            study: "residuals".into(),
            config: cfg.clone(),
            rows,
            ratios,
            drift,
            checks,
        },
        runs: vec![run],
    })
}

pub fn write_residual_report(outcome: &ResidualOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    let r = &outcome.report;
    let table = csv_table(
        &["frame", "fast_step", "tau", "kdv", "transport", "upsilon", "transport_scale"],
        r.rows.iter().map(|row| {
            vec![
                row.frame.label().into(),
                fmt_f64(row.fast_step),
                fmt_f64(row.norms.tau),
                fmt_f64(row.norms.kdv),
                fmt_f64(row.norms.transport),
                fmt_f64(row.norms.upsilon),
                fmt_f64(row.norms.transport_scale),
            ]
        }),
    );
    write_files(
        dir,
        vec![
            ("residuals.csv", table),
            ("summary.json", serde_json::to_string_pretty(r).expect("report serialises")),
            ("timings.json", timings_json(&outcome.runs)),
        ],
    )
}

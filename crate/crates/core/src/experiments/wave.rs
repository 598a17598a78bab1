//! Comparison with the free wave equation in the `(y, s) = (eps x, eps t)` scaling.

use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bridge::{build_initial_data, dtheta_scale, line_energies, n_scale, slow_to_fast};
use crate::error::{Error, Result};
use crate::field::RealField;
use crate::fit::{linear_fit, power_law_fit, LineFit};
use crate::gp::{madelung, GpState, VACUUM_FLOOR};
use crate::grid::SpectralGrid;

use super::config::{sample_times, StudyConfig};
use super::presets::build_preset;
use super::report::{csv_table, fmt_f64, timings_json, write_files, Check, REPORT_FORMAT, REPORT_VERSION};
use super::runner::{drive_gp, sweep, DriftRow, RunSummary};

/// Required `R^2` of the linear-in-`t` fit.
pub const WAVE_LINEAR_R2_MIN: f64 = 0.95;
pub const WAVE_EXPONENT_RANGE: (f64, f64) = (2.5, 3.5);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveRow {
    pub epsilon: f64,
    pub t: f64,
    pub error_n: f64,
    pub error_w: f64,
    /// `(error_n^2 + error_w^2)^{1/2}`.
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub epsilon: f64,
    pub t: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveReport {
    pub format: String,
    pub version: u32,
    pub study: String,
    pub config: StudyConfig,
    pub rows: Vec<WaveRow>,
    pub linear_fit: Option<LineFit>,
    /// Smallest `K` with `error <= K eps^3 t` over the time series.
    pub envelope_constant: f64,
    pub fixed_time: Vec<ScalingPoint>,
    pub fixed_time_exponent: Option<f64>,
    pub fixed_product: Vec<ScalingPoint>,
    pub fixed_product_exponent: Option<f64>,
    pub drift: Vec<DriftRow>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone)]
pub struct WaveOutcome {
    pub report: WaveReport,
    pub runs: Vec<RunSummary>,
}

/// Free-wave prediction `(n, w)` on the fast grid at fast time `t`.
fn dalembert(n0: &RealField, w0: &RealField, eps: f64, t: f64, fast: &SpectralGrid) -> Result<(RealField, RealField)> {
    let right = n0.zip_with(w0, |n, w| 0.5 * (n - w))?;
    let left = n0.zip_with(w0, |n, w| 0.5 * (n + w))?;
    let r = slow_to_fast(&right, eps, SQRT_2 * t, fast)?;
    let l = slow_to_fast(&left, eps, -SQRT_2 * t, fast)?;
    Ok((r.add(&l)?, l.sub(&r)?))
}

fn wave_error(
    gp: &GpState,
    n0: &RealField,
    w0: &RealField,
    eps: f64,
    k: usize,
) -> Result<WaveRow> {
    let h = madelung(gp, VACUUM_FLOOR)?;
    let (n, w) = dalembert(n0, w0, eps, gp.time, gp.grid())?;
    let dn = h.eta.scaled(n_scale(eps)).sub(&n)?;
    let dw = h.dphi.scaled(dtheta_scale(eps)).sub(&w)?;
    let en: f64 = line_energies(&dn, 1.0, eps, k)?.iter().sum();
    let ew: f64 = line_energies(&dw, 1.0, eps, k)?.iter().sum();
    Ok(WaveRow {
        epsilon: eps,
        t: gp.time,
        error_n: en.sqrt(),
        error_w: ew.sqrt(),
        error: (en + ew).sqrt(),
    })
}

struct Job {
    label: String,
    epsilon: f64,
    times: Vec<f64>,
}

fn check_box(cfg: &StudyConfig, job: &Job) -> Result<()> {
    let fast = cfg.fast_grid.grid()?;
    let slow = cfg.slow_grid.grid()?;
    let t = job.times.iter().copied().fold(0.0, f64::max);
    let lo = slow.origin() / job.epsilon - SQRT_2 * t;
    let hi = slow.end() / job.epsilon + SQRT_2 * t;
    if lo < fast.origin() || hi > fast.end() {
        return Err(Error::WindowEscape {
            lo,
            hi,
            box_lo: fast.origin(),
            box_hi: fast.end(),
            max_time: ((slow.origin() / job.epsilon - fast.origin())
                .min(fast.end() - slow.end() / job.epsilon)
                / SQRT_2)
                .max(0.0),
        });
    }
    Ok(())
}

fn run_job(cfg: &StudyConfig, job: &Job) -> Result<(Vec<WaveRow>, RunSummary, DriftRow)> {
    check_box(cfg, job)?;
    let fast = cfg.fast_grid.grid()?;
    let slow = cfg.slow_grid.grid()?;
    let (n0, w0) = build_preset(&cfg.preset, slow, cfg.wave.k)?;
    let state = build_initial_data(&n0, &w0, job.epsilon, &fast)?;
    let mut rows = Vec::with_capacity(job.times.len());
    let (run, drift) = drive_gp(&job.label, job.epsilon, state, cfg.gp_dt, &job.times, |gp, _| {
        rows.push(wave_error(gp, &n0, &w0, job.epsilon, cfg.wave.k)?);
        Ok(())
    })?;
    Ok((rows, run, drift))
}

fn exponent(points: &[ScalingPoint]) -> Option<f64> {
    if points.len() < 3 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.epsilon).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.error).collect();
    power_law_fit(&xs, &ys).map(|f| f.slope)
}

/// Time series at `wave.epsilon` plus the fixed-`t` and fixed-`eps t` scaling sweeps.
pub fn wave_limit_study(cfg: &StudyConfig, workers: usize) -> Result<WaveOutcome> {
    cfg.validate()?;
    let w = &cfg.wave;
    if !(w.epsilon > 0.0 && w.t_final >= 0.0 && w.scaling_time >= 0.0 && w.scaling_product >= 0.0) {
        return Err(Error::Config("wave settings must be positive".into()));
    }
    if w.t_samples < 2 {
        return Err(Error::Config("wave.t_samples must be at least 2".into()));
    }
    let mut jobs = vec![Job {
        label: format!("wave eps={}", w.epsilon),
        epsilon: w.epsilon,
        times: sample_times(w.t_final, w.t_samples),
    }];
    for &eps in &w.scaling_epsilons {
        let mut times = vec![w.scaling_time, w.scaling_product / eps];
        times.sort_by(f64::total_cmp);
        times.dedup();
        jobs.push(Job {
            label: format!("wave scaling eps={eps}"),
            epsilon: eps,
            times,
        });
    }
    let results = sweep(&jobs, workers, |job| run_job(cfg, job))?;

    let mut runs = Vec::new();
    let mut drift = Vec::new();
    let mut rows = Vec::new();
    let mut fixed_time = Vec::new();
    let mut fixed_product = Vec::new();
    for (i, (r, run, d)) in results.into_iter().enumerate() {
        runs.push(run);
        drift.push(d);
        if i == 0 {
            rows = r;
            continue;
        }
        let eps = jobs[i].epsilon;
        let at = |t: f64| {
            r.iter()
                .find(|row| (row.t - t).abs() <= 1e-9 * t.max(1.0))
                .map(|row| ScalingPoint {
                    epsilon: eps,
                    t: row.t,
                    error: row.error,
                })
        };
        fixed_time.extend(at(w.scaling_time));
        fixed_product.extend(at(w.scaling_product / eps));
    }
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let es: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let line = linear_fit(&ts, &es);
    let e3 = w.epsilon.powi(3);
    let envelope_constant = rows
        .iter()
        .filter(|r| r.t > 0.0)
        .map(|r| r.error / (e3 * r.t))
        .fold(0.0, f64::max);
    let fixed_time_exponent = exponent(&fixed_time);
    let fixed_product_exponent = exponent(&fixed_product);

    let mut checks = Vec::new();
    if let Some(l) = line {
        checks.push(Check::within("linear_in_t_r_squared", l.r_squared, (WAVE_LINEAR_R2_MIN, 1.0)));
    }
    if let Some(p) = fixed_product_exponent {
        checks.push(Check::within("fixed_product_exponent", p, WAVE_EXPONENT_RANGE));
    }
    let report = WaveReport {
        format: REPORT_FORMAT.into(),
        version: REPORT_VERSION,
        study: "wave-limit".into(),
        config: cfg.clone(),
        rows,
        linear_fit: line,
        envelope_constant,
        fixed_time,
        fixed_time_exponent,
        fixed_product,
        fixed_product_exponent,
        drift,
        checks,
    };
    Ok(WaveOutcome { report, runs })
}

fn scaling_rows<'a>(kind: &str, pts: &'a [ScalingPoint]) -> impl Iterator<Item = Vec<String>> + 'a {
    let kind = kind.to_string();
    pts.iter().map(move |p| {
        vec![kind.clone(), fmt_f64(p.epsilon), fmt_f64(p.t), fmt_f64(p.error)]
    })
}

pub fn write_wave_report(outcome: &WaveOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    let r = &outcome.report;
    let series = csv_table(
        &["epsilon", "t", "error_n", "error_w", "error"],
        r.rows.iter().map(|w| {
            vec![
                fmt_f64(w.epsilon),
                fmt_f64(w.t),
                fmt_f64(w.error_n),
                fmt_f64(w.error_w),
                fmt_f64(w.error),
            ]
        }),
    );
    let scaling = csv_table(
        &["sweep", "epsilon", "t", "error"],
        scaling_rows("fixed_time", &r.fixed_time).chain(scaling_rows("fixed_product", &r.fixed_product)),
    );
    write_files(
        dir,
        vec![
            ("wave_errors.csv", series),
            ("wave_scaling.csv", scaling),
            ("drift.csv", super::report::drift_csv(&r.drift)),
            ("summary.json", serde_json::to_string_pretty(r).expect("report serialises")),
            ("timings.json", timings_json(&outcome.runs)),
        ],
    )
}

//! Two-wave and unidirectional KdV convergence sweeps.

use serde::{Deserialize, Serialize};

use crate::bridge::{
    build_initial_data, dtheta_scale, extract_slow_frame, fast_time, line_energies, line_norms,
    n_scale, slow_to_fast, Frame,
};
use crate::error::{Error, Result};
use crate::field::RealField;
use crate::fit::{linear_fit, power_law_fit};
use crate::gp::{madelung, HydroFields, VACUUM_FLOOR};
use crate::kdv::{KdvConfig, KdvSign, KdvSolver, KdvState};

use super::bounds::{summarize_bounds, BoundReport, BoundRow};
use super::config::StudyConfig;
use super::presets::{build_preset, preset_info};
use super::report::{
    Check, StudyOutcome, StudyReport, ENVELOPE_SPREAD_MAX, ORDER_RANGE, PLATEAU_SPREAD_MAX,
    SLOPE_SPREAD_MAX,
};
use super::runner::{drive_gp, sweep, DriftRow, RunSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    /// `U_eps` against the KdV solution started from `U_eps(0)`.
    Convergence,
    /// `N_eps`, `dTheta_eps` against KdV solutions started from `N_eps(0)`, `dTheta_eps(0)`.
    Unidirectional,
}

impl StudyKind {
    pub fn label(self) -> &'static str {
        match self {
            StudyKind::Convergence => "convergence",
            StudyKind::Unidirectional => "unidirectional",
        }
    }
}

/// Approximation error at one `(eps, tau, frame, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub epsilon: f64,
    pub tau: f64,
    pub frame: Frame,
    pub k: usize,
    pub hk_error: f64,
    /// `int_0^|tau| ||d^k Z||^2`, trapezoid over the samples.
    pub cumulative: f64,
}

/// Least-squares slope of `log error` against `log eps` at one `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub frame: Frame,
    pub k: usize,
    pub tau: f64,
    pub fitted_order: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonConstant {
    pub epsilon: f64,
    pub constant: f64,
}

/// `error <= C eps^2 exp(K tau)` fitted jointly over all epsilons.
///
/// `rate` is the slope of `log(error / eps^2)` against `tau`, clipped at zero;
/// `constant` is the smallest `C` covering every sample, and `spread` the ratio of
/// the largest to the smallest per-epsilon constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    pub frame: Frame,
    pub k: usize,
    pub rate: f64,
    pub constant: f64,
    pub per_epsilon: Vec<EpsilonConstant>,
    pub spread: Option<f64>,
}

/// `||V_eps(tau)||_{H^k}` of the counter-propagating part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VNormRow {
    pub epsilon: f64,
    pub tau: f64,
    pub frame: Frame,
    pub k: usize,
    pub v_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRatio {
    pub epsilon: f64,
    pub ratio: f64,
}

/// Final error divided by `||V_eps(0)||_{H^k}`; `spread = max / min - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauFit {
    pub frame: Frame,
    pub k: usize,
    pub tau: f64,
    pub ratios: Vec<EpsilonRatio>,
    pub spread: f64,
}

/// Below this `||V(0)||` a plateau ratio is meaningless and is not reported.
pub const PLATEAU_MIN_V0: f64 = 1e-6;

struct EpsilonResult {
    errors: Vec<ErrorRow>,
    v_norms: Vec<VNormRow>,
    bounds: Vec<BoundRow>,
    drift: DriftRow,
    run: RunSummary,
}

/// KdV approximations carried along one frame.
struct FrameTrack {
    frame: Frame,
    /// One solution for `U`, or two for `(N, s dTheta)`.
    states: Vec<(KdvSolver, KdvState)>,
    /// Running `int ||d^k Z||^2` and the last integrand, per k.
    cumulative: Vec<(f64, f64)>,
}

fn riemann_pair(h: &HydroFields, frame: Frame) -> (&RealField, &RealField) {
    match frame {
        Frame::Minus => (&h.riemann_u, &h.riemann_v),
        Frame::Plus => (&h.riemann_v, &h.riemann_u),
    }
}

fn run_epsilon(cfg: &StudyConfig, kind: StudyKind, eps: f64) -> Result<EpsilonResult> {
    let fast = cfg.fast_grid.grid()?;
    let slow = cfg.slow_grid.grid()?;
    let kmax = *cfg.k.iter().max().unwrap_or(&0);
    let (n0, w0) = build_preset(&cfg.preset, slow, kmax)?;
    let state = build_initial_data(&n0, &w0, eps, &fast)?;
    let kcfg = KdvConfig::new(cfg.kdv_dtau);

    let mut tracks = Vec::with_capacity(2);
    for frame in Frame::BOTH {
        let sf = extract_slow_frame(&state, eps, frame, &slow)?;
        let starts = match kind {
            StudyKind::Convergence => vec![sf.u],
            StudyKind::Unidirectional => vec![sf.n, sf.dtheta.scaled(frame.theta_sign())],
        };
        let states = starts
            .into_iter()
            .map(|u| Ok((KdvSolver::new(slow, KdvSign::Forward, kcfg)?, KdvState::new(u, 0.0))))
            .collect::<Result<Vec<_>>>()?;
        tracks.push(FrameTrack {
            frame,
            states,
            cumulative: vec![(0.0, 0.0); cfg.k.len()],
        });
    }

    let taus = cfg.taus();
    let times: Vec<f64> = taus.iter().map(|&t| fast_time(eps, t)).collect();
    let mut errors = Vec::new();
    let mut v_norms = Vec::new();
    let mut bounds = Vec::new();
    let sn = n_scale(eps);
    let sd = dtheta_scale(eps);
    let label = format!("{} eps={eps}", kind.label());

    let (run, drift) = drive_gp(&label, eps, state, cfg.gp_dt, &times, |gp, i| {
        let tau = taus[i];
        let h = madelung(gp, VACUUM_FLOOR)?;
        for &k in &cfg.k {
            bounds.push(BoundRow::new(eps, tau, k, line_norms(&h, eps, k)?));
        }
        for track in tracks.iter_mut() {
            let frame = track.frame;
            let target = frame.time_sign() * tau;
            for (solver, st) in track.states.iter_mut() {
                solver.advance(st, target)?;
            }
            let shift = frame.fast_shift(gp.time);
            let (own, other) = riemann_pair(&h, frame);
            let diffs: Vec<RealField> = match kind {
                StudyKind::Convergence => {
                    let approx = slow_to_fast(&track.states[0].1.u, eps, shift, &fast)?;
                    vec![own.scaled(sn).sub(&approx)?]
                }
                StudyKind::Unidirectional => {
                    let an = slow_to_fast(&track.states[0].1.u, eps, shift, &fast)?;
                    let aw = slow_to_fast(&track.states[1].1.u, eps, shift, &fast)?;
                    let s = frame.theta_sign();
                    vec![
                        h.eta.scaled(sn).sub(&an)?,
                        h.dphi.scaled(s * sd).sub(&aw)?,
                    ]
                }
            };
            for (ki, &k) in cfg.k.iter().enumerate() {
                let mut hk = 0.0;
                let mut top = 0.0;
                for d in &diffs {
                    let en = line_energies(d, 1.0, eps, k)?;
                    hk += en.iter().sum::<f64>().sqrt();
                    top += en[k];
                }
                let (acc, last) = &mut track.cumulative[ki];
                if i > 0 {
                    *acc += 0.5 * (taus[i] - taus[i - 1]) * (*last + top);
                }
                *last = top;
                errors.push(ErrorRow {
                    epsilon: eps,
                    tau,
                    frame,
                    k,
                    hk_error: hk,
                    cumulative: *acc,
                });
                if kind == StudyKind::Unidirectional {
                    v_norms.push(VNormRow {
                        epsilon: eps,
                        tau,
                        frame,
                        k,
                        v_norm: line_energies(other, sn, eps, k)?.iter().sum::<f64>().sqrt(),
                    });
                }
            }
        }
        Ok(())
    })?;
    Ok(EpsilonResult {
        errors,
        v_norms,
        bounds,
        drift,
        run,
    })
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Order fits at every `tau > 0` for each frame and `k`; needs at least three epsilons.
pub fn fit_orders(errors: &[ErrorRow], epsilons: &[f64], taus: &[f64], ks: &[usize]) -> Vec<OrderFit> {
    let mut out = Vec::new();
    if epsilons.len() < 3 {
        return out;
    }
    for frame in Frame::BOTH {
        for &k in ks {
            for &tau in taus.iter().filter(|&&t| t > 0.0) {
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                for &eps in epsilons {
                    if let Some(r) = errors.iter().find(|r| {
                        r.frame == frame && r.k == k && same(r.tau, tau) && r.epsilon == eps
                    }) {
                        xs.push(eps);
                        ys.push(r.hk_error);
                    }
                }
                if xs.len() < 3 {
                    continue;
                }
                if let Some(f) = power_law_fit(&xs, &ys) {
                    out.push(OrderFit {
                        frame,
                        k,
                        tau,
                        fitted_order: f.slope,
                        intercept: f.intercept,
                        r_squared: f.r_squared,
                    });
                }
            }
        }
    }
    out
}

/// Joint `C eps^2 exp(K tau)` envelope per frame and `k`.
pub fn fit_envelopes(errors: &[ErrorRow], epsilons: &[f64], ks: &[usize]) -> Vec<EnvelopeFit> {
    let mut out = Vec::new();
    for frame in Frame::BOTH {
        for &k in ks {
            let rows: Vec<&ErrorRow> = errors
                .iter()
                .filter(|r| r.frame == frame && r.k == k && r.tau != 0.0 && r.hk_error > 0.0)
                .collect();
            let xs: Vec<f64> = rows.iter().map(|r| r.tau.abs()).collect();
            let ys: Vec<f64> = rows
                .iter()
                .map(|r| (r.hk_error / (r.epsilon * r.epsilon)).ln())
                .collect();
            let Some(line) = linear_fit(&xs, &ys) else {
                continue;
            };
            let rate = line.slope.max(0.0);
            let per_epsilon: Vec<EpsilonConstant> = epsilons
                .iter()
                .filter_map(|&eps| {
                    rows.iter()
                        .filter(|r| r.epsilon == eps)
                        .map(|r| r.hk_error / (eps * eps * (rate * r.tau.abs()).exp()))
                        .reduce(f64::max)
                        .map(|constant| EpsilonConstant {
                            epsilon: eps,
                            constant,
                        })
                })
                .collect();
            let hi = per_epsilon.iter().map(|c| c.constant).fold(0.0, f64::max);
            let lo = per_epsilon
                .iter()
                .map(|c| c.constant)
                .fold(f64::INFINITY, f64::min);
            out.push(EnvelopeFit {
                frame,
                k,
                rate,
                constant: hi,
                per_epsilon,
                spread: (lo > 0.0 && lo.is_finite()).then(|| hi / lo),
            });
        }
    }
    out
}

/// Plateau ratios at the final `tau`, skipping series whose `||V(0)||` vanishes.
pub fn fit_plateaus(errors: &[ErrorRow], v_norms: &[VNormRow], epsilons: &[f64], ks: &[usize]) -> Vec<PlateauFit> {
    let tau_end = errors.iter().map(|r| r.tau).fold(0.0, f64::max);
    let mut out = Vec::new();
    for frame in Frame::BOTH {
        for &k in ks {
            let mut ratios = Vec::new();
            for &eps in epsilons {
                let v0 = v_norms
                    .iter()
                    .find(|r| r.frame == frame && r.k == k && r.epsilon == eps && r.tau == 0.0);
                let e = errors.iter().find(|r| {
                    r.frame == frame && r.k == k && r.epsilon == eps && same(r.tau, tau_end)
                });
                if let (Some(v0), Some(e)) = (v0, e) {
                    if v0.v_norm > PLATEAU_MIN_V0 {
                        ratios.push(EpsilonRatio {
                            epsilon: eps,
                            ratio: e.hk_error / v0.v_norm,
                        });
                    }
                }
            }
            if ratios.len() < 2 {
                continue;
            }
            let hi = ratios.iter().map(|r| r.ratio).fold(0.0, f64::max);
            let lo = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
            out.push(PlateauFit {
                frame,
                k,
                tau: tau_end,
                ratios,
                spread: hi / lo - 1.0,
            });
        }
    }
    out
}

fn run_study(cfg: &StudyConfig, kind: StudyKind, workers: usize) -> Result<StudyOutcome> {
    cfg.validate()?;
    let info = preset_info(&cfg.preset.name)?;
    if matches!(info.name, "dark-soliton") {
        return Err(Error::Config(format!(
            "preset '{}' has no slow initial data",
            info.name
        )));
    }
    let results = sweep(&cfg.epsilons, workers, |&eps| run_epsilon(cfg, kind, eps))?;
    let mut errors = Vec::new();
    let mut v_norms = Vec::new();
    let mut bound_rows = Vec::new();
    let mut drift = Vec::new();
    let mut runs = Vec::new();
    for r in results {
        errors.extend(r.errors);
        v_norms.extend(r.v_norms);
        bound_rows.extend(r.bounds);
        drift.push(r.drift);
        runs.push(r.run);
    }
    let taus = cfg.taus();
    let fits = fit_orders(&errors, &cfg.epsilons, &taus, &cfg.k);
    let envelopes = fit_envelopes(&errors, &cfg.epsilons, &cfg.k);
    let plateaus = fit_plateaus(&errors, &v_norms, &cfg.epsilons, &cfg.k);
    let bounds: BoundReport = summarize_bounds(bound_rows);

    let mut checks = Vec::new();
    let tau_end = cfg.tau_final;
    for f in fits.iter().filter(|f| same(f.tau, tau_end)) {
        // With a non-negligible counter-propagating part the error plateaus instead.
        if plateaus.iter().any(|p| p.frame == f.frame && p.k == f.k) {
            continue;
        }
        checks.push(Check::within(
            format!("fitted_order {} k={}", f.frame.label(), f.k),
            f.fitted_order,
            ORDER_RANGE,
        ));
    }
    match kind {
        StudyKind::Convergence => {
            for e in &envelopes {
                checks.push(Check::at_most(
                    format!("envelope_spread {} k={}", e.frame.label(), e.k),
                    e.spread.unwrap_or(f64::MAX),
                    ENVELOPE_SPREAD_MAX,
                ));
            }
            if bounds.slopes.len() >= 2 {
                checks.push(Check::at_most(
                    "m_norm_slope_spread",
                    bounds.slope_spread_n,
                    SLOPE_SPREAD_MAX,
                ));
            }
        }
        StudyKind::Unidirectional => {
            for p in &plateaus {
                checks.push(Check::at_most(
                    format!("plateau_spread {} k={}", p.frame.label(), p.k),
                    p.spread,
                    PLATEAU_SPREAD_MAX,
                ));
            }
        }
    }
    let report = StudyReport::new(kind.label(), cfg.clone(), info.hypothesis.to_string())
        .with_errors(errors, fits, envelopes)
        .with_unidirectional(v_norms, plateaus)
        .with_bounds(bounds)
        .with_drift(drift)
        .with_checks(checks);
    Ok(StudyOutcome { report, runs })
}

/// Sweep over `cfg.epsilons` comparing `U_eps^pm` with the KdV solutions.
pub fn kdv_convergence_study(cfg: &StudyConfig, workers: usize) -> Result<StudyOutcome> {
    run_study(cfg, StudyKind::Convergence, workers)
}

/// Sweep comparing `N_eps^pm`, `dTheta_eps^pm` with the one-way KdV solutions.
pub fn unidirectional_study(cfg: &StudyConfig, workers: usize) -> Result<StudyOutcome> {
    run_study(cfg, StudyKind::Unidirectional, workers)
}

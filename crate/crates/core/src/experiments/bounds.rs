//! Time series of the a-priori quantities along a GP run.

use serde::{Deserialize, Serialize};

use crate::bridge::LineNorms;
use crate::fit::linear_fit;

/// Fitted growth rates above this (per unit `tau`) flag a series.
pub const BOUND_RATE_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub epsilon: f64,
    pub tau: f64,
    pub k: usize,
    pub hk_n: f64,
    pub eps_dk1_n: f64,
    pub hk_dtheta: f64,
    pub m_norm_n: f64,
    pub m_norm_dtheta: f64,
    pub gamma: f64,
}

impl BoundRow {
    pub fn new(epsilon: f64, tau: f64, k: usize, n: LineNorms) -> Self {
        Self {
            epsilon,
            tau,
            k,
            hk_n: n.hk_n,
            eps_dk1_n: n.eps_dk1_n,
            hk_dtheta: n.hk_dtheta,
            m_norm_n: n.m_norm_n,
            m_norm_dtheta: n.m_norm_dtheta,
            gamma: n.gamma,
        }
    }

    /// `||N||_{H^k} + eps ||d^{k+1} N|| + ||dTheta||_{H^k}`.
    pub fn sobolev_total(&self) -> f64 {
        self.hk_n + self.eps_dk1_n + self.hk_dtheta
    }
}

/// Growth of one `(eps, k)` series relative to its first sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSeries {
    pub epsilon: f64,
    pub k: usize,
    pub max_ratio: f64,
    pub max_gamma_ratio: f64,
    /// Slope of `log(ratio)` against `|tau|`, clipped at zero.
    pub rate: f64,
    pub flagged: bool,
}

/// Smallest `S >= 0` with `m(tau) <= m(0) + S |tau|` for one epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub epsilon: f64,
    pub m0_n: f64,
    pub slope_n: f64,
    pub m0_dtheta: f64,
    pub slope_dtheta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    pub series: Vec<BoundSeries>,
    pub slopes: Vec<SlopeRow>,
    /// Largest per-epsilon slope: one constant valid for the whole sweep.
    pub common_slope_n: f64,
    pub common_slope_dtheta: f64,
    /// `(max - min) / max` of the per-epsilon slopes of `m(N)`.
    pub slope_spread_n: f64,
}

fn rate_of(taus: &[f64], ratios: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .zip(ratios)
        .filter(|(_, r)| **r > 0.0)
        .map(|(t, r)| (t.abs(), r.ln()))
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    linear_fit(&x, &y).map_or(0.0, |f| f.slope.max(0.0))
}

fn slope(rows: &[&BoundRow], get: impl Fn(&BoundRow) -> f64) -> (f64, f64) {
    let Some(first) = rows.first() else {
        return (0.0, 0.0);
    };
    let m0 = get(first);
    let s = rows
        .iter()
        .filter(|r| r.tau != first.tau)
        .map(|r| (get(r) - m0) / (r.tau - first.tau).abs())
        .fold(0.0, f64::max);
    (m0, s)
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(0.0, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    if hi > 0.0 {
        (hi - lo) / hi
    } else {
        0.0
    }
}

/// Summarises rows recorded in time order per epsilon.
pub fn summarize_bounds(rows: Vec<BoundRow>) -> BoundReport {
    let mut epsilons: Vec<f64> = Vec::new();
    let mut ks: Vec<usize> = Vec::new();
    for r in &rows {
        if !epsilons.contains(&r.epsilon) {
            epsilons.push(r.epsilon);
        }
        if !ks.contains(&r.k) {
            ks.push(r.k);
        }
    }
    let mut series = Vec::new();
    let mut slopes = Vec::new();
    for &eps in &epsilons {
        for &k in &ks {
            let s: Vec<&BoundRow> = rows.iter().filter(|r| r.epsilon == eps && r.k == k).collect();
            let Some(first) = s.first() else { continue };
            let base = first.sobolev_total();
            let taus: Vec<f64> = s.iter().map(|r| r.tau).collect();
            let ratios: Vec<f64> = s.iter().map(|r| r.sobolev_total() / base).collect();
            let gammas: Vec<f64> = s.iter().map(|r| r.gamma / first.gamma).collect();
            let rate = rate_of(&taus, &ratios).max(rate_of(&taus, &gammas));
            let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
            let max_gamma_ratio = gammas.iter().copied().fold(0.0, f64::max);
            let finite = ratios.iter().chain(&gammas).all(|v| v.is_finite());
            series.push(BoundSeries {
                epsilon: eps,
                k,
                max_ratio,
                max_gamma_ratio,
                rate,
                flagged: !finite || rate > BOUND_RATE_LIMIT,
            });
        }
        if let Some(&k) = ks.first() {
            let s: Vec<&BoundRow> = rows.iter().filter(|r| r.epsilon == eps && r.k == k).collect();
            let (m0_n, slope_n) = slope(&s, |r| r.m_norm_n);
            let (m0_dtheta, slope_dtheta) = slope(&s, |r| r.m_norm_dtheta);
            slopes.push(SlopeRow {
                epsilon: eps,
                m0_n,
                slope_n,
                m0_dtheta,
                slope_dtheta,
            });
        }
    }
    let sn: Vec<f64> = slopes.iter().map(|s| s.slope_n).collect();
    let sd: Vec<f64> = slopes.iter().map(|s| s.slope_dtheta).collect();
    BoundReport {
        common_slope_n: sn.iter().copied().fold(0.0, f64::max),
        common_slope_dtheta: sd.iter().copied().fold(0.0, f64::max),
        slope_spread_n: spread(&sn),
        rows,
        series,
        slopes,
    }
}

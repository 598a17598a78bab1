use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::fit::envelope_constant;
use crate::grid::SpectralGrid;
use crate::spectral::{deriv, deriv_stack, sobolev_norm};

use super::solver::{KdvConfig, KdvSign, KdvSolver, KdvState};

/// `I1 = int u`, `I2 = int u^2`, `I3 = int (u_x^2 / 2 - u^3 / 6)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdvInvariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

pub fn kdv_invariants(u: &RealField) -> Result<KdvInvariants> {
    let ux = deriv(u, 1)?;
    let dx = u.grid().spacing();
    let (mut i1, mut i2, mut i3) = (0.0, 0.0, 0.0);
    for (&v, &d) in u.values().iter().zip(ux.values()) {
        i1 += v;
        i2 += v * v;
        i3 += 0.5 * d * d - v * v * v / 6.0;
    }
    Ok(KdvInvariants {
        i1: i1 * dx,
        i2: i2 * dx,
        i3: i3 * dx,
    })
}

/// `3c sech^2(sqrt(c) (x - center) / 2)`, moving right with speed `c` under the forward flow.
pub fn kdv_soliton(c: f64, grid: SpectralGrid, center: f64) -> Result<RealField> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Precondition(format!("soliton speed must be positive, got {c}")));
    }
    let profile = |x: f64| {
        let s = 1.0 / (0.5 * c.sqrt() * (x - center)).cosh();
        3.0 * c * s * s
    };
    let edge = profile(grid.origin()).max(profile(grid.end()));
    if edge > SOLITON_EDGE_LIMIT {
        return Err(Error::Precondition(format!(
            "soliton of speed {c} at {center} is {edge:e} at the box edge"
        )));
    }
    RealField::from_fn(grid, profile)
}

/// Largest soliton value tolerated at either end of the box.
pub const SOLITON_EDGE_LIMIT: f64 = 1e-10;

/// Max-norm of `-c u' + u''' + u u'` for the soliton profile.
pub fn kdv_soliton_residual(c: f64, grid: SpectralGrid) -> Result<f64> {
    let u = kdv_soliton(c, grid, grid.center())?;
    let d = deriv_stack(&u, 3)?;
    Ok((0..u.len())
        .map(|i| {
            let (v, v1, v3) = (u.values()[i], d[1].values()[i], d[3].values()[i]);
            (-c * v1 + v3 + v * v1).abs()
        })
        .fold(0.0, f64::max))
}

pub const KDV_LOG_HEADER: &str = "tau,I1,I2,I3,max_abs_u";

pub fn kdv_log_row(state: &KdvState) -> Result<String> {
    let inv = kdv_invariants(&state.u)?;
    Ok(format!(
        "{},{},{},{},{}",
        state.tau,
        inv.i1,
        inv.i2,
        inv.i3,
        state.u.max_abs()
    ))
}

/// Growth of the distance between two KdV solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub taus: Vec<f64>,
    pub gaps: Vec<f64>,
    /// `gap(tau) / gap(0)`.
    pub ratios: Vec<f64>,
    /// Smallest `K` with `ratio <= K exp(K |tau|)`.
    pub envelope_constant: f64,
}

/// Tracks `||F - G||_{H^k}` for two solutions started at `f0`, `g0`.
pub fn stability_gap(
    f0: &RealField,
    g0: &RealField,
    sign: KdvSign,
    cfg: KdvConfig,
    tau_final: f64,
    samples: usize,
    k: usize,
) -> Result<GapReport> {
    if f0.grid() != g0.grid() {
        return Err(Error::InvalidGrid("initial data on different grids".into()));
    }
    if samples < 2 {
        return Err(Error::Precondition("need at least two samples".into()));
    }
    let gap0 = sobolev_norm(&f0.sub(g0)?, k)?;
    let grid = *f0.grid();
    let mut sf = KdvSolver::new(grid, sign, cfg)?;
    let mut sg = KdvSolver::new(grid, sign, cfg)?;
    let mut f = KdvState::new(f0.clone(), 0.0);
    let mut g = KdvState::new(g0.clone(), 0.0);
    let mut taus = Vec::with_capacity(samples);
    let mut gaps = Vec::with_capacity(samples);
    for i in 0..samples {
        let tau = tau_final * i as f64 / (samples - 1) as f64;
        sf.advance(&mut f, tau)?;
        sg.advance(&mut g, tau)?;
        taus.push(tau);
        gaps.push(sobolev_norm(&f.u.sub(&g.u)?, k)?);
    }
    // Coinciding data give a zero gap; the ratio is then reported as zero too.
    let ratios: Vec<f64> = gaps
        .iter()
        .map(|g| if gap0 > 0.0 { g / gap0 } else { 0.0 })
        .collect();
    let envelope_constant = envelope_constant(&taus, &ratios);
    Ok(GapReport {
        taus,
        gaps,
        ratios,
        envelope_constant,
    })
}

/// Residual of `H_tau + H''' + F H' + H G' = 0` for `H = F - G`, from three equally
/// spaced states of each solution (forward flow, centred difference in time).
pub fn gap_equation_residual(f: [&KdvState; 3], g: [&KdvState; 3]) -> Result<f64> {
    let dtau = f[2].tau - f[0].tau;
    if !(dtau > 0.0) {
        return Err(Error::Precondition("states must be ordered in time".into()));
    }
    let h_prev = f[0].u.sub(&g[0].u)?;
    let h_next = f[2].u.sub(&g[2].u)?;
    let h = f[1].u.sub(&g[1].u)?;
    let hd = deriv_stack(&h, 3)?;
    let gd = deriv(&g[1].u, 1)?;
    let r: Vec<f64> = (0..h.len())
        .map(|i| {
            (h_next.values()[i] - h_prev.values()[i]) / dtau
                + hd[3].values()[i]
                + f[1].u.values()[i] * hd[1].values()[i]
                + h.values()[i] * gd.values()[i]
        })
        .collect();
    Ok(crate::spectral::l2_norm(&RealField::new(*h.grid(), r)?))
}

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::spectral::{deriv, deriv_complex, l2_norm, Primitive};

use super::solver::GpState;

/// Default lower bound on `|psi|` for the hydrodynamic change of variables.
pub const VACUUM_FLOOR: f64 = 0.25;

/// Madelung and Riemann variables of a non-vanishing wavefunction.
#[derive(Debug, Clone)]
pub struct HydroFields {
    pub eta: RealField,
    pub rho: RealField,
    pub phi: RealField,
    pub dphi: RealField,
    pub riemann_u: RealField,
    pub riemann_v: RealField,
}

/// `psi = rho exp(i phi)`, `eta = 1 - rho^2`, `u, v = (eta +- sqrt2 phi') / 2`.
pub fn madelung(state: &GpState, floor: f64) -> Result<HydroFields> {
    let (min_abs, location) = state.min_abs();
    if min_abs < floor {
        return Err(Error::Vacuum {
            min_abs,
            location,
            floor,
        });
    }
    let psi = &state.psi;
    let g = *psi.grid();
    let dpsi = deriv_complex(psi, 1)?;
    let eta = RealField::new(g, psi.values().iter().map(|z| 1.0 - z.norm_sqr()).collect())?;
    let rho = psi.abs();
    let dphi = RealField::new(
        g,
        psi.values()
            .iter()
            .zip(dpsi.values())
            .map(|(z, dz)| (z.conj() * dz).im / z.norm_sqr())
            .collect(),
    )?;
    let p = Primitive::new(&dphi)?;
    let phi0 = psi.values()[0].arg() - p.eval(g.origin());
    let phi = RealField::new(
        g,
        p.eval_many(&g.points()).into_iter().map(|v| v + phi0).collect(),
    )?;
    let riemann_u = eta.zip_with(&dphi, |e, d| 0.5 * (e + SQRT_2 * d))?;
    let riemann_v = eta.zip_with(&dphi, |e, d| 0.5 * (e - SQRT_2 * d))?;
    Ok(HydroFields {
        eta,
        rho,
        phi,
        dphi,
        riemann_u,
        riemann_v,
    })
}

/// `2 d/dx <i psi, psi_x> = 2 d/dx Im(conj(psi) psi_x)`.
fn mass_flux_divergence(state: &GpState) -> Result<RealField> {
    let psi = &state.psi;
    let d = deriv_complex(psi, 1)?;
    let j = RealField::new(
        *psi.grid(),
        psi.values()
            .iter()
            .zip(d.values())
            .map(|(z, dz)| 2.0 * (z.conj() * dz).im)
            .collect(),
    )?;
    deriv(&j, 1)
}

/// L2 norm of `d_t eta - 2 d_x <i psi, psi_x>` from two nearby states.
///
/// The time derivative is the difference quotient; the flux is averaged over both ends.
pub fn mass_flux_residual(before: &GpState, after: &GpState) -> Result<f64> {
    if before.grid() != after.grid() {
        return Err(Error::InvalidGrid("states live on different grids".into()));
    }
    let dt = after.time - before.time;
    if !(dt > 0.0) {
        return Err(Error::Precondition("states must be strictly ordered in time".into()));
    }
    let fa = mass_flux_divergence(before)?;
    let fb = mass_flux_divergence(after)?;
    let g = *before.grid();
    let r: Vec<f64> = (0..g.n_points())
        .map(|i| {
            let ea = 1.0 - before.psi.values()[i].norm_sqr();
            let eb = 1.0 - after.psi.values()[i].norm_sqr();
            (eb - ea) / dt - 0.5 * (fa.values()[i] + fb.values()[i])
        })
        .collect();
    Ok(l2_norm(&RealField::new(g, r)?))
}

//! Full-line norms of slow-variable fields, evaluated on the fast grid.
//!
//! A slow field `F(X) = a f(X / eps + s)` has `d_X^j F = a eps^-j d_x^j f` and
//! `dX = eps dx`, so its `H^k(R)` norm is a weighted sum of fast derivative
//! energies and does not depend on the frame shift `s`.

use std::f64::consts::SQRT_2;

use crate::error::Result;
use crate::field::RealField;
use crate::gp::HydroFields;
use crate::spectral::{deriv, deriv_stack, derivative_energies, m_norm};

/// Squared `L2(dX)` norms of `d_X^j F`, `j = 0..=k`, for `F = scale f(X / eps + s)`.
pub fn line_energies(f: &RealField, scale: f64, eps: f64, k: usize) -> Result<Vec<f64>> {
    Ok(derivative_energies(f, k)?
        .into_iter()
        .enumerate()
        .map(|(j, e)| scale * scale * eps.powi(1 - 2 * j as i32) * e)
        .collect())
}

pub fn line_sobolev_norm(f: &RealField, scale: f64, eps: f64, k: usize) -> Result<f64> {
    Ok(line_energies(f, scale, eps, k)?.iter().sum::<f64>().sqrt())
}

/// `6 / eps^2`, the amplitude of `N` relative to `eta`.
pub fn n_scale(eps: f64) -> f64 {
    6.0 / (eps * eps)
}

/// `6 sqrt2 / eps^2`, the amplitude of `dTheta` relative to `phi_x`.
pub fn dtheta_scale(eps: f64) -> f64 {
    6.0 * SQRT_2 / (eps * eps)
}

/// Size of a GP state measured in slow variables over the whole box.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LineNorms {
    pub hk_n: f64,
    /// `eps ||d^{k+1} N||`.
    pub eps_dk1_n: f64,
    pub hk_dtheta: f64,
    pub m_norm_n: f64,
    pub m_norm_dtheta: f64,
    /// `||d^k N||^2 + ||M^{1/2} d^k Y||^2` with `Y = dTheta + i eps dN / (sqrt2 M)`.
    pub gamma: f64,
}

pub fn line_norms(h: &HydroFields, eps: f64, k: usize) -> Result<LineNorms> {
    let sn = n_scale(eps);
    let sd = dtheta_scale(eps);
    let en = line_energies(&h.eta, sn, eps, k + 1)?;
    let hk_n = en[..=k].iter().sum::<f64>().sqrt();
    let eps_dk1_n = eps * en[k + 1].sqrt();
    let hk_dtheta = line_sobolev_norm(&h.dphi, sd, eps, k)?;
    let m_norm_n = sn * eps * m_norm(&h.eta);
    let m_norm_dtheta = sd * eps * m_norm(&h.dphi);

    let deta = deriv(&h.eta, 1)?;
    let q = deta.zip_with(&h.eta, |d, e| d / (1.0 - e))?;
    let dk_phi = deriv_stack(&h.dphi, k)?.pop().expect("stack");
    let dk_q = deriv_stack(&q, k)?.pop().expect("stack");
    let dx = h.eta.grid().spacing();
    let a = sd * eps.powi(-(k as i32));
    let b = sn * eps.powi(-(k as i32 + 1));
    let y2: f64 = (0..h.eta.len())
        .map(|i| {
            let m = 1.0 - h.eta.values()[i];
            let p = a * dk_phi.values()[i];
            let r = b * dk_q.values()[i];
            m * (p * p + 0.5 * eps * eps * r * r)
        })
        .sum::<f64>()
        * dx
        * eps;
    Ok(LineNorms {
        hk_n,
        eps_dk1_n,
        hk_dtheta,
        m_norm_n,
        m_norm_dtheta,
        gamma: en[k] + y2,
    })
}

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::SpectralGrid;
use crate::spectral::deriv_stack_complex;

use super::solver::GpState;

fn check_speed(c: f64) -> Result<()> {
    if !(c.is_finite() && c.abs() < SQRT_2) {
        return Err(Error::Precondition(format!(
            "dark soliton speed must satisfy |c| < sqrt(2), got {c}"
        )));
    }
    Ok(())
}

/// `sqrt((2 - c^2) / 2) tanh(sqrt(2 - c^2) x / 2) + i c / sqrt(2)`.
pub fn dark_soliton_profile(c: f64, x: f64) -> Complex64 {
    let a = ((2.0 - c * c) / 2.0).sqrt();
    let b = (2.0 - c * c).sqrt() / 2.0;
    Complex64::new(a * (b * x).tanh(), c / SQRT_2)
}

/// Phase jump between the far-left and far-right states of the soliton.
pub fn dark_soliton_twist(c: f64) -> f64 {
    let a = ((2.0 - c * c) / 2.0).sqrt();
    let right = Complex64::new(a, c / SQRT_2);
    let left = Complex64::new(-a, c / SQRT_2);
    (right / left).arg()
}

/// Travelling dark soliton of speed `c`, centred at `center + c t`.
pub fn dark_soliton(c: f64, grid: SpectralGrid, center: f64, time: f64) -> Result<GpState> {
    check_speed(c)?;
    let values = grid
        .points()
        .into_iter()
        .map(|x| dark_soliton_profile(c, x - center - c * time))
        .collect();
    let psi = ComplexField::with_twist(grid, values, dark_soliton_twist(c))?;
    Ok(GpState::new(psi, time))
}

/// Energy `(2 - c^2)^{3/2} / 3` of the dark soliton.
pub fn dark_soliton_energy(c: f64) -> f64 {
    (2.0 - c * c).powf(1.5) / 3.0
}

/// Max-norm of `i psi_t + psi_xx - psi (|psi|^2 - 1)` for the analytic soliton, with `psi_t = -c psi_x`.
pub fn dark_soliton_residual(c: f64, grid: SpectralGrid) -> Result<f64> {
    let s = dark_soliton(c, grid, 0.0, 0.0)?;
    let d = deriv_stack_complex(&s.psi, 2)?;
    let i = Complex64::new(0.0, 1.0);
    Ok(s.psi
        .values()
        .iter()
        .zip(d[1].values())
        .zip(d[2].values())
        .map(|((z, z1), z2)| (i * (-c) * z1 + z2 - z * (z.norm_sqr() - 1.0)).norm())
        .fold(0.0, f64::max))
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::spectral::{antiderivative, deriv_stack, deriv_stack_complex};

use super::solver::GpState;

fn eta(psi: &ComplexField) -> Result<RealField> {
    RealField::new(
        *psi.grid(),
        psi.values().iter().map(|z| 1.0 - z.norm_sqr()).collect(),
    )
}

fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Ginzburg-Landau energy `int |psi'|^2 / 2 + (1 - |psi|^2)^2 / 4`.
pub fn energy(psi: &ComplexField) -> Result<f64> {
    let d = deriv_stack_complex(psi, 1)?;
    let dx = psi.grid().spacing();
    Ok(psi
        .values()
        .iter()
        .zip(d[1].values())
        .map(|(z, dz)| {
            let e = 1.0 - z.norm_sqr();
            0.5 * dz.norm_sqr() + 0.25 * e * e
        })
        .sum::<f64>()
        * dx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HigherInvariants {
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
}

/// The three next conserved functionals of the GP hierarchy.
pub fn higher_invariants(psi: &ComplexField) -> Result<HigherInvariants> {
    let p = deriv_stack_complex(psi, 4)?;
    let h = deriv_stack(&eta(psi)?, 3)?;
    let dx = psi.grid().spacing();
    let (mut e2, mut e3, mut e4) = (0.0, 0.0, 0.0);
    for i in 0..psi.len() {
        let (p1, p2, p3, p4) = (
            p[1].values()[i],
            p[2].values()[i],
            p[3].values()[i],
            p[4].values()[i],
        );
        let (n, n1, n2, n3) = (
            h[0].values()[i],
            h[1].values()[i],
            h[2].values()[i],
            h[3].values()[i],
        );
        let a1 = p1.norm_sqr();
        let a2 = p2.norm_sqr();
        let a3 = p3.norm_sqr();
        let c13 = dot(p1, p3);

        e2 += 0.5 * a2 - 1.5 * n * a1 + 0.25 * n1 * n1 - 0.25 * n.powi(3);

        e3 += 0.5 * a3 + 0.25 * n2 * n2 + 1.25 * a1 * a1 + 2.5 * n2 * a1 - 2.5 * n * a2
            - 1.25 * n * n1 * n1
            + 3.75 * n * n * a1
            + 0.3125 * n.powi(4);

        e4 += 0.5 * p4.norm_sqr() + 0.25 * n3 * n3 - 1.75 * n * n2 * n2 - 3.5 * n * a3
            + 4.375 * n * n * n1 * n1
            + 8.75 * n * n * a2
            - 8.75 * n1 * n1 * a1
            - 3.5 * a1 * a2
            - 7.0 * n2 * c13
            - 7.0 * a1 * c13
            - 17.5 * n * n2 * a1
            - 8.75 * n.powi(3) * a1
            - 8.75 * n * a1 * a1
            - 0.4375 * n.powi(5);
    }
    Ok(HigherInvariants {
        e2: e2 * dx,
        e3: e3 * dx,
        e4: e4 * dx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub m_plus: f64,
    pub m_minus: f64,
    pub present: bool,
}

/// Share of each half-box used as the "far field" when bounding the mass.
pub const FAR_FIELD_FRACTION: f64 = 0.1;

/// Boxed surrogate of the generalised mass `int (1 - |psi|^2)`.
///
/// The cumulative integral from the base point (0 if inside the box, else the
/// centre) is sampled over the outer tenth on each side; the upper and lower
/// values bracket the mass and coincide when the tails have settled.
pub fn generalized_mass(psi: &ComplexField, tol: f64) -> Result<MassReport> {
    let g = *psi.grid();
    let base = if g.contains(0.0) { 0.0 } else { g.center() };
    let c = antiderivative(&eta(psi)?, base)?;
    let right_from = g.end() - FAR_FIELD_FRACTION * g.length();
    let left_to = g.origin() + FAR_FIELD_FRACTION * g.length();
    let (mut r_hi, mut r_lo, mut l_hi, mut l_lo) = (
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
    );
    for (j, &v) in c.values().iter().enumerate() {
        let x = g.x(j);
        if x >= right_from {
            r_hi = r_hi.max(v);
            r_lo = r_lo.min(v);
        }
        if x <= left_to {
            l_hi = l_hi.max(-v);
            l_lo = l_lo.min(-v);
        }
    }
    if !(r_hi.is_finite() && l_hi.is_finite()) {
        return Err(Error::InvalidGrid("grid too coarse for far-field sampling".into()));
    }
    let m_plus = 0.5 * (r_hi + l_hi);
    let m_minus = 0.5 * (r_lo + l_lo);
    Ok(MassReport {
        m_plus,
        m_minus,
        present: (m_plus - m_minus).abs() <= tol,
    })
}

/// One row of the GP invariant log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub t: f64,
    pub e: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub m_plus: f64,
    pub m_minus: f64,
    pub min_abs_psi: f64,
}

pub const MASS_TOLERANCE: f64 = 1e-8;

pub fn invariant_record(state: &GpState) -> Result<InvariantRecord> {
    let hi = higher_invariants(&state.psi)?;
    let m = generalized_mass(&state.psi, MASS_TOLERANCE)?;
    Ok(InvariantRecord {
        t: state.time,
        e: energy(&state.psi)?,
        e2: hi.e2,
        e3: hi.e3,
        e4: hi.e4,
        m_plus: m.m_plus,
        m_minus: m.m_minus,
        min_abs_psi: state.min_abs().0,
    })
}

pub const INVARIANT_LOG_HEADER: &str = "t,E,E2,E3,E4,m_plus,m_minus,min_abs_psi";

pub fn invariant_log_csv(records: &[InvariantRecord]) -> String {
    let mut s = String::from(INVARIANT_LOG_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.t, r.e, r.e2, r.e3, r.e4, r.m_plus, r.m_minus, r.min_abs_psi
        ));
    }
    s
}

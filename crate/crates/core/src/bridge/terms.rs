use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::spectral::l2_norm;

use super::frame::SlowFrame;

/// Right-hand sides of the slow system and their antiderivative-level versions.
#[derive(Debug, Clone)]
pub struct InteractionTerms {
    pub big_f: RealField,
    pub big_g: RealField,
    pub big_r: RealField,
    pub f: RealField,
    pub g: RealField,
    pub r: RealField,
    /// `int_{-R}^X V`.
    pub upsilon: RealField,
    /// Node used as the base point `-R`.
    pub base_index: usize,
}

/// Evaluates `F, G, R`, their derivatives `f, g, r`, and `Upsilon`.
///
/// `base` is the slow coordinate of `-R`, snapped to the nearest node; `None`
/// uses the left edge of the window.
pub fn interaction_terms(sf: &SlowFrame, base: Option<f64>) -> Result<InteractionTerms> {
    let grid = sf.grid;
    let base_index = match base {
        None => 0,
        Some(b) if grid.contains(b) => grid.nearest_index(b),
        Some(b) => {
            return Err(Error::Precondition(format!(
                "base point {b} outside the slow window"
            )))
        }
    };
    let e2 = sf.epsilon * sf.epsilon;
    let uj = sf.u_jets()?;
    let vj = sf.v_jets()?;
    let nj = &sf.n_jets;
    let n = grid.n_points();
    let mut out = [(); 6].map(|_| vec![0.0; n]);
    for i in 0..n {
        let (u, u1) = (uj[0].values()[i], uj[1].values()[i]);
        let (v, v1, v2, v3) = (
            vj[0].values()[i],
            vj[1].values()[i],
            vj[2].values()[i],
            vj[3].values()[i],
        );
        let (nn, n1, n2, n3) = (
            nj[0].values()[i],
            nj[1].values()[i],
            nj[2].values()[i],
            nj[3].values()[i],
        );
        let m = 1.0 - e2 * nn / 6.0;
        if !(m > 1e-8) {
            return Err(Error::Denominator { value: m, index: i });
        }
        out[0][i] = v * v / 6.0 - v2 + u * v / 3.0;
        out[1][i] = n2 + 0.5 * v * v - u * u / 6.0 - u * v / 3.0;
        out[2][i] = nn * n2 / (6.0 * m) + n1 * n1 / (12.0 * m * m);
        out[3][i] = v * v1 / 3.0 - v3 + (u1 * v + u * v1) / 3.0;
        out[4][i] = n3 + v * v1 - u * u1 / 3.0 - (u1 * v + u * v1) / 3.0;
        out[5][i] = nn * n3 / (6.0 * m)
            + n1 * n2 / (3.0 * m * m)
            + e2 * n1.powi(3) / (36.0 * m.powi(3));
    }
    let p0 = sf.v_primitive.values()[base_index];
    let upsilon = sf.v_primitive.map(|p| p - p0)?;
    let [big_f, big_g, big_r, f, g, r] = out.map(|v| RealField::new(grid, v));
    Ok(InteractionTerms {
        big_f: big_f?,
        big_g: big_g?,
        big_r: big_r?,
        f: f?,
        g: g?,
        r: r?,
        upsilon,
        base_index,
    })
}

/// L2 norms (over the slow window) of the three slow-system residuals at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub tau: f64,
    /// KdV-type equation for `U`.
    pub kdv: f64,
    /// Transport equation for `V`.
    pub transport: f64,
    /// Transport equation for `Upsilon`.
    pub upsilon: f64,
    /// `||(8 / eps^2) V'||`, the size of the dominant transport term.
    pub transport_scale: f64,
}

/// Residuals of the slow system at the interior samples of a uniformly spaced series.
///
/// Time derivatives are centred differences; spatial derivatives come from the jets.
pub fn slow_system_residuals(series: &[(SlowFrame, InteractionTerms)]) -> Result<Vec<ResidualNorms>> {
    if series.len() < 3 {
        return Err(Error::Precondition("need at least three samples".into()));
    }
    let first = &series[0].0;
    let h = series[1].0.tau - first.tau;
    if !(h > 0.0) {
        return Err(Error::Precondition("samples must increase in tau".into()));
    }
    for (i, (sf, _)) in series.iter().enumerate() {
        if sf.grid != first.grid || sf.frame != first.frame || sf.epsilon != first.epsilon {
            return Err(Error::Precondition("samples must share grid, frame and epsilon".into()));
        }
        let expect = first.tau + i as f64 * h;
        if (sf.tau - expect).abs() > 1e-6 * h {
            return Err(Error::Precondition("tau samples must be uniformly spaced".into()));
        }
    }
    let eps = first.epsilon;
    let e2 = eps * eps;
    let c = 8.0 / e2;
    let sigma = first.frame.time_sign();
    let grid = first.grid;
    let mut out = Vec::with_capacity(series.len() - 2);
    for w in series.windows(3) {
        let (prev, mid, next) = (&w[0], &w[1], &w[2]);
        let uj = mid.0.u_jets()?;
        let vj = mid.0.v_jets()?;
        let t = &mid.1;
        let b = t.base_index;
        let (gb, rb, vb) = (
            t.big_g.values()[b],
            t.big_r.values()[b],
            mid.0.v.values()[b],
        );
        let n = grid.n_points();
        let (mut r1, mut r2, mut r3, mut sc) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            let dt_u = (next.0.u.values()[i] - prev.0.u.values()[i]) / (2.0 * h);
            let dt_v = (next.0.v.values()[i] - prev.0.v.values()[i]) / (2.0 * h);
            let dt_y = (next.1.upsilon.values()[i] - prev.1.upsilon.values()[i]) / (2.0 * h);
            let (u, u1, u3) = (uj[0].values()[i], uj[1].values()[i], uj[3].values()[i]);
            let (v, v1) = (vj[0].values()[i], vj[1].values()[i]);
            r1[i] = sigma * dt_u + u3 + u * u1 - t.f.values()[i] + e2 * t.r.values()[i];
            r2[i] = sigma * dt_v + c * v1 - t.g.values()[i] - e2 * t.r.values()[i];
            r3[i] = sigma * dt_y + c * v
                - (t.big_g.values()[i] + e2 * t.big_r.values()[i] - gb - e2 * rb + c * vb);
            sc[i] = c * v1;
        }
        let norm = |v: Vec<f64>| RealField::new(grid, v).map(|f| l2_norm(&f));
        out.push(ResidualNorms {
            tau: mid.0.tau,
            kdv: norm(r1)?,
            transport: norm(r2)?,
            upsilon: norm(r3)?,
            transport_scale: norm(sc)?,
        });
    }
    Ok(out)
}

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::gp::{madelung, GpState, VACUUM_FLOOR};
use crate::grid::SpectralGrid;
use crate::spectral::{deriv, BandLimited, Primitive};

/// Highest derivative order carried by a [`SlowFrame`].
pub const JET_ORDER: usize = 5;

/// The two slow frames travelling with the sound speed.
///
/// `Minus` follows the left-going wave (`x^- = eps (x + sqrt2 t)`), `Plus` the right-going one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Minus,
    Plus,
}

impl Frame {
    pub const BOTH: [Frame; 2] = [Frame::Minus, Frame::Plus];

    /// Fast position of slow point `X` at fast time `t` is `X / eps + fast_shift(t)`.
    pub fn fast_shift(self, t: f64) -> f64 {
        match self {
            Frame::Minus => -SQRT_2 * t,
            Frame::Plus => SQRT_2 * t,
        }
    }

    /// Sign in front of `d_tau` in the slow equations of this frame.
    pub fn time_sign(self) -> f64 {
        match self {
            Frame::Minus => 1.0,
            Frame::Plus => -1.0,
        }
    }

    /// `U = (N + s dTheta) / 2`, `V = (N - s dTheta) / 2`.
    pub fn theta_sign(self) -> f64 {
        match self {
            Frame::Minus => 1.0,
            Frame::Plus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Frame::Minus => "minus",
            Frame::Plus => "plus",
        }
    }
}

/// `tau = eps^3 t / (2 sqrt2)`.
pub fn slow_time(eps: f64, t: f64) -> f64 {
    eps.powi(3) * t / (2.0 * SQRT_2)
}

pub fn fast_time(eps: f64, tau: f64) -> f64 {
    2.0 * SQRT_2 * tau / eps.powi(3)
}

/// Fields of a GP state pulled back to one slow frame.
///
/// Jets hold `d^j N` and `d^j dTheta` for `j = 0..=JET_ORDER`, obtained by
/// differentiating on the fast grid and evaluating at the slow nodes, so they
/// stay accurate when a wave straddles the window edge.
#[derive(Debug, Clone)]
pub struct SlowFrame {
    pub epsilon: f64,
    pub frame: Frame,
    pub tau: f64,
    pub time: f64,
    pub grid: SpectralGrid,
    pub n: RealField,
    pub theta: RealField,
    pub dtheta: RealField,
    pub u: RealField,
    pub v: RealField,
    pub n_jets: Vec<RealField>,
    pub dtheta_jets: Vec<RealField>,
    /// `int_{origin}^X V`.
    pub v_primitive: RealField,
}

impl SlowFrame {
    fn combine(&self, s: f64) -> Result<Vec<RealField>> {
        self.n_jets
            .iter()
            .zip(&self.dtheta_jets)
            .map(|(n, d)| n.zip_with(d, |a, b| 0.5 * (a + s * b)))
            .collect()
    }

    pub fn u_jets(&self) -> Result<Vec<RealField>> {
        self.combine(self.frame.theta_sign())
    }

    pub fn v_jets(&self) -> Result<Vec<RealField>> {
        self.combine(-self.frame.theta_sign())
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
        return Err(Error::Precondition(format!("epsilon must lie in (0, 1], got {eps}")));
    }
    Ok(())
}

fn window_in_box(
    fast: &SpectralGrid,
    slow: &SpectralGrid,
    eps: f64,
    frame: Frame,
    t: f64,
) -> Result<f64> {
    let shift = frame.fast_shift(t);
    let lo = slow.origin() / eps + shift;
    let hi = slow.end() / eps + shift;
    let tol = 1e-9 * fast.length();
    if lo < fast.origin() - tol || hi > fast.end() + tol {
        let max_time = match frame {
            Frame::Minus => (slow.origin() / eps - fast.origin()) / SQRT_2,
            Frame::Plus => (fast.end() - slow.end() / eps) / SQRT_2,
        };
        return Err(Error::WindowEscape {
            lo,
            hi,
            box_lo: fast.origin(),
            box_hi: fast.end(),
            max_time,
        });
    }
    Ok(shift)
}

/// Largest fast time for which the slow window of `frame` stays inside the box.
pub fn max_window_time(fast: &SpectralGrid, slow: &SpectralGrid, eps: f64, frame: Frame) -> f64 {
    match frame {
        Frame::Minus => (slow.origin() / eps - fast.origin()) / SQRT_2,
        Frame::Plus => (fast.end() - slow.end() / eps) / SQRT_2,
    }
}

/// Samples `N`, `Theta`, `dTheta`, `U`, `V` of `state` on the slow grid of `frame`.
pub fn extract_slow_frame(
    state: &GpState,
    eps: f64,
    frame: Frame,
    slow: &SpectralGrid,
) -> Result<SlowFrame> {
    check_eps(eps)?;
    let fast = *state.grid();
    let shift = window_in_box(&fast, slow, eps, frame, state.time)?;
    let hydro = madelung(state, VACUUM_FLOOR)?;
    let xs: Vec<f64> = slow.points().iter().map(|&x| x / eps + shift).collect();

    let eta_jets = BandLimited::new(&hydro.eta).jets_many(&xs, JET_ORDER);
    let dphi_jets = BandLimited::new(&hydro.dphi).jets_many(&xs, JET_ORDER);
    let mut n_jets = Vec::with_capacity(JET_ORDER + 1);
    let mut dtheta_jets = Vec::with_capacity(JET_ORDER + 1);
    for j in 0..=JET_ORDER {
        let s = eps.powi(-(j as i32));
        let sn = 6.0 / (eps * eps) * s;
        let sd = 6.0 * SQRT_2 / (eps * eps) * s;
        n_jets.push(RealField::new(*slow, eta_jets[j].iter().map(|v| v * sn).collect())?);
        dtheta_jets.push(RealField::new(*slow, dphi_jets[j].iter().map(|v| v * sd).collect())?);
    }

    let phase = Primitive::new(&hydro.dphi)?;
    let phi0 = hydro.phi.values()[0] - phase.eval(fast.origin());
    let theta = RealField::new(
        *slow,
        phase
            .eval_many(&xs)
            .into_iter()
            .map(|p| 6.0 * SQRT_2 / eps * (p + phi0))
            .collect(),
    )?;

    let ts = frame.theta_sign();
    let n = n_jets[0].clone();
    let dtheta = dtheta_jets[0].clone();
    let u = n.zip_with(&dtheta, |a, b| 0.5 * (a + ts * b))?;
    let v = n.zip_with(&dtheta, |a, b| 0.5 * (a - ts * b))?;

    let riemann = match frame {
        Frame::Minus => &hydro.riemann_v,
        Frame::Plus => &hydro.riemann_u,
    };
    let pv = Primitive::new(riemann)?;
    let pvals = pv.eval_many(&xs);
    let p0 = pvals[0];
    let v_primitive = RealField::new(
        *slow,
        pvals.into_iter().map(|p| 6.0 / eps * (p - p0)).collect(),
    )?;

    Ok(SlowFrame {
        epsilon: eps,
        frame,
        tau: slow_time(eps, state.time),
        time: state.time,
        grid: *slow,
        n,
        theta,
        dtheta,
        u,
        v,
        n_jets,
        dtheta_jets,
        v_primitive,
    })
}

/// Samples `slow(eps (x - shift))` on the fast grid, zero outside the slow window.
pub fn slow_to_fast(
    slow: &RealField,
    eps: f64,
    shift: f64,
    fast: &SpectralGrid,
) -> Result<RealField> {
    let g = slow.grid();
    let bl = BandLimited::new(slow);
    let xs = fast.points();
    let inside: Vec<usize> = (0..xs.len())
        .filter(|&i| {
            let x = eps * (xs[i] - shift);
            x >= g.origin() && x < g.end()
        })
        .collect();
    let pts: Vec<f64> = inside.iter().map(|&i| eps * (xs[i] - shift)).collect();
    let vals = bl.eval_many(&pts);
    let mut out = vec![0.0; xs.len()];
    for (i, v) in inside.into_iter().zip(vals) {
        out[i] = v;
    }
    RealField::new(*fast, out)
}

/// GP state with `eta = eps^2 N0 / 6` and phase `eps Theta0 / (6 sqrt2)`, `Theta0' = W0`.
///
/// Outside the slow window `N0` vanishes and the phase is constant; the net phase
/// jump becomes the twist of the returned field.
pub fn build_initial_data(
    n0: &RealField,
    w0: &RealField,
    eps: f64,
    fast: &SpectralGrid,
) -> Result<GpState> {
    check_eps(eps)?;
    let slow = *n0.grid();
    if *w0.grid() != slow {
        return Err(Error::InvalidGrid("N0 and W0 must share a grid".into()));
    }
    let peak = n0.values().iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    if eps * eps * peak / 6.0 >= 1.0 {
        return Err(Error::Precondition(format!(
            "eps^2 max N0 / 6 = {} must stay below 1",
            eps * eps * peak / 6.0
        )));
    }
    if slow.origin() / eps < fast.origin() || slow.end() / eps > fast.end() {
        return Err(Error::Precondition(format!(
            "slow window [{}, {}] maps outside the fast box [{}, {}]",
            slow.origin() / eps,
            slow.end() / eps,
            fast.origin(),
            fast.end()
        )));
    }
    let nf = slow_to_fast(n0, eps, 0.0, fast)?;
    let theta = Primitive::new(w0)?;
    let total = theta.eval(slow.end()) - theta.eval(slow.origin());
    let th0 = theta.eval(slow.origin());
    let scale = eps / (6.0 * SQRT_2);
    let xs = fast.points();
    let values: Vec<Complex64> = xs
        .iter()
        .zip(nf.values())
        .map(|(&x, &n)| {
            let big_x = eps * x;
            let th = if big_x < slow.origin() {
                0.0
            } else if big_x >= slow.end() {
                total
            } else {
                theta.eval(big_x) - th0
            };
            let rho = (1.0 - eps * eps * n / 6.0).sqrt();
            Complex64::from_polar(rho, scale * th)
        })
        .collect();
    let psi = ComplexField::with_twist(*fast, values, scale * total)?;
    Ok(GpState::new(psi, 0.0))
}

/// Energy written in slow variables: `eps^3 / 144 int (M W^2 + N^2 + eps^2 N'^2 / (2M))`.
pub fn rescaled_energy(n0: &RealField, w0: &RealField, eps: f64) -> Result<f64> {
    let dn = deriv(n0, 1)?;
    let dx = n0.grid().spacing();
    let s: f64 = (0..n0.len())
        .map(|i| {
            let n = n0.values()[i];
            let w = w0.values()[i];
            let m = 1.0 - eps * eps * n / 6.0;
            let d = dn.values()[i];
            m * w * w + n * n + eps * eps * d * d / (2.0 * m)
        })
        .sum();
    Ok(eps.powi(3) / 144.0 * s * dx)
}

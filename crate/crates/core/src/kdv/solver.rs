use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{check_finite_real, RealField};
use crate::grid::SpectralGrid;
use crate::spectral::Transform;

/// Orientation of the KdV flow.
///
/// `Forward` is `u_tau + u_xxx + u u_x = 0`; `Reversed` is its time reversal
/// `u_tau - u_xxx - u u_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KdvSign {
    Forward,
    Reversed,
}

impl KdvSign {
    pub fn value(self) -> f64 {
        match self {
            KdvSign::Forward => 1.0,
            KdvSign::Reversed => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KdvState {
    pub u: RealField,
    pub tau: f64,
}

impl KdvState {
    pub fn new(u: RealField, tau: f64) -> Self {
        Self { u, tau }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdvConfig {
    pub dtau: f64,
    /// Largest admissible `dtau * max|u| * k_max`.
    pub max_courant: f64,
    /// Abort once `max|u|` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
}

impl KdvConfig {
    pub fn new(dtau: f64) -> Self {
        Self {
            dtau,
            max_courant: 1.0,
            blowup_factor: 10.0,
        }
    }
}

/// Integrating-factor RK4 for KdV with 2/3-rule dealiasing of the quadratic term.
pub struct KdvSolver {
    grid: SpectralGrid,
    sign: KdvSign,
    cfg: KdvConfig,
    tr: Transform,
    /// `-s i k / 2` on retained modes, zero on the top third.
    nonlinear: Vec<Complex64>,
    cached: Option<(f64, Vec<Complex64>, Vec<Complex64>)>,
    stages: [Vec<Complex64>; 5],
    /// `max|u|` when the solver first ran; the blow-up guard is relative to it.
    baseline: Option<f64>,
    steps: usize,
}

impl KdvSolver {
    pub fn new(grid: SpectralGrid, sign: KdvSign, cfg: KdvConfig) -> Result<Self> {
        if !(cfg.dtau.is_finite() && cfg.dtau > 0.0) {
            return Err(Error::Precondition(format!(
                "dtau must be positive, got {}",
                cfg.dtau
            )));
        }
        let s = sign.value();
        let cut = grid.n_points() as i64 / 3;
        let nonlinear = (0..grid.n_points())
            .map(|j| {
                if grid.mode(j).abs() > cut {
                    Complex64::default()
                } else {
                    Complex64::new(0.0, -0.5 * s * grid.wavenumber(j))
                }
            })
            .collect();
        Ok(Self {
            grid,
            sign,
            cfg,
            tr: Transform::new(grid.n_points()),
            nonlinear,
            cached: None,
            stages: Default::default(),
            baseline: None,
            steps: 0,
        })
    }

    pub fn sign(&self) -> KdvSign {
        self.sign
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `exp(L h / 2)` and `exp(L h)` for the linear symbol `L = s i k^3`.
    fn factors(&self, h: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let s = self.sign.value();
        let half = (0..self.grid.n_points())
            .map(|j| {
                let k = self.grid.wavenumber(j);
                Complex64::from_polar(1.0, 0.5 * s * k * k * k * h)
            })
            .collect::<Vec<_>>();
        let full = half.iter().map(|z| z * z).collect();
        (half, full)
    }

    /// `h N(v)` with `N(v) = -s (i k / 2) F[u^2]`; also returns `max|u|`.
    fn rhs(&mut self, v: &[Complex64], h: f64, out: &mut Vec<Complex64>) -> f64 {
        out.clear();
        out.extend_from_slice(v);
        self.tr.inverse(out);
        let n = self.grid.n_points() as f64;
        let mut peak = 0.0_f64;
        for z in out.iter_mut() {
            let u = z.re / n;
            peak = peak.max(u.abs());
            *z = Complex64::new(u * u, 0.0);
        }
        self.tr.forward(out);
        out.iter_mut()
            .zip(&self.nonlinear)
            .for_each(|(z, g)| *z *= g * h);
        if peak.is_finite() {
            peak
        } else {
            f64::INFINITY
        }
    }

    fn step(
        &mut self,
        v: &mut [Complex64],
        h: f64,
        e: &[Complex64],
        e2: &[Complex64],
    ) -> f64 {
        let n = v.len();
        let [mut tmp, mut a, mut b, mut c, mut d] = std::mem::take(&mut self.stages);
        tmp.resize(n, Complex64::default());
        let peak = self.rhs(v, h, &mut a);
        for i in 0..n {
            tmp[i] = e[i] * (v[i] + 0.5 * a[i]);
        }
        self.rhs(&tmp, h, &mut b);
        for i in 0..n {
            tmp[i] = e[i] * v[i] + 0.5 * b[i];
        }
        self.rhs(&tmp, h, &mut c);
        for i in 0..n {
            tmp[i] = e2[i] * v[i] + e[i] * c[i];
        }
        self.rhs(&tmp, h, &mut d);
        for i in 0..n {
            v[i] = e2[i] * v[i] + (e2[i] * a[i] + 2.0 * e[i] * (b[i] + c[i]) + d[i]) / 6.0;
        }
        self.stages = [tmp, a, b, c, d];
        peak
    }

    /// Advances to `tau_final`, backwards in time when `tau_final < state.tau`.
    pub fn advance(&mut self, state: &mut KdvState, tau_final: f64) -> Result<()> {
        if *state.u.grid() != self.grid {
            return Err(Error::Precondition("state does not match the solver grid".into()));
        }
        check_finite_real(state.u.values(), "kdv initial data")?;
        let span = tau_final - state.tau;
        if !span.is_finite() {
            return Err(Error::Precondition(format!("invalid target time {tau_final}")));
        }
        let dir = if span < 0.0 { -1.0 } else { 1.0 };
        let span = span.abs();
        let dtau = self.cfg.dtau;
        let initial_peak = state.u.max_abs();
        let courant = dtau * initial_peak * self.grid.k_max();
        if courant > self.cfg.max_courant {
            return Err(Error::Precondition(format!(
                "dtau * max|u| * k_max = {courant} exceeds {}",
                self.cfg.max_courant
            )));
        }
        let baseline = *self.baseline.get_or_insert(initial_peak);
        let limit = self.cfg.blowup_factor * baseline.max(f64::MIN_POSITIVE);
        let n_full = (span / dtau + 1e-9).floor() as usize;
        let mut rem = span - n_full as f64 * dtau;
        if rem < 1e-9 * dtau {
            rem = 0.0;
        }

        let mut v: Vec<Complex64> = state
            .u
            .values()
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        self.tr.forward(&mut v);

        let h = dir * dtau;
        if n_full > 0 {
            let (e, e2) = match self.cached.take() {
                Some((hc, e, e2)) if hc == h => (e, e2),
                _ => self.factors(h),
            };
            for i in 0..n_full {
                let peak = self.step(&mut v, h, &e, &e2);
                self.steps += 1;
                self.check(peak, limit, state.tau + i as f64 * h)?;
            }
            self.cached = Some((h, e, e2));
        }
        if rem > 0.0 {
            let (e, e2) = self.factors(dir * rem);
            let peak = self.step(&mut v, dir * rem, &e, &e2);
            self.check(peak, limit, state.tau + n_full as f64 * h)?;
        }

        self.tr.inverse(&mut v);
        let n = self.grid.n_points() as f64;
        let u = v.iter().map(|z| z.re / n).collect::<Vec<_>>();
        let peak = u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        self.check(peak, limit, tau_final)?;
        state.u = RealField::new(self.grid, u)?;
        state.tau = tau_final;
        Ok(())
    }

    fn check(&self, peak: f64, limit: f64, tau: f64) -> Result<()> {
        if !peak.is_finite() {
            return Err(Error::NonFiniteStep {
                step: self.steps,
                time: tau,
            });
        }
        if peak > limit {
            return Err(Error::BlowUp {
                step: self.steps,
                max_abs: peak,
                limit,
            });
        }
        Ok(())
    }
}

/// Evolves a copy of `state` to `tau_final`.
pub fn evolve_kdv(state: &KdvState, sign: KdvSign, dtau: f64, tau_final: f64) -> Result<KdvState> {
    let mut solver = KdvSolver::new(*state.u.grid(), sign, KdvConfig::new(dtau))?;
    let mut out = state.clone();
    solver.advance(&mut out, tau_final)?;
    Ok(out)
}

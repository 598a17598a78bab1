use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::SpectralGrid;
use crate::spectral::{top_third_fraction, Transform};

/// Wavefunction at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct GpState {
    pub psi: ComplexField,
    pub time: f64,
}

impl GpState {
    pub fn new(psi: ComplexField, time: f64) -> Self {
        Self { psi, time }
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.psi.grid()
    }

    pub fn min_abs(&self) -> (f64, f64) {
        let g = self.grid();
        self.psi
            .values()
            .iter()
            .enumerate()
            .map(|(j, z)| (z.norm(), g.x(j)))
            .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpSolverConfig {
    pub dt: f64,
    /// Largest admissible `dt * (k_max + |q|)^2`.
    pub max_phase_per_step: f64,
    /// Largest admissible share of spectral energy in the top third of modes.
    pub resolution_limit: f64,
    /// Normalised Fourier amplitudes below this are zeroed after every linear step
    /// (0 disables). Keeps roundoff from accumulating in modes with no content.
    pub filter_threshold: f64,
}

impl GpSolverConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            max_phase_per_step: 10.0,
            resolution_limit: 1e-10,
            filter_threshold: 1e-15,
        }
    }
}

/// Absolute floor (mean-square units) under which tail energy is treated as roundoff.
const TAIL_FLOOR: f64 = 1e-26;

/// `exp(i theta)`. Below `|theta| = 1e-2` the truncated Taylor series is exact to
/// round-off (remainder under 3e-21) and much cheaper than `sin`/`cos`.
#[inline]
fn unit_phase(theta: f64) -> Complex64 {
    if theta.abs() < 1e-2 {
        let t2 = theta * theta;
        let re = 1.0 - t2 / 2.0 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0));
        let im = theta * (1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0)));
        Complex64::new(re, im)
    } else {
        Complex64::from_polar(1.0, theta)
    }
}

/// Strang split-step integrator for `i psi_t + psi_xx = psi (|psi|^2 - 1)`.
///
/// Works on the periodic envelope of a twisted field, so the linear flow uses the
/// shifted wavenumbers `k + q`.
pub struct GpSolver {
    grid: SpectralGrid,
    twist: f64,
    q: f64,
    cfg: GpSolverConfig,
    tr: Transform,
    propagator: Vec<Complex64>,
    untwist: Option<Vec<Complex64>>,
    steps: usize,
}

impl GpSolver {
    pub fn new(grid: SpectralGrid, twist: f64, cfg: GpSolverConfig) -> Result<Self> {
        if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
            return Err(Error::Precondition(format!("dt must be positive, got {}", cfg.dt)));
        }
        let q = twist / grid.length();
        let kq = grid.k_max() + q.abs();
        if cfg.dt * kq * kq > cfg.max_phase_per_step {
            return Err(Error::Precondition(format!(
                "dt * k_max^2 = {} exceeds {}",
                cfg.dt * kq * kq,
                cfg.max_phase_per_step
            )));
        }
        let probe = ComplexField::with_twist(
            grid,
            vec![Complex64::new(1.0, 0.0); grid.n_points()],
            twist,
        )?;
        let mut solver = Self {
            grid,
            twist,
            q,
            cfg,
            tr: Transform::new(grid.n_points()),
            propagator: Vec::new(),
            untwist: probe.untwist_factors(),
            steps: 0,
        };
        solver.propagator = solver.linear_factors(cfg.dt);
        Ok(solver)
    }

    pub fn config(&self) -> &GpSolverConfig {
        &self.cfg
    }

    /// Full steps taken so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    fn linear_factors(&self, h: f64) -> Vec<Complex64> {
        let s = 1.0 / self.grid.n_points() as f64;
        (0..self.grid.n_points())
            .map(|j| {
                let k = self.grid.wavenumber(j) + self.q;
                Complex64::from_polar(s, -k * k * h)
            })
            .collect()
    }

    fn linear(&mut self, env: &mut [Complex64], factors: &[Complex64]) {
        self.tr.forward(env);
        let cut = self.cfg.filter_threshold * self.cfg.filter_threshold;
        for (z, f) in env.iter_mut().zip(factors) {
            *z *= f;
            if z.norm_sqr() < cut {
                *z = Complex64::default();
            }
        }
        self.tr.inverse(env);
    }

    fn nonlinear(env: &mut [Complex64], h: f64, step: usize, time: f64) -> Result<()> {
        for z in env.iter_mut() {
            let n2 = z.norm_sqr();
            if !n2.is_finite() {
                return Err(Error::NonFiniteStep { step, time });
            }
            *z *= unit_phase(h * (1.0 - n2));
        }
        Ok(())
    }

    fn check_resolution(&mut self, env: &[Complex64]) -> Result<()> {
        let mut buf = env.to_vec();
        self.tr.forward(&mut buf);
        let n = self.grid.n_points() as f64;
        buf.iter_mut().for_each(|c| *c /= n);
        let (top, total) = top_third_fraction(&buf, &self.grid);
        if top > TAIL_FLOOR && top > self.cfg.resolution_limit * total {
            return Err(Error::Resolution {
                fraction: top / total,
                limit: self.cfg.resolution_limit,
            });
        }
        Ok(())
    }

    /// Advances `state` to `t_final`, finishing with a partial step when needed.
    pub fn advance(&mut self, state: &mut GpState, t_final: f64) -> Result<()> {
        if *state.grid() != self.grid || state.psi.twist() != self.twist {
            return Err(Error::Precondition(
                "state does not match the solver grid or twist".into(),
            ));
        }
        let span = t_final - state.time;
        if !(span.is_finite() && span >= -1e-12 * t_final.abs().max(1.0)) {
            return Err(Error::Precondition(format!(
                "cannot evolve from t = {} back to {t_final}",
                state.time
            )));
        }
        let span = span.max(0.0);
        let dt = self.cfg.dt;
        let n_full = (span / dt + 1e-9).floor() as usize;
        let mut rem = span - n_full as f64 * dt;
        if rem < 1e-9 * dt {
            rem = 0.0;
        }

        let mut env = state.psi.values().to_vec();
        if let Some(w) = &self.untwist {
            env.iter_mut().zip(w).for_each(|(z, w)| *z *= w);
        }
        self.check_resolution(&env)?;

        let t0 = state.time;
        if n_full > 0 {
            Self::nonlinear(&mut env, 0.5 * dt, self.steps, t0)?;
            let factors = std::mem::take(&mut self.propagator);
            for s in 0..n_full {
                self.linear(&mut env, &factors);
                let h = if s + 1 == n_full { 0.5 * dt } else { dt };
                let step = self.steps + s + 1;
                Self::nonlinear(&mut env, h, step, t0 + (s + 1) as f64 * dt)?;
            }
            self.propagator = factors;
            self.steps += n_full;
        }
        if rem > 0.0 {
            Self::nonlinear(&mut env, 0.5 * rem, self.steps + 1, t_final)?;
            let factors = self.linear_factors(rem);
            self.linear(&mut env, &factors);
            Self::nonlinear(&mut env, 0.5 * rem, self.steps + 1, t_final)?;
        }
        self.check_resolution(&env)?;

        if let Some(w) = &self.untwist {
            env.iter_mut().zip(w).for_each(|(z, w)| *z *= w.conj());
        }
        state.psi = ComplexField::with_twist(self.grid, env, self.twist)?;
        state.time = t_final;
        Ok(())
    }
}

/// Evolves a copy of `state` to `t_final` with step `dt`.
pub fn evolve_gp(state: &GpState, dt: f64, t_final: f64) -> Result<GpState> {
    let mut solver = GpSolver::new(*state.grid(), state.psi.twist(), GpSolverConfig::new(dt))?;
    let mut out = state.clone();
    solver.advance(&mut out, t_final)?;
    Ok(out)
}

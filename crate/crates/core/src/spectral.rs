//! Fourier pseudo-spectral operations on [`RealField`] and [`ComplexField`].

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{check_finite_complex, check_finite_real, ComplexField, RealField};
use crate::grid::SpectralGrid;

/// Highest derivative order accepted by [`deriv`] and friends.
pub const MAX_DERIV_ORDER: usize = 6;

/// Relative coefficient size below which trailing modes are skipped in pointwise evaluation.
pub const TAIL_TOLERANCE: f64 = 1e-15;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward and inverse plans of one size plus a scratch buffer.
pub struct Transform {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Transform {
    pub fn new(n: usize) -> Self {
        let (forward, inverse) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(n), p.plan_fft_inverse(n))
        });
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            scratch: vec![Complex64::default(); len],
        }
    }

    /// Unnormalised forward transform in place.
    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    /// Unnormalised inverse transform in place.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
    }
}

/// Normalised Fourier coefficients `c_j` with `f(x_m) = sum_j c_j exp(i k_j (x_m - origin))`.
pub fn real_spectrum(f: &RealField) -> Vec<Complex64> {
    let n = f.len();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Transform::new(n).forward(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= s);
    buf
}

/// Coefficients of the periodic envelope `f(x) exp(-i q (x - origin))`.
pub fn complex_spectrum(f: &ComplexField) -> Vec<Complex64> {
    let n = f.len();
    let mut buf = f.values().to_vec();
    if let Some(w) = f.untwist_factors() {
        buf.iter_mut().zip(&w).for_each(|(z, w)| *z *= w);
    }
    Transform::new(n).forward(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= s);
    buf
}

/// Spectral multiplier `(i (k + q))^order`, with the Nyquist mode removed for odd orders.
pub(crate) fn deriv_symbol(grid: &SpectralGrid, j: usize, q: f64, order: usize) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if order % 2 == 1 && j == grid.nyquist() {
        return Complex64::default();
    }
    Complex64::new(0.0, grid.wavenumber(j) + q).powu(order as u32)
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_DERIV_ORDER {
        return Err(Error::Precondition(format!(
            "derivative order {order} exceeds maximum {MAX_DERIV_ORDER}"
        )));
    }
    Ok(())
}

/// Spectral derivative of a real periodic field.
pub fn deriv(f: &RealField, order: usize) -> Result<RealField> {
    Ok(deriv_stack(f, order)?.pop().expect("non-empty stack"))
}

/// All derivatives `f, f', ..., f^(max_order)` from one forward transform.
pub fn deriv_stack(f: &RealField, max_order: usize) -> Result<Vec<RealField>> {
    check_order(max_order)?;
    check_finite_real(f.values(), "deriv input")?;
    let grid = *f.grid();
    let n = grid.n_points();
    let spec = real_spectrum(f);
    let mut tr = Transform::new(n);
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(f.clone());
    for order in 1..=max_order {
        let mut buf: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(j, c)| c * deriv_symbol(&grid, j, 0.0, order))
            .collect();
        tr.inverse(&mut buf);
        out.push(RealField::new(grid, buf.iter().map(|z| z.re).collect())?);
    }
    Ok(out)
}

/// Spectral derivative of a (possibly twisted) complex field.
pub fn deriv_complex(f: &ComplexField, order: usize) -> Result<ComplexField> {
    Ok(deriv_stack_complex(f, order)?.pop().expect("non-empty stack"))
}

pub fn deriv_stack_complex(f: &ComplexField, max_order: usize) -> Result<Vec<ComplexField>> {
    check_order(max_order)?;
    check_finite_complex(f.values(), "deriv input")?;
    let grid = *f.grid();
    let n = grid.n_points();
    let q = f.bloch_shift();
    let spec = complex_spectrum(f);
    let retwist: Option<Vec<Complex64>> = f
        .untwist_factors()
        .map(|w| w.iter().map(|z| z.conj()).collect());
    let mut tr = Transform::new(n);
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(f.clone());
    for order in 1..=max_order {
        let mut buf: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(j, c)| c * deriv_symbol(&grid, j, q, order))
            .collect();
        tr.inverse(&mut buf);
        if let Some(w) = &retwist {
            buf.iter_mut().zip(w).for_each(|(z, w)| *z *= w);
        }
        out.push(ComplexField::with_twist(grid, buf, f.twist())?);
    }
    Ok(out)
}

/// Cumulative trapezoid integral `F(x) = int_base^x f`, anchored at the node nearest `base`.
///
/// The offset between `base` and that node is corrected to first order.
pub fn antiderivative(f: &RealField, base: f64) -> Result<RealField> {
    let grid = *f.grid();
    if !grid.contains(base) {
        return Err(Error::Precondition(format!(
            "base point {base} outside [{}, {}]",
            grid.origin(),
            grid.end()
        )));
    }
    let v = f.values();
    let n = v.len();
    let dx = grid.spacing();
    let j0 = grid.nearest_index(base);
    let mut out = vec![0.0; n];
    out[j0] = v[j0] * (grid.x(j0) - base);
    for j in j0 + 1..n {
        out[j] = out[j - 1] + 0.5 * dx * (v[j - 1] + v[j]);
    }
    for j in (0..j0).rev() {
        out[j] = out[j + 1] - 0.5 * dx * (v[j] + v[j + 1]);
    }
    RealField::new(grid, out)
}

/// Exact primitive of a band-limited periodic field: a linear ramp plus a periodic part.
#[derive(Debug, Clone)]
pub struct Primitive {
    origin: f64,
    slope: f64,
    periodic: BandLimited,
}

impl Primitive {
    pub fn new(f: &RealField) -> Result<Self> {
        check_finite_real(f.values(), "primitive input")?;
        let grid = *f.grid();
        let spec = real_spectrum(f);
        let slope = spec[0].re;
        let coeffs: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j == 0 || j == grid.nyquist() {
                    Complex64::default()
                } else {
                    c / Complex64::new(0.0, grid.wavenumber(j))
                }
            })
            .collect();
        Ok(Self {
            origin: grid.origin(),
            slope,
            periodic: BandLimited::from_spectrum(&grid, &coeffs, 0.0),
        })
    }

    /// Mean of the integrand, i.e. the slope of the ramp.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.slope * (x - self.origin) + self.periodic.eval(x)
    }

    pub fn eval_many(&self, xs: &[f64]) -> Vec<f64> {
        let p = self.periodic.eval_many(xs);
        xs.iter()
            .zip(p)
            .map(|(&x, p)| self.slope * (x - self.origin) + p)
            .collect()
    }
}

/// Antiderivative from `base` using the spectral primitive; exact for band-limited input.
pub fn spectral_antiderivative(f: &RealField, base: f64) -> Result<RealField> {
    let grid = *f.grid();
    if !grid.contains(base) {
        return Err(Error::Precondition(format!(
            "base point {base} outside [{}, {}]",
            grid.origin(),
            grid.end()
        )));
    }
    let p = Primitive::new(f)?;
    let f0 = p.eval(base);
    let values = p.eval_many(&grid.points());
    RealField::new(grid, values.into_iter().map(|v| v - f0).collect())
}

/// Rectangle-rule L2 norm.
pub fn l2_norm(f: &RealField) -> f64 {
    (f.values().iter().map(|v| v * v).sum::<f64>() * f.grid().spacing()).sqrt()
}

/// Rectangle-rule L2 norm of a complex field.
pub fn l2_norm_complex(f: &ComplexField) -> f64 {
    (f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid().spacing()).sqrt()
}

/// Squared L2 norms `||d^j f||^2`, `j = 0..=k`, from the mode sum.
pub fn derivative_energies(f: &RealField, k: usize) -> Result<Vec<f64>> {
    check_order(k)?;
    check_finite_real(f.values(), "sobolev input")?;
    let grid = *f.grid();
    let spec = real_spectrum(f);
    let len = grid.length();
    Ok((0..=k)
        .map(|order| {
            spec.iter()
                .enumerate()
                .map(|(j, c)| (c * deriv_symbol(&grid, j, 0.0, order)).norm_sqr())
                .sum::<f64>()
                * len
        })
        .collect())
}

/// `H^k` norm `sqrt(sum_{j<=k} ||d^j f||^2)`.
pub fn sobolev_norm(f: &RealField, k: usize) -> Result<f64> {
    Ok(derivative_energies(f, k)?.iter().sum::<f64>().sqrt())
}

/// `max C - min C` for the cumulative integral `C(x) = int_origin^x f` over one period.
///
/// The closing node `origin + L` is included so that a non-negative `f` returns its integral.
pub fn m_norm(f: &RealField) -> f64 {
    let v = f.values();
    let dx = f.grid().spacing();
    let n = v.len();
    let mut c = 0.0_f64;
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    for j in 0..n {
        let next = v[(j + 1) % n];
        c += 0.5 * dx * (v[j] + next);
        lo = lo.min(c);
        hi = hi.max(c);
    }
    hi - lo
}

/// Share of the non-constant spectral energy held by modes with `|m| > n/3`.
pub(crate) fn top_third_fraction(spec: &[Complex64], grid: &SpectralGrid) -> (f64, f64) {
    let cut = grid.n_points() as i64 / 3;
    let (mut top, mut total) = (0.0, 0.0);
    for (j, c) in spec.iter().enumerate().skip(1) {
        let e = c.norm_sqr();
        total += e;
        if grid.mode(j).abs() > cut {
            top += e;
        }
    }
    (top, total)
}

/// Pointwise evaluator of a trigonometric interpolant.
///
/// Real fields store one-sided amplitudes `a_m`, `f(x) = Re sum_m a_m exp(i k_m (x - origin))`.
#[derive(Debug, Clone)]
pub struct BandLimited {
    origin: f64,
    dk: f64,
    nyquist: usize,
    amps: Vec<Complex64>,
}

impl BandLimited {
    pub fn new(f: &RealField) -> Self {
        let spec = real_spectrum(f);
        Self::from_spectrum(f.grid(), &spec, TAIL_TOLERANCE)
    }

    pub(crate) fn from_spectrum(grid: &SpectralGrid, spec: &[Complex64], tol: f64) -> Self {
        let nyq = grid.nyquist();
        let mut amps: Vec<Complex64> = (0..=nyq)
            .map(|m| {
                if m == 0 {
                    Complex64::new(spec[0].re, 0.0)
                } else if m == nyq {
                    Complex64::new(spec[m].re, 0.0)
                } else {
                    2.0 * spec[m]
                }
            })
            .collect();
        let peak = amps.iter().fold(0.0_f64, |a, c| a.max(c.norm()));
        let keep = amps
            .iter()
            .rposition(|c| c.norm() > tol * peak)
            .map_or(1, |m| m + 1);
        amps.truncate(keep);
        Self {
            origin: grid.origin(),
            dk: 2.0 * std::f64::consts::PI / grid.length(),
            nyquist: nyq,
            amps,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.jets_at(x, 0)[0]
    }

    pub fn eval_many(&self, xs: &[f64]) -> Vec<f64> {
        use rayon::prelude::*;
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }

    /// Values of `f, f', ..., f^(max_order)` at one point.
    pub fn jets_at(&self, x: f64, max_order: usize) -> Vec<f64> {
        let d = x - self.origin;
        let step = Complex64::from_polar(1.0, self.dk * d);
        let mut z = Complex64::new(1.0, 0.0);
        let mut acc = vec![0.0; max_order + 1];
        for (m, a) in self.amps.iter().enumerate() {
            if m % 64 == 0 {
                z = Complex64::from_polar(1.0, self.dk * m as f64 * d);
            }
            let k = self.dk * m as f64;
            let mut t = a * z;
            acc[0] += t.re;
            for (order, slot) in acc.iter_mut().enumerate().skip(1) {
                t = Complex64::new(-t.im * k, t.re * k);
                if !(m == self.nyquist && order % 2 == 1) {
                    *slot += t.re;
                }
            }
            z *= step;
        }
        acc
    }

    /// Jets at many points, indexed `[order][point]`.
    pub fn jets_many(&self, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
        use rayon::prelude::*;
        let rows: Vec<Vec<f64>> = xs
            .par_iter()
            .map(|&x| self.jets_at(x, max_order))
            .collect();
        (0..=max_order)
            .map(|o| rows.iter().map(|r| r[o]).collect())
            .collect()
    }
}

/// Pointwise evaluator for twisted complex fields.
#[derive(Debug, Clone)]
pub struct BandLimitedComplex {
    grid: SpectralGrid,
    q: f64,
    spec: Vec<Complex64>,
}

impl BandLimitedComplex {
    pub fn new(f: &ComplexField) -> Self {
        Self {
            grid: *f.grid(),
            q: f.bloch_shift(),
            spec: complex_spectrum(f),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let d = x - self.grid.origin();
        let nyq = self.grid.nyquist();
        let mut acc = Complex64::default();
        for (j, c) in self.spec.iter().enumerate() {
            let k = self.grid.wavenumber(j);
            if j == nyq {
                acc += c * (k * d).cos();
            } else {
                acc += c * Complex64::from_polar(1.0, k * d);
            }
        }
        acc * Complex64::from_polar(1.0, self.q * d)
    }
}

fn check_window(source: &SpectralGrid, target: &SpectralGrid, shift: f64) -> Result<()> {
    let lo = target.origin() + shift;
    let hi = target.x(target.n_points() - 1) + shift;
    let len = source.length();
    let tol = 1e-9 * len;
    let period = ((lo - source.origin() + tol) / len).floor();
    let start = source.origin() + period * len;
    if !(lo.is_finite() && hi.is_finite()) || hi > start + len + tol {
        return Err(Error::Precondition(format!(
            "target window [{lo}, {hi}] does not fit inside one period of [{}, {}]",
            source.origin(),
            source.end()
        )));
    }
    Ok(())
}

/// Band-limited evaluation of `f(x + shift)` on the nodes of `target`.
pub fn resample(f: &RealField, target: &SpectralGrid, shift: f64) -> Result<RealField> {
    check_finite_real(f.values(), "resample input")?;
    if target == f.grid() && shift == 0.0 {
        return Ok(f.clone());
    }
    check_window(f.grid(), target, shift)?;
    let bl = BandLimited::new(f);
    let xs: Vec<f64> = target.points().into_iter().map(|x| x + shift).collect();
    RealField::new(*target, bl.eval_many(&xs))
}

/// Complex counterpart of [`resample`]; the twist per unit length is preserved.
pub fn resample_complex(f: &ComplexField, target: &SpectralGrid, shift: f64) -> Result<ComplexField> {
    check_finite_complex(f.values(), "resample input")?;
    if target == f.grid() && shift == 0.0 {
        return Ok(f.clone());
    }
    check_window(f.grid(), target, shift)?;
    let bl = BandLimitedComplex::new(f);
    let values = target.points().into_iter().map(|x| bl.eval(x + shift)).collect();
    let twist = f.bloch_shift() * target.length();
    ComplexField::with_twist(*target, values, twist)
}

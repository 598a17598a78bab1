use std::f64::consts::{PI, TAU};

use gpkdv::spectral::{
    antiderivative, deriv, deriv_complex, derivative_energies, l2_norm, m_norm, resample,
    sobolev_norm, spectral_antiderivative, BandLimited, Primitive,
};
use gpkdv::{ComplexField, RealField, SpectralGrid};
use num_complex::Complex64;
use proptest::prelude::*;

fn max_diff(a: &RealField, b: &RealField) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn periodic_grid(n: usize) -> SpectralGrid {
    SpectralGrid::with_origin(0.0, TAU, n).unwrap()
}

fn sech2(x: f64) -> f64 {
    1.0 / x.cosh().powi(2)
}

#[test]
fn grid_spacing_times_points_is_length() {
    for &(l, n) in &[(1.0, 2), (40.0, 256), (4096.0, 8192), (TAU, 64)] {
        let g = SpectralGrid::new(l, n).unwrap();
        assert!((g.spacing() * n as f64 - l).abs() <= 4.0 * f64::EPSILON * l);
    }
}

#[test]
fn wavenumbers_antisymmetric_except_nyquist() {
    let g = SpectralGrid::new(10.0, 16).unwrap();
    let k = g.wavenumbers();
    assert_eq!(k[0], 0.0);
    for j in 1..16 {
        if j == g.nyquist() {
            assert!(k[j] > 0.0);
            continue;
        }
        assert!((k[j] + k[16 - j]).abs() < 1e-14);
    }
}

#[test]
fn grid_rejects_bad_sizes() {
    assert!(SpectralGrid::new(1.0, 12).is_err());
    assert!(SpectralGrid::new(1.0, 1).is_err());
    assert!(SpectralGrid::new(0.0, 16).is_err());
    assert!(SpectralGrid::new(f64::NAN, 16).is_err());
}

#[test]
fn fields_reject_wrong_length_and_non_finite() {
    let g = SpectralGrid::new(1.0, 4).unwrap();
    assert!(RealField::new(g, vec![0.0; 3]).is_err());
    assert!(RealField::new(g, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    assert!(ComplexField::new(g, vec![Complex64::new(f64::INFINITY, 0.0); 4]).is_err());
}

#[test]
fn derivative_of_sine_is_exact() {
    let g = periodic_grid(64);
    let f = RealField::from_fn(g, |x| (2.0 * x).sin()).unwrap();
    let d = deriv(&f, 1).unwrap();
    let exact = RealField::from_fn(g, |x| 2.0 * (2.0 * x).cos()).unwrap();
    assert!(max_diff(&d, &exact) < 1e-13);
}

#[test]
fn derivative_of_constant_vanishes() {
    let g = periodic_grid(32);
    let f = RealField::from_fn(g, |_| 3.5).unwrap();
    for order in 1..=6 {
        assert!(deriv(&f, order).unwrap().max_abs() < 1e-12);
    }
    assert_eq!(deriv(&f, 0).unwrap(), f);
}

#[test]
fn derivative_order_is_capped() {
    let g = periodic_grid(32);
    let f = RealField::zeros(g);
    assert!(deriv(&f, 7).is_err());
}

#[test]
fn second_derivative_matches_finite_differences() {
    let g = SpectralGrid::new(40.0, 512).unwrap();
    let h = g.spacing();
    let f = RealField::from_fn(g, |x| (-x * x).exp()).unwrap();
    let d2 = deriv(&f, 2).unwrap();
    let v = f.values();
    let n = v.len();
    let fd: Vec<f64> = (0..n)
        .map(|j| (v[(j + 1) % n] - 2.0 * v[j] + v[(j + n - 1) % n]) / (h * h))
        .collect();
    let fd = RealField::new(g, fd).unwrap();
    // Truncation error h^2 f'''' / 12 with max |f''''| = 12.
    assert!(max_diff(&d2, &fd) <= 1.05 * h * h);
}

#[test]
fn twisted_derivative_of_plane_wave() {
    // e^{i q x} with q = 0.3 is not periodic on [0, 2 pi); the twist carries the phase jump.
    let g = periodic_grid(64);
    let q = 0.3;
    let f = ComplexField::with_twist(
        g,
        g.points().iter().map(|&x| Complex64::from_polar(1.0, q * x)).collect(),
        q * TAU,
    )
    .unwrap();
    let d = deriv_complex(&f, 1).unwrap();
    for (z, &x) in d.values().iter().zip(&g.points()) {
        let exact = Complex64::new(0.0, q) * Complex64::from_polar(1.0, q * x);
        assert!((z - exact).norm() < 1e-12);
    }
}

#[test]
fn antiderivative_of_zero() {
    let g = periodic_grid(32);
    let a = antiderivative(&RealField::zeros(g), 1.0).unwrap();
    assert_eq!(a.max_abs(), 0.0);
}

#[test]
fn antiderivative_of_cosine() {
    let g = periodic_grid(256);
    let h = g.spacing();
    let f = RealField::from_fn(g, f64::cos).unwrap();
    let a = antiderivative(&f, 0.0).unwrap();
    let exact = RealField::from_fn(g, f64::sin).unwrap();
    assert!(max_diff(&a, &exact) <= h * h);
}

#[test]
fn antiderivative_of_sech2_from_left_edge() {
    let g = SpectralGrid::new(60.0, 1 << 15).unwrap();
    let f = RealField::from_fn(g, sech2).unwrap();
    let a = antiderivative(&f, -30.0).unwrap();
    let exact = RealField::from_fn(g, |x| x.tanh() + 1.0).unwrap();
    assert!(max_diff(&a, &exact) <= 1e-6);
}

#[test]
fn antiderivative_base_outside_box_fails() {
    let g = SpectralGrid::new(10.0, 32).unwrap();
    assert!(antiderivative(&RealField::zeros(g), 5.5).is_err());
    assert!(spectral_antiderivative(&RealField::zeros(g), -6.0).is_err());
}

#[test]
fn spectral_antiderivative_handles_nonzero_mean() {
    let g = periodic_grid(64);
    let f = RealField::from_fn(g, |x| 1.0 + x.cos()).unwrap();
    let a = spectral_antiderivative(&f, 0.0).unwrap();
    let exact = RealField::from_fn(g, |x| x + x.sin()).unwrap();
    assert!(max_diff(&a, &exact) < 1e-12);
    let p = Primitive::new(&f).unwrap();
    assert!((p.slope() - 1.0).abs() < 1e-14);
    assert!((p.eval(TAU) - TAU).abs() < 1e-12);
}

#[test]
fn sobolev_norm_examples() {
    let g = periodic_grid(64);
    assert_eq!(sobolev_norm(&RealField::zeros(g), 3).unwrap(), 0.0);
    let s = RealField::from_fn(g, f64::sin).unwrap();
    assert!((sobolev_norm(&s, 0).unwrap() - PI.sqrt()).abs() < 1e-13);
    // ||sin||^2 + ||cos||^2 + ||sin||^2 = 3 pi.
    assert!((sobolev_norm(&s, 2).unwrap() - (3.0 * PI).sqrt()).abs() < 1e-12);
}

#[test]
fn m_norm_examples() {
    let g = SpectralGrid::new(60.0, 2048).unwrap();
    let f = RealField::from_fn(g, sech2).unwrap();
    assert!((m_norm(&f) - 2.0).abs() < 1e-8);

    let g = periodic_grid(1024);
    let h = g.spacing();
    let s = RealField::from_fn(g, f64::sin).unwrap();
    assert!((m_norm(&s) - 2.0).abs() < h * h);

    let pos = RealField::from_fn(SpectralGrid::new(20.0, 256).unwrap(), |x| (-x * x).exp() + 0.1).unwrap();
    assert!((m_norm(&pos) - pos.integral()).abs() < 1e-12);
}

#[test]
fn resample_identity_and_full_period() {
    let g = SpectralGrid::new(20.0, 128).unwrap();
    let f = RealField::from_fn(g, |x| (-x * x / 4.0).exp() * (3.0 * x).sin()).unwrap();
    assert_eq!(resample(&f, &g, 0.0).unwrap(), f);
    let p = resample(&f, &g, 20.0).unwrap();
    assert!(max_diff(&p, &f) < 1e-12);
}

#[test]
fn resample_to_coarser_grid_matches_direct_evaluation() {
    let src = SpectralGrid::new(40.0, 256).unwrap();
    let dst = SpectralGrid::new(40.0, 128).unwrap();
    let f = RealField::from_fn(src, |x| (-x * x).exp()).unwrap();
    let r = resample(&f, &dst, 0.0).unwrap();
    let exact = RealField::from_fn(dst, |x| (-x * x).exp()).unwrap();
    assert!(max_diff(&r, &exact) < 1e-10);

    let sub = SpectralGrid::new(10.0, 64).unwrap();
    let shifted = resample(&f, &sub, 1.5).unwrap();
    let exact = RealField::from_fn(sub, |x| (-(x + 1.5) * (x + 1.5)).exp()).unwrap();
    assert!(max_diff(&shifted, &exact) < 1e-10);
}

#[test]
fn resample_rejects_window_larger_than_period() {
    let src = SpectralGrid::new(10.0, 64).unwrap();
    let dst = SpectralGrid::new(12.0, 64).unwrap();
    assert!(resample(&RealField::zeros(src), &dst, 0.0).is_err());
}

#[test]
fn band_limited_jets_are_derivatives() {
    let g = SpectralGrid::new(30.0, 256).unwrap();
    let f = RealField::from_fn(g, |x| sech2(x) * (0.5 * x).cos()).unwrap();
    let bl = BandLimited::new(&f);
    let ds: Vec<RealField> = (0..=4).map(|k| deriv(&f, k).unwrap()).collect();
    for &j in &[0usize, 17, 128, 200] {
        let jets = bl.jets_at(g.x(j), 4);
        for k in 0..=4 {
            assert!((jets[k] - ds[k].values()[j]).abs() < 1e-9, "order {k} at {j}");
        }
    }
}

fn smooth_field(g: SpectralGrid, coeffs: &[(f64, f64)]) -> RealField {
    let l = g.length();
    RealField::from_fn(g, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(m, &(a, b))| {
                let k = TAU * (m + 1) as f64 / l;
                let damp = (-0.3 * (m as f64)).exp();
                damp * (a * (k * x).cos() + b * (k * x).sin())
            })
            .sum()
    })
    .unwrap()
}

fn bumps(g: SpectralGrid, parts: &[(f64, f64)], w: f64) -> RealField {
    // Derivative of a sum of Gaussians: mean zero and localised.
    RealField::from_fn(g, |x| {
        parts
            .iter()
            .map(|&(a, c)| {
                let y = (x - c) / w;
                -2.0 * a * y / w * (-y * y).exp()
            })
            .sum()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_derivative_twice_is_second(coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..12)) {
        let g = SpectralGrid::new(12.0, 128).unwrap();
        let f = smooth_field(g, &coeffs);
        let twice = deriv(&deriv(&f, 1).unwrap(), 1).unwrap();
        let direct = deriv(&f, 2).unwrap();
        let scale = direct.max_abs().max(1e-300);
        prop_assert!(max_diff(&twice, &direct) <= 1e-10 * scale);
    }

    #[test]
    fn parseval(coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..12), c in -2.0..2.0f64) {
        let g = SpectralGrid::new(7.0, 64).unwrap();
        let f = smooth_field(g, &coeffs).map(|v| v + c).unwrap();
        let rect = l2_norm(&f).powi(2);
        let modes = derivative_energies(&f, 0).unwrap()[0];
        prop_assert!((rect - modes).abs() <= 1e-12 * rect.max(1e-300));
    }

    #[test]
    fn sobolev_norm_is_monotone_in_k(coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..12)) {
        let g = SpectralGrid::new(9.0, 64).unwrap();
        let f = smooth_field(g, &coeffs);
        let norms: Vec<f64> = (0..=6).map(|k| sobolev_norm(&f, k).unwrap()).collect();
        for w in norms.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn m_norm_properties(coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..12), c in -1.0..1.0f64, a in -5.0..5.0f64) {
        let g = SpectralGrid::new(11.0, 128).unwrap();
        let f = smooth_field(g, &coeffs).map(|v| v + c).unwrap();
        let m = m_norm(&f);
        let l1 = f.values().iter().map(|v| v.abs()).sum::<f64>() * g.spacing();
        prop_assert!(m <= l1 * (1.0 + 1e-12) + 1e-14);
        prop_assert!((m_norm(&f.scaled(-1.0)) - m).abs() <= 1e-12 * m.max(1e-300));
        prop_assert!((m_norm(&f.scaled(a)) - a.abs() * m).abs() <= 1e-12 * (a.abs() * m).max(1e-300));
    }

    #[test]
    fn antiderivative_then_derivative_recovers(parts in prop::collection::vec((-2.0..2.0f64, -5.0..5.0f64), 1..5), w in 0.7..2.0f64) {
        let g = SpectralGrid::new(40.0, 512).unwrap();
        let h = g.spacing();
        let f = bumps(g, &parts, w);
        let back = deriv(&antiderivative(&f, -20.0).unwrap(), 1).unwrap();
        let amp: f64 = parts.iter().map(|p| p.0.abs()).sum();
        prop_assert!(max_diff(&back, &f) <= 10.0 * h * h * amp / w.powi(4));
    }
}

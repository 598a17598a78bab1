use std::f64::consts::{PI, SQRT_2};

use gpkdv::bridge::{
    build_initial_data, extract_slow_frame, fast_time, interaction_terms, line_energies,
    line_norms, max_window_time, n_scale, rescaled_energy, slow_system_residuals, slow_time,
    slow_to_fast, Frame, SlowFrame, JET_ORDER,
};
use gpkdv::gp::{energy, madelung, GpState, VACUUM_FLOOR};
use gpkdv::spectral::{deriv, deriv_stack, spectral_antiderivative};
use gpkdv::{ComplexField, Error, RealField, SpectralGrid};
use proptest::prelude::*;

fn sech2(x: f64) -> f64 {
    1.0 / x.cosh().powi(2)
}

fn max_diff(a: &RealField, b: &RealField) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn slow_grid() -> SpectralGrid {
    SpectralGrid::new(40.0, 256).unwrap()
}

fn fields(g: SpectralGrid, w_amp: f64) -> (RealField, RealField) {
    let n0 = RealField::from_fn(g, sech2).unwrap();
    let w0 = RealField::from_fn(g, |x| w_amp * sech2(x - 1.0)).unwrap();
    (n0, w0)
}

#[test]
fn time_maps_are_inverse() {
    assert!((slow_time(0.1, fast_time(0.1, 0.3)) - 0.3).abs() < 1e-15);
    assert!((fast_time(0.2, 1.0) - 2.0 * SQRT_2 / 0.008).abs() < 1e-10);
}

#[test]
fn zero_data_give_the_constant_state() {
    let g = slow_grid();
    let fast = SpectralGrid::new(512.0, 2048).unwrap();
    let s = build_initial_data(&RealField::zeros(g), &RealField::zeros(g), 0.1, &fast).unwrap();
    assert!(s.psi.values().iter().all(|z| (z - 1.0).norm() == 0.0));
    assert_eq!(s.psi.twist(), 0.0);
}

#[test]
fn built_density_is_the_scaled_profile() {
    let g = slow_grid();
    let fast = SpectralGrid::new(512.0, 4096).unwrap();
    let eps = 0.1;
    let (n0, w0) = fields(g, 0.7);
    let s = build_initial_data(&n0, &w0, eps, &fast).unwrap();
    let h = madelung(&s, VACUUM_FLOOR).unwrap();
    for (j, &x) in fast.points().iter().enumerate() {
        let target = if (-20.0..20.0).contains(&(eps * x)) {
            eps * eps * sech2(eps * x) / 6.0
        } else {
            0.0
        };
        assert!((h.eta.values()[j] - target).abs() <= 1e-10);
    }
}

#[test]
fn built_energy_matches_direct_quadrature() {
    // E = eps^3 / 144 int (M W^2 + N^2 + eps^2 N'^2 / (2M)), M = 1 - eps^2 N / 6,
    // with N = sech^2 and W = 0, integrated by Simpson's rule.
    let eps: f64 = 0.1;
    let m = 200_000;
    let (a, b) = (-20.0, 20.0);
    let hh = (b - a) / m as f64;
    let integrand = |x: f64| {
        let n = sech2(x);
        let dn = -2.0 * n * x.tanh();
        let mm = 1.0 - eps * eps * n / 6.0;
        n * n + eps * eps * dn * dn / (2.0 * mm)
    };
    let simpson: f64 = (0..=m)
        .map(|i| {
            let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            w * integrand(a + i as f64 * hh)
        })
        .sum::<f64>()
        * hh
        / 3.0;
    let oracle = eps.powi(3) / 144.0 * simpson;

    let g = slow_grid();
    let fast = SpectralGrid::new(512.0, 4096).unwrap();
    let (n0, w0) = fields(g, 0.0);
    let s = build_initial_data(&n0, &w0, eps, &fast).unwrap();
    assert!((energy(&s.psi).unwrap() - oracle).abs() <= 1e-8);
    assert!((rescaled_energy(&n0, &w0, eps).unwrap() - oracle).abs() <= 1e-10);
}

#[test]
fn build_rejects_bad_input() {
    let g = slow_grid();
    let fast = SpectralGrid::new(512.0, 4096).unwrap();
    let (n0, w0) = fields(g, 0.0);
    assert!(build_initial_data(&n0.scaled(700.0), &w0, 0.1, &fast).is_err());
    let narrow = SpectralGrid::new(200.0, 1024).unwrap();
    assert!(build_initial_data(&n0, &w0, 0.1, &narrow).is_err());
    assert!(build_initial_data(&n0, &w0, 0.0, &fast).is_err());
    assert!(build_initial_data(&n0, &RealField::zeros(SpectralGrid::new(40.0, 128).unwrap()), 0.1, &fast).is_err());
}

#[test]
fn extraction_at_time_zero_recovers_the_data() {
    let g = slow_grid();
    let fast = SpectralGrid::new(512.0, 4096).unwrap();
    let (n0, w0) = fields(g, 0.7);
    let s = build_initial_data(&n0, &w0, 0.1, &fast).unwrap();
    for frame in Frame::BOTH {
        let sf = extract_slow_frame(&s, 0.1, frame, &g).unwrap();
        assert_eq!(sf.tau, 0.0);
        assert!(max_diff(&sf.n, &n0) <= 1e-8);
        assert!(max_diff(&sf.dtheta, &w0) <= 1e-8);
        let ts = frame.theta_sign();
        for i in 0..g.n_points() {
            let (n, d, u, v) = (sf.n.values()[i], sf.dtheta.values()[i], sf.u.values()[i], sf.v.values()[i]);
            assert!((u + v - n).abs() <= 1e-10);
            assert!((u - v - ts * d).abs() <= 1e-10);
        }
        assert_eq!(sf.n_jets.len(), JET_ORDER + 1);
        let dn = deriv(&n0, 1).unwrap();
        assert!(max_diff(&sf.n_jets[1], &dn) <= 1e-7);
    }
}

#[test]
fn constant_state_has_zero_slow_fields() {
    let g = slow_grid();
    let fast = SpectralGrid::new(512.0, 2048).unwrap();
    let s = GpState::new(ComplexField::constant(fast, 1.0.into()), 10.0);
    for frame in Frame::BOTH {
        let sf = extract_slow_frame(&s, 0.1, frame, &g).unwrap();
        for f in [&sf.n, &sf.dtheta, &sf.u, &sf.v, &sf.theta] {
            assert_eq!(f.max_abs(), 0.0);
        }
    }
}

#[test]
fn frames_see_the_same_fast_point() {
    // V of frame minus at X equals U of frame plus at X - 8 tau / eps^2.
    let eps = 0.2;
    let g = slow_grid();
    let fast = SpectralGrid::new(300.0, 2048).unwrap();
    let (n0, w0) = fields(g, 0.3);
    let mut s = build_initial_data(&n0, &w0, eps, &fast).unwrap();
    s.time = 20.0;
    let tau = slow_time(eps, s.time);
    let shift = 8.0 * tau / (eps * eps);
    let minus = extract_slow_frame(&s, eps, Frame::Minus, &g).unwrap();
    let plus = extract_slow_frame(&s, eps, Frame::Plus, &g.shifted(-shift)).unwrap();
    assert!(max_diff(&minus.v, &RealField::new(g, plus.u.into_values()).unwrap()) <= 1e-6);
}

#[test]
fn window_escape_reports_the_admissible_time() {
    let eps = 0.2;
    let g = slow_grid();
    let fast = SpectralGrid::new(300.0, 1024).unwrap();
    let mut s = GpState::new(ComplexField::constant(fast, 1.0.into()), 0.0);
    let t_max = max_window_time(&fast, &g, eps, Frame::Minus);
    assert!((t_max - (-100.0 + 150.0) / SQRT_2).abs() < 1e-12);
    s.time = 0.99 * t_max;
    assert!(extract_slow_frame(&s, eps, Frame::Minus, &g).is_ok());
    s.time = 1.01 * t_max;
    match extract_slow_frame(&s, eps, Frame::Minus, &g) {
        Err(Error::WindowEscape { max_time, .. }) => assert!((max_time - t_max).abs() < 1e-12),
        other => panic!("expected a window escape, got {other:?}"),
    }
}

#[test]
fn slow_to_fast_places_the_profile() {
    let g = slow_grid();
    let fast = SpectralGrid::new(512.0, 2048).unwrap();
    let f = RealField::from_fn(g, sech2).unwrap();
    let eps = 0.1;
    let out = slow_to_fast(&f, eps, 30.0, &fast).unwrap();
    for (j, &x) in fast.points().iter().enumerate() {
        let y = eps * (x - 30.0);
        let target = if (-20.0..20.0).contains(&y) { sech2(y) } else { 0.0 };
        assert!((out.values()[j] - target).abs() < 1e-12);
    }
}

#[test]
fn line_energies_follow_the_slow_scaling() {
    // f = exp(-x^2): int f^2 = int f'^2 = sqrt(pi / 2).
    let g = SpectralGrid::new(40.0, 512).unwrap();
    let f = RealField::from_fn(g, |x| (-x * x).exp()).unwrap();
    let (eps, s) = (0.1, 3.0);
    let e = line_energies(&f, s, eps, 1).unwrap();
    let c = (PI / 2.0).sqrt();
    assert!((e[0] - s * s * eps * c).abs() < 1e-12);
    assert!((e[1] - s * s / eps * c).abs() < 1e-10);
}

#[test]
fn line_norms_of_built_data_match_slow_norms() {
    let g = slow_grid();
    let fast = SpectralGrid::new(512.0, 4096).unwrap();
    let eps = 0.1;
    let (n0, w0) = fields(g, 0.7);
    let s = build_initial_data(&n0, &w0, eps, &fast).unwrap();
    let ln = line_norms(&madelung(&s, VACUUM_FLOOR).unwrap(), eps, 2).unwrap();
    let slow_h2 = |f: &RealField| {
        deriv_stack(f, 2)
            .unwrap()
            .iter()
            .map(|d| d.values().iter().map(|v| v * v).sum::<f64>() * g.spacing())
            .sum::<f64>()
            .sqrt()
    };
    assert!((ln.hk_n - slow_h2(&n0)).abs() <= 1e-8 * slow_h2(&n0));
    assert!((ln.hk_dtheta - slow_h2(&w0)).abs() <= 1e-8 * slow_h2(&w0));
    // M-norm of sech^2 is its integral, 2; of 0.7 sech^2 it is 1.4.
    assert!((ln.m_norm_n - 2.0).abs() <= 1e-8);
    assert!((ln.m_norm_dtheta - 1.4).abs() <= 1e-8);
    let d3 = deriv(&deriv_stack(&n0, 2).unwrap()[2], 1).unwrap();
    let e3 = (d3.values().iter().map(|v| v * v).sum::<f64>() * g.spacing()).sqrt();
    assert!((ln.eps_dk1_n - eps * e3).abs() <= 1e-8 * eps * e3);
}

/// Slow frame built directly from analytic `N`, `dTheta` on a periodic window.
fn synthetic_frame(g: SpectralGrid, eps: f64, frame: Frame, n: &RealField, d: &RealField) -> SlowFrame {
    let n_jets = deriv_stack(n, JET_ORDER).unwrap();
    let dtheta_jets = deriv_stack(d, JET_ORDER).unwrap();
    let ts = frame.theta_sign();
    let u = n.zip_with(d, |a, b| 0.5 * (a + ts * b)).unwrap();
    let v = n.zip_with(d, |a, b| 0.5 * (a - ts * b)).unwrap();
    let v_primitive = spectral_antiderivative(&v, g.origin()).unwrap();
    let theta = spectral_antiderivative(d, g.origin()).unwrap();
    SlowFrame {
        epsilon: eps,
        frame,
        tau: 0.0,
        time: 0.0,
        grid: g,
        n: n.clone(),
        theta,
        dtheta: d.clone(),
        u,
        v,
        n_jets,
        dtheta_jets,
        v_primitive,
    }
}

#[test]
fn interaction_terms_vanish_without_a_second_wave() {
    let g = slow_grid();
    let fast = SpectralGrid::new(512.0, 4096).unwrap();
    let (n0, _) = fields(g, 0.0);
    let s = build_initial_data(&n0, &n0, 0.1, &fast).unwrap();
    let sf = extract_slow_frame(&s, 0.1, Frame::Minus, &g).unwrap();
    assert!(sf.v.max_abs() <= 1e-8);
    let t = interaction_terms(&sf, None).unwrap();
    assert!(t.big_f.max_abs() <= 1e-6);
    // f carries three slow derivatives of the resampled V, each costing a factor 1/eps.
    assert!(t.f.max_abs() <= 1e-5);

    let sf = synthetic_frame(g, 0.1, Frame::Minus, &n0, &n0);
    let t = interaction_terms(&sf, None).unwrap();
    assert_eq!(t.big_f.max_abs(), 0.0);
    assert_eq!(t.f.max_abs(), 0.0);
}

#[test]
fn constant_fields_have_no_remainder() {
    let g = slow_grid();
    let n = RealField::from_fn(g, |_| 0.8).unwrap();
    let d = RealField::from_fn(g, |_| -0.3).unwrap();
    let t = interaction_terms(&synthetic_frame(g, 0.2, Frame::Plus, &n, &d), None).unwrap();
    assert!(t.r.max_abs() < 1e-14);
    assert!(t.f.max_abs() < 1e-14);
    assert!(t.g.max_abs() < 1e-14);
}

#[test]
fn f_matches_finite_differences() {
    let g = slow_grid();
    let hx = g.spacing();
    let n = RealField::from_fn(g, |x| sech2(x) + 0.5 * sech2(x + 3.0)).unwrap();
    let d = RealField::from_fn(g, |x| 0.4 * sech2(x - 2.0)).unwrap();
    let sf = synthetic_frame(g, 0.1, Frame::Minus, &n, &d);
    let t = interaction_terms(&sf, None).unwrap();
    let big = t.big_f.values();
    let len = big.len();
    let fd: Vec<f64> = (0..len)
        .map(|i| (big[(i + 1) % len] - big[(i + len - 1) % len]) / (2.0 * hx))
        .collect();
    let fd = RealField::new(g, fd).unwrap();
    let f3 = deriv(&deriv(&deriv(&t.big_f, 1).unwrap(), 1).unwrap(), 1).unwrap();
    // Central-difference truncation h^2 F''' / 6.
    assert!(max_diff(&t.f, &fd) <= hx * hx * f3.max_abs() / 6.0 * 1.1 + 1e-12);
}

#[test]
fn lowercase_terms_are_derivatives_of_uppercase() {
    let g = SpectralGrid::new(40.0, 512).unwrap();
    let n = RealField::from_fn(g, |x| sech2(x) + 0.5 * sech2(x + 3.0)).unwrap();
    let d = RealField::from_fn(g, |x| 0.4 * sech2(x - 2.0)).unwrap();
    for frame in Frame::BOTH {
        let sf = synthetic_frame(g, 0.2, frame, &n, &d);
        let t = interaction_terms(&sf, Some(-5.0)).unwrap();
        assert!(max_diff(&deriv(&t.big_f, 1).unwrap(), &t.f) <= 1e-10);
        assert!(max_diff(&deriv(&t.big_g, 1).unwrap(), &t.g) <= 1e-10);
        assert!(max_diff(&deriv(&t.big_r, 1).unwrap(), &t.r) <= 1e-10);
        assert_eq!(t.base_index, g.nearest_index(-5.0));
        assert!(t.upsilon.values()[t.base_index].abs() < 1e-15);
        let direct = spectral_antiderivative(&sf.v, g.x(t.base_index)).unwrap();
        assert!(max_diff(&t.upsilon, &direct) <= 1e-10);
    }
}

#[test]
fn interaction_terms_guard_their_inputs() {
    let g = slow_grid();
    let n = RealField::from_fn(g, |_| 200.0).unwrap();
    let d = RealField::zeros(g);
    let sf = synthetic_frame(g, 0.2, Frame::Minus, &n, &d);
    assert!(matches!(interaction_terms(&sf, None), Err(Error::Denominator { .. })));
    let sf = synthetic_frame(g, 0.2, Frame::Minus, &d, &d);
    assert!(interaction_terms(&sf, Some(50.0)).is_err());
}

#[test]
fn residuals_of_the_constant_state_vanish() {
    let g = slow_grid();
    let fast = SpectralGrid::new(512.0, 2048).unwrap();
    let eps = 0.1;
    for frame in Frame::BOTH {
        let series: Vec<_> = (0..4)
            .map(|i| {
                let s = GpState::new(ComplexField::constant(fast, 1.0.into()), 5.0 + i as f64);
                let sf = extract_slow_frame(&s, eps, frame, &g).unwrap();
                let t = interaction_terms(&sf, None).unwrap();
                (sf, t)
            })
            .collect();
        let r = slow_system_residuals(&series).unwrap();
        assert_eq!(r.len(), 2);
        for row in r {
            assert_eq!((row.kdv, row.transport, row.upsilon), (0.0, 0.0, 0.0));
        }
        assert!(slow_system_residuals(&series[..2]).is_err());
        let uneven = vec![series[0].clone(), series[1].clone(), series[3].clone()];
        assert!(slow_system_residuals(&uneven).is_err());
    }
}

#[test]
fn n_scale_value() {
    assert!((n_scale(0.1) - 600.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn frame_identities_hold(eps in 0.1..0.5f64, w in -1.0..1.0f64, t in 0.0..20.0f64) {
        let g = slow_grid();
        let fast = SpectralGrid::new(1024.0, 4096).unwrap();
        let (n0, w0) = fields(g, w);
        let mut s = build_initial_data(&n0, &w0, eps, &fast).unwrap();
        s.time = t;
        for frame in Frame::BOTH {
            let sf = extract_slow_frame(&s, eps, frame, &g).unwrap();
            let ts = frame.theta_sign();
            for i in 0..g.n_points() {
                let (n, d, u, v) = (sf.n.values()[i], sf.dtheta.values()[i], sf.u.values()[i], sf.v.values()[i]);
                prop_assert!((u + v - n).abs() <= 1e-10);
                prop_assert!((u - v - ts * d).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn slow_and_fast_time_round_trip(eps in 0.01..1.0f64, tau in 0.0..10.0f64) {
        let back = slow_time(eps, fast_time(eps, tau));
        prop_assert!((back - tau).abs() <= 1e-12 * tau.max(1.0));
    }
}

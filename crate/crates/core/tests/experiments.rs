use std::fs;

use gpkdv::bridge::Frame;
use gpkdv::experiments::{
    build_preset, csv_table, fit_orders, fmt_f64, kdv_convergence_study, preset_info, presets,
    sample_times, summarize_bounds, unidirectional_study, write_report, Check, ErrorRow, GridSpec,
    PresetSpec, StudyConfig, StudyReport,
};
use gpkdv::SpectralGrid;
use proptest::prelude::*;

/// A sweep small enough for the unit-test budget.
fn small_config() -> StudyConfig {
    StudyConfig {
        epsilons: vec![0.5, 0.4, 0.3],
        tau_final: 0.05,
        tau_samples: 6,
        k: vec![0, 1],
        preset: PresetSpec {
            width: 1.5,
            ..PresetSpec::named("sech2")
        },
        fast_grid: GridSpec::centered(256.0, 1024),
        slow_grid: GridSpec::centered(40.0, 256),
        gp_dt: 0.02,
        kdv_dtau: 1e-4,
        ..StudyConfig::default()
    }
}

fn report_files(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timings.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn default_config_is_valid_and_round_trips() {
    let cfg = StudyConfig::default();
    cfg.validate().unwrap();
    assert_eq!(StudyConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    small_config().validate().unwrap();
}

#[test]
fn config_validation() {
    let mut c = small_config();
    c.epsilons = vec![0.3, 0.4];
    assert!(c.validate().is_err());
    let mut c = small_config();
    c.k = vec![5];
    assert!(c.validate().is_err());
    let mut c = small_config();
    c.tau_final = 5.0;
    assert!(c.validate().is_err());
    let mut c = small_config();
    c.version = 99;
    assert!(c.validate().is_err());
    assert!(StudyConfig::from_json("{\"epsilons\": [0.1]}").is_err());
    let mut v: serde_json::Value = serde_json::from_str(&small_config().to_json()).unwrap();
    v["unknown"] = 1.into();
    assert!(StudyConfig::from_json(&v.to_string()).is_err());
}

#[test]
fn sample_times_are_uniform() {
    assert_eq!(sample_times(1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(sample_times(1.0, 1), vec![0.0]);
}

#[test]
fn every_listed_preset_builds() {
    let g = SpectralGrid::new(80.0, 512).unwrap();
    for p in presets() {
        assert_eq!(preset_info(p.name).unwrap().name, p.name);
        let spec = PresetSpec::named(p.name);
        match p.name {
            "dark-soliton" => assert!(build_preset(&spec, g, 0).is_err()),
            _ => {
                let (n, w) = build_preset(&spec, g, 2).unwrap();
                assert_eq!(n.grid(), &g);
                assert_eq!(w.grid(), &g);
            }
        }
    }
    assert!(preset_info("nope").is_err());
}

#[test]
fn copropagating_preset_has_no_counter_wave() {
    let g = SpectralGrid::new(80.0, 512).unwrap();
    let (n, w) = build_preset(&PresetSpec::named("copropagating"), g, 0).unwrap();
    assert_eq!(n, w);
}

#[test]
fn perturbed_preset_has_the_requested_counter_wave() {
    let g = SpectralGrid::new(80.0, 512).unwrap();
    let spec = PresetSpec {
        perturbation: 0.25,
        ..PresetSpec::named("perturbed")
    };
    let (n, w) = build_preset(&spec, g, 2).unwrap();
    let v = n.zip_with(&w, |a, b| 0.5 * (a - b)).unwrap();
    assert!((gpkdv::spectral::sobolev_norm(&v, 2).unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn checks_compare_inclusively() {
    assert!(Check::within("a", 1.7, (1.7, 2.3)).pass);
    assert!(!Check::within("a", 2.31, (1.7, 2.3)).pass);
    assert!(Check::at_most("b", 2.0, 2.0).pass);
    assert!(!Check::at_most("b", f64::NAN, 2.0).pass);
}

#[test]
fn number_format_round_trips() {
    for x in [0.0, 1.5, -2.25e-7, 3e12, 1e-4, 123456.789, f64::MIN_POSITIVE] {
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
    assert_eq!(fmt_f64(0.5), "0.5");
    assert_eq!(fmt_f64(2.5e-7), "2.5e-7");
}

#[test]
fn csv_table_layout() {
    let t = csv_table(&["a", "b"], vec![vec!["1".into(), "2".into()]]);
    assert_eq!(t, "a,b\n1,2\n");
    assert_eq!(csv_table(&["a", "b"], Vec::<Vec<String>>::new()), "a,b\n");
}

#[test]
fn empty_sweep_writes_headers_only() {
    let cfg = StudyConfig {
        epsilons: vec![],
        ..small_config()
    };
    let out = kdv_convergence_study(&cfg, 1).unwrap();
    assert!(out.runs.is_empty());
    assert!(out.report.errors.is_empty());
    let dir = tempfile::tempdir().unwrap();
    write_report(&out, dir.path()).unwrap();
    let errors = fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    assert_eq!(errors, "epsilon,tau,frame,k,hk_error,cumulative\n");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["errors"].as_array().unwrap().len(), 0);
    assert_eq!(summary["drift"].as_array().unwrap().len(), 0);
    let timings: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("timings.json")).unwrap()).unwrap();
    assert_eq!(timings.as_array().unwrap().len(), 0);
}

#[test]
fn small_convergence_sweep() {
    let cfg = small_config();
    let out = kdv_convergence_study(&cfg, 2).unwrap();
    let r = &out.report;
    assert_eq!(out.runs.len(), 3);
    assert_eq!(r.errors.len(), 3 * 6 * 2 * 2);
    for row in &r.errors {
        assert!(row.hk_error >= 0.0 && row.cumulative >= 0.0);
        if row.tau == 0.0 {
            assert!(row.hk_error <= 1e-8, "{row:?}");
            assert_eq!(row.cumulative, 0.0);
        }
    }
    // The cumulative error never decreases along a run.
    for eps in &cfg.epsilons {
        for frame in Frame::BOTH {
            for &k in &cfg.k {
                let series: Vec<f64> = r
                    .errors
                    .iter()
                    .filter(|e| e.epsilon == *eps && e.frame == frame && e.k == k)
                    .map(|e| e.cumulative)
                    .collect();
                assert!(series.windows(2).all(|w| w[1] >= w[0]));
            }
        }
    }
    for frame in Frame::BOTH {
        let p = r.final_order(frame, 0).unwrap();
        assert!(p.is_finite() && p > 0.0, "{p}");
    }
    assert_eq!(r.drift.len(), 3);
    // Coarse fast step: conservation is only good to a few parts in 1e4 here.
    assert!(r.drift.iter().all(|d| d.max() < 1e-3), "{:?}", r.drift);
    assert!(!r.bounds.rows.is_empty());

    let back = StudyReport::from_json(&r.to_json()).unwrap();
    assert_eq!(&back, r);

    let dir = tempfile::tempdir().unwrap();
    write_report(&out, dir.path()).unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let row = &summary["errors"][0];
    for key in ["epsilon", "tau", "frame", "hk_error"] {
        assert!(!row[key].is_null(), "{key}");
    }
    assert!(summary["fits"][0]["fitted_order"].is_number());
    let header = fs::read_to_string(dir.path().join("fits.csv")).unwrap();
    assert!(header.lines().next().unwrap().contains("fitted_order"));

    // Same config, different worker count: identical bytes.
    let again = kdv_convergence_study(&cfg, 1).unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    write_report(&again, dir2.path()).unwrap();
    assert_eq!(report_files(dir.path()), report_files(dir2.path()));
}

#[test]
fn unidirectional_sweep_starts_from_the_data() {
    let cfg = StudyConfig {
        epsilons: vec![0.5, 0.4],
        tau_samples: 3,
        preset: PresetSpec {
            width: 1.5,
            perturbation: 0.2,
            ..PresetSpec::named("perturbed")
        },
        ..small_config()
    };
    let out = unidirectional_study(&cfg, 1).unwrap();
    let r = &out.report;
    assert_eq!(r.study, "unidirectional");
    for row in r.errors.iter().filter(|e| e.tau == 0.0) {
        assert!(row.hk_error <= 1e-8);
    }
    // Frame minus: V(0) is the configured perturbation, normalized in the top norm.
    let kmax = *cfg.k.iter().max().unwrap();
    let (n, w) = build_preset(&cfg.preset, cfg.slow_grid.grid().unwrap(), kmax).unwrap();
    for v in r.v_norms.iter().filter(|v| v.tau == 0.0 && v.frame == Frame::Minus) {
        let v0 = n.zip_with(&w, |a, b| 0.5 * (a - b)).unwrap();
        let exact = gpkdv::spectral::sobolev_norm(&v0, v.k).unwrap();
        assert!((v.v_norm - exact).abs() <= 1e-6 * exact, "{} {exact}", v.v_norm);
    }
}

#[test]
fn dark_soliton_is_not_a_long_wave_preset() {
    let cfg = StudyConfig {
        preset: PresetSpec::named("dark-soliton"),
        ..small_config()
    };
    assert!(kdv_convergence_study(&cfg, 1).is_err());
}

#[test]
fn bound_summary_of_nothing() {
    let b = summarize_bounds(vec![]);
    assert!(b.rows.is_empty() && b.series.is_empty() && b.slopes.is_empty());
}

fn rows_for(errs: &[f64], eps: &[f64], scale: f64) -> Vec<ErrorRow> {
    eps.iter()
        .zip(errs)
        .map(|(&e, &v)| ErrorRow {
            epsilon: e,
            tau: 0.3,
            frame: Frame::Minus,
            k: 0,
            hk_error: scale * v,
            cumulative: 0.0,
        })
        .collect()
}

#[test]
fn order_fit_recovers_a_power_law() {
    let eps = [0.2, 0.141, 0.1];
    let errs: Vec<f64> = eps.iter().map(|e: &f64| 3.0 * e.powi(2)).collect();
    let fits = fit_orders(&rows_for(&errs, &eps, 1.0), &eps, &[0.0, 0.3], &[0]);
    assert_eq!(fits.len(), 1);
    assert!((fits[0].fitted_order - 2.0).abs() < 1e-12);
    assert!((fits[0].r_squared - 1.0).abs() < 1e-12);
    assert!(fit_orders(&rows_for(&errs[..2], &eps[..2], 1.0), &eps[..2], &[0.3], &[0]).is_empty());
}

proptest! {
    #[test]
    fn order_fit_is_invariant_under_rescaling(
        errs in prop::collection::vec(1e-6..1.0f64, 3),
        scale in 1e-3..1e3f64,
    ) {
        let eps = [0.2, 0.141, 0.1];
        let a = fit_orders(&rows_for(&errs, &eps, 1.0), &eps, &[0.3], &[0]);
        let b = fit_orders(&rows_for(&errs, &eps, scale), &eps, &[0.3], &[0]);
        prop_assert!((a[0].fitted_order - b[0].fitted_order).abs() <= 1e-9 * a[0].fitted_order.abs().max(1.0));
    }
}

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gpkdv::bridge::{build_initial_data, extract_slow_frame, fast_time, Frame};
use gpkdv::experiments::{
    build_preset, kdv_convergence_study, presets, residual_study, unidirectional_study,
    wave_limit_study, write_report, write_residual_report, write_wave_report, Check, StudyConfig,
};
use gpkdv::gp::{dark_soliton, invariant_log_csv, invariant_record, GpSolver, GpSolverConfig, GpState};
use gpkdv::kdv::{kdv_invariants, kdv_log_row, KdvConfig, KdvSign, KdvSolver, KdvState, KDV_LOG_HEADER};
use gpkdv::snapshot::{read_snapshot, write_snapshot, Snapshot, SnapshotData};
use gpkdv::{ComplexField, Error, ErrorKind};

/// Long-wave GP to KdV study driver.
#[derive(Debug, Parser)]
#[command(name = "gpkdv", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON study configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (falls back to the config, then $GPKDV_OUT, then ./out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for epsilon sweeps.
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    workers: usize,

    /// Override the preset name.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,

    /// Run a single epsilon instead of the configured list.
    #[arg(long, global = true, value_name = "X")]
    epsilon: Option<f64>,

    /// Print progress and check results to standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve GP initial data and log its invariants.
    SimulateGp,
    /// Evolve the slow KdV initial data of frame minus.
    SimulateKdv,
    /// Two-wave KdV convergence sweep.
    Convergence,
    /// One-way KdV convergence sweep.
    Unidirectional,
    /// Comparison with the free wave equation.
    WaveLimit,
    /// Time-step refinement of the slow-system residuals.
    Residuals,
    /// Invariants of a stored snapshot.
    Invariants {
        /// Snapshot file.
        snapshot: PathBuf,
    },
    /// Header and summary statistics of a stored snapshot.
    Inspect {
        /// Snapshot file.
        snapshot: PathBuf,
    },
    /// List the built-in presets.
    Presets,
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Validation => 1,
        ErrorKind::Numerical => 2,
        ErrorKind::Io => 3,
    }
}

fn load_config(cli: &Cli) -> gpkdv::Result<StudyConfig> {
    let mut cfg = match &cli.config {
        Some(path) => StudyConfig::load(path)?,
        None => StudyConfig::default(),
    };
    if let Some(p) = &cli.preset {
        cfg.preset.name = p.clone();
    }
    if let Some(e) = cli.epsilon {
        cfg.epsilons = vec![e];
        cfg.wave.epsilon = e;
        cfg.residual.epsilon = e;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: &StudyConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os("GPKDV_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn report_checks(cli: &Cli, checks: &[Check]) {
    if cli.verbose == 0 {
        return;
    }
    for c in checks {
        eprintln!(
            "{} {} = {}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.value
        );
    }
}

fn note(cli: &Cli, msg: impl AsRef<str>) {
    if cli.verbose > 0 {
        eprintln!("{}", msg.as_ref());
    }
}

fn gp_initial(cfg: &StudyConfig, eps: f64) -> gpkdv::Result<GpState> {
    let fast = cfg.fast_grid.grid()?;
    match cfg.preset.name.as_str() {
        "constant" => Ok(GpState::new(ComplexField::constant(fast, 1.0.into()), 0.0)),
        "dark-soliton" => dark_soliton(cfg.preset.speed, fast, 0.0, 0.0),
        _ => {
            let slow = cfg.slow_grid.grid()?;
            let (n0, w0) = build_preset(&cfg.preset, slow, 0)?;
            build_initial_data(&n0, &w0, eps, &fast)
        }
    }
}

fn labels(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn simulate_gp(cli: &Cli, cfg: &StudyConfig, dir: &Path) -> gpkdv::Result<()> {
    let eps = *cfg
        .epsilons
        .first()
        .ok_or_else(|| Error::Config("no epsilon configured".into()))?;
    let mut state = gp_initial(cfg, eps)?;
    let mut solver = GpSolver::new(*state.grid(), state.psi.twist(), GpSolverConfig::new(cfg.gp_dt))?;
    let t_final = fast_time(eps, cfg.tau_final);
    let label = format!("simulate-gp eps={eps}");
    let mut log = vec![invariant_record(&state)?];
    for tau in cfg.taus().into_iter().skip(1) {
        solver
            .advance(&mut state, fast_time(eps, tau))
            .map_err(|e| e.labelled(label.as_str()))?;
        log.push(invariant_record(&state)?);
    }
    note(cli, format!("{label}: reached t = {t_final} in {} steps", solver.steps()));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join("invariants.csv");
    std::fs::write(&csv, invariant_log_csv(&log)).map_err(|e| Error::io(&csv, e))?;
    let snap = Snapshot::complex(
        state.psi.clone(),
        state.time,
        labels(&[("preset", cfg.preset.name.clone()), ("epsilon", eps.to_string())]),
    );
    write_snapshot(&dir.join("gp_final.snap"), &snap)
}

fn simulate_kdv(cli: &Cli, cfg: &StudyConfig, dir: &Path) -> gpkdv::Result<()> {
    let eps = *cfg
        .epsilons
        .first()
        .ok_or_else(|| Error::Config("no epsilon configured".into()))?;
    let slow = cfg.slow_grid.grid()?;
    let fast = cfg.fast_grid.grid()?;
    let (n0, w0) = build_preset(&cfg.preset, slow, 0)?;
    let gp = build_initial_data(&n0, &w0, eps, &fast)?;
    let u0 = extract_slow_frame(&gp, eps, Frame::Minus, &slow)?.u;
    let mut solver = KdvSolver::new(slow, KdvSign::Forward, KdvConfig::new(cfg.kdv_dtau))?;
    let mut state = KdvState::new(u0, 0.0);
    let mut rows = vec![KDV_LOG_HEADER.to_string()];
    for tau in cfg.taus() {
        solver
            .advance(&mut state, tau)
            .map_err(|e| e.labelled("simulate-kdv"))?;
        rows.push(kdv_log_row(&state)?);
    }
    note(cli, format!("simulate-kdv: reached tau = {} in {} steps", state.tau, solver.steps()));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join("kdv_invariants.csv");
    std::fs::write(&csv, rows.join("\n") + "\n").map_err(|e| Error::io(&csv, e))?;
    let snap = Snapshot::real(
        state.u.clone(),
        state.tau,
        labels(&[("preset", cfg.preset.name.clone()), ("epsilon", eps.to_string())]),
    );
    write_snapshot(&dir.join("kdv_final.snap"), &snap)
}

fn invariants(path: &Path) -> anyhow::Result<String> {
    let snap = read_snapshot(path)?;
    let text = match snap.data {
        SnapshotData::Complex(psi) => {
            serde_json::to_string_pretty(&invariant_record(&GpState::new(psi, snap.header.time))?)?
        }
        SnapshotData::Real(u) => serde_json::to_string_pretty(&kdv_invariants(&u)?)?,
    };
    Ok(text)
}

fn inspect(path: &Path) -> anyhow::Result<String> {
    let snap = read_snapshot(path)?;
    let magnitudes: Vec<f64> = match &snap.data {
        SnapshotData::Real(u) => u.values().to_vec(),
        SnapshotData::Complex(psi) => psi.abs().into_values(),
    };
    let min = magnitudes.iter().copied().fold(f64::INFINITY, f64::min);
    let max = magnitudes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let value = serde_json::json!({
        "header": snap.header,
        "min": min,
        "max": max,
    });
    Ok(serde_json::to_string_pretty(&value)?)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Invariants { snapshot } => {
            println!("{}", invariants(snapshot)?);
            return Ok(());
        }
        Command::Inspect { snapshot } => {
            println!("{}", inspect(snapshot)?);
            return Ok(());
        }
        Command::Presets => {
            for p in presets() {
                println!("{:<14} {}\n{:<14} hypothesis: {}", p.name, p.description, "", p.hypothesis);
            }
            return Ok(());
        }
        _ => {}
    }
    let cfg = load_config(cli)?;
    let dir = out_dir(cli, &cfg);
    match &cli.command {
        Command::SimulateGp => simulate_gp(cli, &cfg, &dir)?,
        Command::SimulateKdv => simulate_kdv(cli, &cfg, &dir)?,
        Command::Convergence | Command::Unidirectional => {
            let outcome = if matches!(cli.command, Command::Convergence) {
                kdv_convergence_study(&cfg, cli.workers)?
            } else {
                unidirectional_study(&cfg, cli.workers)?
            };
            report_checks(cli, &outcome.report.checks);
            write_report(&outcome, &dir)?;
        }
        Command::WaveLimit => {
            let outcome = wave_limit_study(&cfg, cli.workers)?;
            report_checks(cli, &outcome.report.checks);
            write_wave_report(&outcome, &dir)?;
        }
        Command::Residuals => {
            let outcome = residual_study(&cfg)?;
            report_checks(cli, &outcome.report.checks);
            write_residual_report(&outcome, &dir)?;
        }
        Command::Invariants { .. } | Command::Inspect { .. } | Command::Presets => unreachable!(),
    }
    note(cli, format!("wrote {}", dir.display()));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let kind = err
                .chain()
                .find_map(|c| c.downcast_ref::<Error>())
                .map_or(ErrorKind::Validation, Error::kind);
            eprintln!("error: {err}");
            ExitCode::from(exit_code(kind))
        }
    }
}

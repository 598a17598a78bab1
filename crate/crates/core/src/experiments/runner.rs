use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{invariant_record, GpSolver, GpSolverConfig, GpState, InvariantRecord};

/// Relative change of each conserved quantity over one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub epsilon: f64,
    pub t_final: f64,
    pub energy: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub m_plus: f64,
    pub m_minus: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        (b - a).abs()
    } else {
        ((b - a) / a).abs()
    }
}

impl DriftRow {
    pub fn between(epsilon: f64, start: &InvariantRecord, end: &InvariantRecord) -> Self {
        Self {
            epsilon,
            t_final: end.t,
            energy: rel(start.e, end.e),
            e2: rel(start.e2, end.e2),
            e3: rel(start.e3, end.e3),
            e4: rel(start.e4, end.e4),
            m_plus: rel(start.m_plus, end.m_plus),
            m_minus: rel(start.m_minus, end.m_minus),
        }
    }

    pub fn max(&self) -> f64 {
        [self.energy, self.e2, self.e3, self.e4, self.m_plus, self.m_minus]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Cost of one GP run; kept out of the deterministic report files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub epsilon: f64,
    pub t_final: f64,
    pub steps: usize,
    pub wall_seconds: f64,
}

/// Evolves `state` through the increasing fast `times`, calling `hook` at each one.
pub(crate) fn drive_gp(
    label: &str,
    epsilon: f64,
    mut state: GpState,
    dt: f64,
    times: &[f64],
    mut hook: impl FnMut(&GpState, usize) -> Result<()>,
) -> Result<(RunSummary, DriftRow)> {
    let clock = Instant::now();
    let wrap = |e: Error| e.labelled(label);
    let mut solver =
        GpSolver::new(*state.grid(), state.psi.twist(), GpSolverConfig::new(dt)).map_err(wrap)?;
    let start = invariant_record(&state).map_err(wrap)?;
    for (i, &t) in times.iter().enumerate() {
        solver.advance(&mut state, t).map_err(wrap)?;
        hook(&state, i).map_err(wrap)?;
    }
    let end = invariant_record(&state).map_err(wrap)?;
    Ok((
        RunSummary {
            label: label.to_string(),
            epsilon,
            t_final: state.time,
            steps: solver.steps(),
            wall_seconds: clock.elapsed().as_secs_f64(),
        },
        DriftRow::between(epsilon, &start, &end),
    ))
}

/// Runs `job` for every item on a pool of `workers` threads; results keep input order.
pub(crate) fn sweep<I: Sync, T: Send>(
    items: &[I],
    workers: usize,
    job: impl Fn(&I) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&job).collect())
}

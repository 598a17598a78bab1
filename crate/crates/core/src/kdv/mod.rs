//! Korteweg-de Vries integration on the slow periodic window.

mod invariants;
mod solver;

pub use invariants::{
    gap_equation_residual, kdv_invariants, kdv_log_row, kdv_soliton, kdv_soliton_residual,
    stability_gap, GapReport, KdvInvariants, KDV_LOG_HEADER, SOLITON_EDGE_LIMIT,
};
pub use solver::{evolve_kdv, KdvConfig, KdvSign, KdvSolver, KdvState};

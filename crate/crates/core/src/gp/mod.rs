//! Gross-Pitaevskii dynamics with non-zero condition at infinity.

mod hydro;
mod invariants;
mod soliton;
mod solver;

pub use hydro::{madelung, mass_flux_residual, HydroFields, VACUUM_FLOOR};
pub use invariants::{
    energy, generalized_mass, higher_invariants, invariant_log_csv, invariant_record,
    HigherInvariants, InvariantRecord, MassReport, FAR_FIELD_FRACTION, INVARIANT_LOG_HEADER,
    MASS_TOLERANCE,
};
pub use soliton::{
    dark_soliton, dark_soliton_energy, dark_soliton_profile, dark_soliton_residual,
    dark_soliton_twist,
};
pub use solver::{evolve_gp, GpSolver, GpSolverConfig, GpState};

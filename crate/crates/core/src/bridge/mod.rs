//! Maps between the fast GP variables and the slow KdV frames.

mod frame;
mod line;
mod terms;

pub use frame::{
    build_initial_data, extract_slow_frame, fast_time, max_window_time, rescaled_energy,
    slow_time, slow_to_fast, Frame, SlowFrame, JET_ORDER,
};
pub use line::{
    dtheta_scale, line_energies, line_norms, line_sobolev_norm, n_scale, LineNorms,
};
pub use terms::{interaction_terms, slow_system_residuals, InteractionTerms, ResidualNorms};

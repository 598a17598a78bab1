//! Parameter sweeps over epsilon and their reports.

mod bounds;
mod config;
mod convergence;
mod presets;
mod report;
mod residuals;
mod runner;
mod wave;

pub use bounds::{summarize_bounds, BoundReport, BoundRow, BoundSeries, SlopeRow, BOUND_RATE_LIMIT};
pub use config::{
    sample_times, GridSpec, PresetSpec, ResidualSpec, StudyConfig, WaveSpec, CONFIG_VERSION,
};
pub use convergence::{
    fit_envelopes, fit_orders, fit_plateaus, kdv_convergence_study, unidirectional_study,
    EnvelopeFit, EpsilonConstant, EpsilonRatio, ErrorRow, OrderFit, PlateauFit, StudyKind,
    VNormRow, PLATEAU_MIN_V0,
};
pub use presets::{build_preset, preset_info, presets, PresetInfo};
pub use report::{
    csv_table, errors_csv, fits_csv, fmt_f64, timings_json, write_files, write_report, Check,
    StudyOutcome, StudyReport, ENVELOPE_SPREAD_MAX, ORDER_RANGE, PLATEAU_SPREAD_MAX,
    REPORT_FORMAT, REPORT_VERSION, SLOPE_SPREAD_MAX,
};
pub use residuals::{
    residual_study, write_residual_report, ResidualOutcome, ResidualRatios, ResidualReport,
    ResidualRow, RESIDUAL_RATIO_RANGE,
};
pub use runner::{DriftRow, RunSummary};
pub use wave::{
    wave_limit_study, write_wave_report, ScalingPoint, WaveOutcome, WaveReport, WaveRow,
    WAVE_EXPONENT_RANGE, WAVE_LINEAR_R2_MIN,
};

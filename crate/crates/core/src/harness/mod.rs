//! Parametric studies, synthetic scenarios and derived quantities.

mod speed;
mod sweep;
mod synth;

pub use speed::{default_reference, estimate_group_speed, relative_times, speed_violations};
pub use sweep::{
    aic_window_sweep, alpha_beta_key, arrival_order, collapse, cutoff_sweep, flags, mer_sweep,
    sla_grid, tc_sweep, Bucket, CutoffPicker, SweepResult,
};
pub use synth::{
    contaminate, path_lengths, synthesize, trace_fundamentals, Fundamentals, PathLength,
    SourceSpec, SyntheticSetup,
};

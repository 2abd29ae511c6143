//! Configuration, seeded Monte Carlo sweeps and CSV output.

pub mod config;
pub mod ops;
pub mod output;
pub mod placement;
pub mod sweep;

pub use config::{
    Algorithm, ChannelModel, DeltaSetting, MSetting, Phi0Mode, Placement, SweepConfig, SweepValue, SweepVar,
};
pub use ops::{ops_count, DEFAULT_ETA};
pub use output::{emit_csv, read_csv, to_csv_string, SweepResult, SweepRow, HEADER};
pub use placement::{fixed_grid_placement, uniform_cr_placement};
pub use sweep::{apply_sweep_value, resolve_n, run_sweep, Observation, PointContext, THEORY_CYCLIC, THEORY_IMPROVED};

//! Run configuration, orchestration of solver runs on disk, comparison of
//! runs, and the dynamic sideband-growth probe.

mod compare;
mod config;
mod probe;
mod run;

pub use compare::{compare_runs, relative_errors, ComparisonReport};
pub use config::{ModelKind, RunConfig};
pub use probe::{fit_growth, sideband_amplitude, sideband_growth_probe, GrowthProbe};
pub use run::{
    initial_envelope, initial_surface, read_diagnostics, read_snapshot_index, resume, run,
    snapshot_path, DiagnosticsRow, RunSummary, CONFIG_FILE, DIAGNOSTICS_FILE, SNAPSHOT_DIR,
    SNAPSHOT_INDEX_FILE,
};

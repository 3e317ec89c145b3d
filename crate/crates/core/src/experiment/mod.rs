//! Presets, configuration, sweeps and their CSV/SVG output.

pub mod config;
pub mod output;
pub mod preset;
pub mod runs;

pub use config::{ConfigFile, RunConfig};
pub use output::{Cell, Table};
pub use preset::{preset, Preset, PRESETS};
pub use runs::{
    run_bandwidth_scan, run_population_demo, run_sweep, BandwidthScan, PopulationRow, SweepResult,
    SweepRow,
};

//! Monte Carlo simulation layer: configuration, the per-trial pipeline
//! (channel draw → beam acquisition → candidate search → digital design →
//! metrics), parameter sweeps, and CSV output.

pub mod config;
pub mod output;
pub mod sweep;
pub mod trial;

pub use config::SystemConfig;
pub use output::{write_csv, write_csv_file, CSV_COLUMNS};
pub use sweep::{expand_axes, run_sweep, Preset, ScenarioOverride, SweepVar};
pub use trial::{run_trial, run_trial_at, ScenarioPoint, TrialRecord};

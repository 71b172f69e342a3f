//! Library side of the `fdrelay` command: scenario files, sweeps, validation
//! runs, design queries and the figure presets.

pub mod design;
pub mod error;
pub mod presets;
pub mod spec;
pub mod sweep;
pub mod validate;

pub use design::{run_design, DesignKind, DesignQuery, DesignResult};
pub use error::{CliError, CliResult};
pub use presets::{lookup as lookup_preset, Preset};
pub use spec::{parse_config, ScenarioSpec};
pub use sweep::{run_sweep, write_series_csv, Axis, Coupling, Output, SweepResult, SweepSpec};
pub use validate::{run_validation, run_validation_with, ValidationReport, ValidationRow};

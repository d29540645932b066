//! Config-driven jobs: parsing, rendering, measurement and file output.

pub mod config;
mod job;
pub mod output;
pub mod verify;

pub use config::{
    apply_override, expand_sweep, parse_config, parse_entries, serialize_config, spec_from_entries, Check, JobKind, JobSpec,
    ModelSpec, SweepAxis, SweepParam,
};
pub use job::{measure, render_job, run_job, JobReport, Rendered, METRICS_FILE};
pub use output::{Layer, Manifest, MetricsRow};
pub use verify::CheckLine;

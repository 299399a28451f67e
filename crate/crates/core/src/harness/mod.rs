//! Studies over ladders of boxes, the check registry and their file formats.

pub mod config;
pub mod study;
pub mod verify;

pub use config::{FugacityConfig, LabConfig, MethodConfig, OutputConfig, OutputFormat, StudyConfig};
pub use study::{
    converge_study, fugacity_set, lab_trace_scan, uniform_bound_scan, BulkRow, CheckOutcome, LabRow, PointRow, StudyResult, SupRow,
};
pub use verify::{check_names, verify_suite, VerifyReport};

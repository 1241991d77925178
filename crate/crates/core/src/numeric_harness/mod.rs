//! Finite-difference settings, check results and the suite registry.

mod check;
mod config;
mod suites;

pub use check::{CheckResult, ConfigEcho, Kind, Observed, ParamsEcho, Report, Status, Summary, SCHEMA_VERSION};
pub use config::{FDConfig, StepError};
pub use suites::{closed_forms, run_suite, run_suites, HarnessError, SuiteParams, SUITES};

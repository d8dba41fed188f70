//! Command-line verification harness: config in, report out.

pub mod config;
pub mod demo;
pub mod report;
pub mod run;

pub use config::{default_grid, load_config, read_config, Backend, CheckKind, RunConfig};
pub use demo::{demo_config, DemoCase};
pub use report::{write_report, CheckEntry, ReportFormat, RunReport, RunStatus, Status};
pub use run::run;

/// Runs a validated config, turning structural errors into an error report.
pub fn run_to_report(cfg: &RunConfig) -> RunReport {
    run(cfg).unwrap_or_else(|e| RunReport::structural_error(cfg, &e))
}

//! Run reports: JSON and text rendering, exit codes.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::check::CheckReport;
use crate::error::{Error, Result};
use crate::numerics::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub level: usize,
    pub status: Status,
    pub residual: String,
    pub worst_point: Option<String>,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub check: String,
    pub status: Status,
    /// Max residual as a decimal string, `"0"` when exactly zero.
    pub residual: String,
    pub worst_point: Option<String>,
    pub first_failure: Option<String>,
    pub samples: usize,
    pub failures: usize,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn status_of<S>(r: &CheckReport<S>) -> Status {
    if r.failures > 0 {
        Status::Fail
    } else if r.samples == 0 {
        Status::Skipped
    } else {
        Status::Pass
    }
}

impl CheckEntry {
    /// Entry for a check run once.
    pub fn single<S: Scalar>(r: CheckReport<S>, elapsed_ms: f64) -> Self {
        CheckEntry {
            check: r.name.clone(),
            status: status_of(&r),
            residual: r.max_residual.render(),
            worst_point: r.worst,
            first_failure: r.first_failure,
            samples: r.samples,
            failures: r.failures,
            elapsed_ms,
            levels: Vec::new(),
            notes: r.notes,
        }
    }

    /// Entry aggregating one report per level; the residual is the max over levels.
    pub fn per_level<S: Scalar>(name: &str, reports: Vec<(usize, CheckReport<S>)>, elapsed_ms: f64) -> Self {
        let mut worst: Option<(S, Option<String>)> = None;
        let mut first_failure = None;
        let (mut samples, mut failures) = (0, 0);
        let mut levels = Vec::with_capacity(reports.len());
        for (level, r) in reports {
            if r.samples > 0 && worst.as_ref().is_none_or(|(m, _)| r.max_residual > *m) {
                worst = Some((r.max_residual.clone(), r.worst.clone()));
            }
            if first_failure.is_none() {
                first_failure = r.first_failure.clone();
            }
            samples += r.samples;
            failures += r.failures;
            levels.push(LevelEntry {
                level,
                status: status_of(&r),
                residual: r.max_residual.render(),
                worst_point: r.worst,
                samples: r.samples,
                notes: r.notes,
            });
        }
        let status = if failures > 0 {
            Status::Fail
        } else if samples == 0 {
            Status::Skipped
        } else {
            Status::Pass
        };
        let (residual, worst_point) = match worst {
            Some((m, at)) => (m.render(), at),
            None => ("0".to_string(), None),
        };
        CheckEntry {
            check: name.to_string(),
            status,
            residual,
            worst_point,
            first_failure,
            samples,
            failures,
            elapsed_ms,
            levels,
            notes: Vec::new(),
        }
    }

    pub fn skipped(name: &str, note: impl Into<String>) -> Self {
        CheckEntry {
            check: name.to_string(),
            status: Status::Skipped,
            residual: "0".to_string(),
            worst_point: None,
            first_failure: None,
            samples: 0,
            failures: 0,
            elapsed_ms: 0.0,
            levels: Vec::new(),
            notes: vec![note.into()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub backend: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: RunConfig,
    pub checks: Vec<CheckEntry>,
}

impl RunReport {
    pub fn new(config: &RunConfig, checks: Vec<CheckEntry>) -> Self {
        let status = if checks.iter().any(|c| c.status == Status::Fail) {
            RunStatus::Fail
        } else {
            RunStatus::Pass
        };
        RunReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            backend: backend_name(config),
            status,
            error: None,
            config: config.clone(),
            checks,
        }
    }

    /// Report for a run aborted by a structural error.
    pub fn structural_error(config: &RunConfig, err: &Error) -> Self {
        RunReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            backend: backend_name(config),
            status: RunStatus::Error,
            error: Some(err.to_string()),
            config: config.clone(),
            checks: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            RunStatus::Pass => 0,
            RunStatus::Fail => 1,
            RunStatus::Error => 2,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let status = match self.status {
            RunStatus::Pass => "pass",
            RunStatus::Fail => "fail",
            RunStatus::Error => "error",
        };
        let _ = writeln!(out, "mgcd {}  backend={}  status={status}", self.version, self.backend);
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        if self.checks.is_empty() {
            return out;
        }
        let _ = writeln!(
            out,
            "{:<24} {:<8} {:>14} {:>10}  worst",
            "check", "status", "residual", "ms"
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<24} {:<8} {:>14} {:>10.1}  {}",
                c.check,
                c.status.as_str(),
                c.residual,
                c.elapsed_ms,
                c.worst_point.as_deref().unwrap_or("-")
            );
            for l in &c.levels {
                let _ = writeln!(
                    out,
                    "  l={:<20} {:<8} {:>14} {:>10}  {}",
                    l.level,
                    l.status.as_str(),
                    l.residual,
                    "",
                    l.worst_point.as_deref().unwrap_or("-")
                );
                for n in &l.notes {
                    let _ = writeln!(out, "    note: {n}");
                }
            }
            if let Some(f) = &c.first_failure {
                let _ = writeln!(out, "  first failure: {f}");
            }
            for n in &c.notes {
                let _ = writeln!(out, "  note: {n}");
            }
        }
        out
    }
}

fn backend_name(config: &RunConfig) -> String {
    match config.backend {
        super::config::Backend::Exact => "exact".into(),
        super::config::Backend::Float => "float".into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(Error::InvalidArgument(format!("unknown report format {other:?}"))),
        }
    }
}

impl ReportFormat {
    pub fn render(self, report: &RunReport) -> String {
        match self {
            ReportFormat::Json => report.to_json(),
            ReportFormat::Text => report.to_text(),
        }
    }
}

pub fn write_report(report: &RunReport, path: &Path, format: ReportFormat) -> Result<()> {
    let mut text = format.render(report);
    if !text.ends_with('\n') {
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

//! Run reports and exit-code mapping.

use std::collections::BTreeMap;

use dilatelab::dilation_data::{max_residual, overall_pass, ConditionReport};
use dilatelab::Error;
use serde::Serialize;
use serde_json::Value;

use crate::document::SchemaError;

pub const REPORT_SCHEMA: &str = "dilatelab/run-report/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Input,
    Numerical,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportError {
    pub kind: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointer: Option<String>,
}

impl From<SchemaError> for ReportError {
    fn from(e: SchemaError) -> Self {
        Self {
            kind: ErrorKind::Input,
            message: e.message,
            pointer: Some(e.pointer),
        }
    }
}

impl From<Error> for ReportError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::DimensionMismatch { .. }
            | Error::EntryCount { .. }
            | Error::NonFinite { .. }
            | Error::InvalidTolerance { .. }
            | Error::EmptyTuple
            | Error::NotCommuting { .. }
            | Error::NotContractive { .. }
            | Error::TooManyOperators { .. }
            | Error::InvalidSubset { .. }
            | Error::WrongSpace { .. }
            | Error::InvalidModelData { .. }
            | Error::InvalidArgument(_) => ErrorKind::Input,
            _ => ErrorKind::Numerical,
        };
        Self {
            kind,
            message: e.to_string(),
            pointer: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub input_name: String,
    pub pipeline: String,
    pub condition_reports: Vec<ConditionReport>,
    pub classifications: BTreeMap<String, Value>,
    /// Largest non-informational residual of each stage.
    pub residual_summary: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub seed: u64,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub artifacts: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ReportError>,
}

impl RunReport {
    pub fn new(input_name: impl Into<String>, pipeline: impl Into<String>, seed: u64) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            input_name: input_name.into(),
            pipeline: pipeline.into(),
            condition_reports: Vec::new(),
            classifications: BTreeMap::new(),
            residual_summary: BTreeMap::new(),
            verdict: Verdict::Pass,
            seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            artifacts: BTreeMap::new(),
            error: None,
        }
    }

    pub fn add_stage(&mut self, stage: &str, reports: Vec<ConditionReport>) {
        self.residual_summary.insert(stage.to_string(), max_residual(&reports));
        self.condition_reports.extend(reports);
    }

    pub fn classify(&mut self, key: &str, value: impl Serialize) {
        self.classifications
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn artifact(&mut self, key: &str, value: impl Serialize) {
        self.artifacts
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    /// Sets the verdict from the condition reports; an error always fails.
    pub fn finish(mut self) -> Self {
        self.verdict = if self.error.is_none() && overall_pass(&self.condition_reports) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn with_error(mut self, e: impl Into<ReportError>) -> Self {
        self.error = Some(e.into());
        self.finish()
    }

    /// 0 pass, 1 fail, 2 input error, 3 numerical error.
    pub fn exit_code(&self) -> u8 {
        match (&self.error, self.verdict) {
            (Some(e), _) if e.kind == ErrorKind::Input => 2,
            (Some(_), _) => 3,
            (None, Verdict::Pass) => 0,
            (None, Verdict::Fail) => 1,
        }
    }

    pub fn max_residual(&self) -> f64 {
        max_residual(&self.condition_reports)
    }
}

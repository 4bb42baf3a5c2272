//! Run reports: one JSON document per run with an explicit schema version.
//!
//! Field order is fixed by the struct definitions and floats are written in
//! shortest round-trip form, so equal runs give byte-identical files.
//! Non-finite residuals are written as the strings `"inf"`, `"-inf"` and `"nan"`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ConfigEcho;

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("report schema: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

mod lossless_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a float: {other}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepSummary {
    pub group_id: String,
    pub genus: usize,
    pub defect: f64,
    pub stabilizer_dim: usize,
    pub stabilizer_samples: usize,
    pub betti: [usize; 3],
    pub euler_characteristic: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Unit harmonic vector in cochain coordinates.
    pub xi: Vec<f64>,
    pub theta_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSummary {
    pub ball_radius: f64,
    pub homotopy_norm: f64,
    pub h1_dim: usize,
    pub z_dim: usize,
    pub nonsingular: bool,
    pub infinitesimal_action: f64,
    pub sampled_action: f64,
    /// Largest `|Theta|` over the polarized harmonic basis.
    pub momentum_max: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub name: String,
    #[serde(with = "lossless_float")]
    pub residual: f64,
    pub tolerance_name: String,
    pub tolerance: f64,
    /// `le` or `ge`.
    pub comparison: String,
    pub vacuous: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub index: usize,
    pub xi_norm: f64,
    pub from_cone: bool,
    pub theta_norm: f64,
    pub kept: bool,
    pub label: Option<usize>,
    pub polish_defect: Option<f64>,
    pub polish_iterations: Option<usize>,
    pub image_in_ball: Option<bool>,
    pub image_on_cone: Option<bool>,
    pub chart_momentum: Option<f64>,
    pub contradiction: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub count: usize,
    pub kept: usize,
    pub kept_fraction: f64,
    pub labels: usize,
    pub contradictions: usize,
    pub local_dimension: Option<usize>,
    pub min_label_separation: Option<f64>,
    pub cluster_radius: f64,
    pub separation_factor: f64,
    pub max_kept_polish_defect: Option<f64>,
    pub table: Vec<SampleRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub status: Status,
    pub error: Option<String>,
    pub config: ConfigEcho,
    pub rep: Option<RepSummary>,
    pub chart: Option<ChartSummary>,
    pub invariants: Vec<InvariantRecord>,
    pub samples: Option<SampleSummary>,
}

impl Report {
    pub fn new(command: &str, config: ConfigEcho) -> Self {
        Self {
            version: REPORT_VERSION.to_string(),
            command: command.to_string(),
            seed: config.seed,
            status: Status::Pass,
            error: None,
            config,
            rep: None,
            chart: None,
            invariants: Vec::new(),
            samples: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ReportError::Schema(e.to_string()))?;
        match value.get("version").and_then(|v| v.as_str()) {
            None => return Err(ReportError::Schema("missing version field".into())),
            Some(v) if v != REPORT_VERSION => {
                return Err(ReportError::Schema(format!(
                    "unsupported version {v}, expected {REPORT_VERSION}"
                )))
            }
            Some(_) => {}
        }
        serde_json::from_value(value).map_err(|e| ReportError::Schema(e.to_string()))
    }

    pub fn failed_invariants(&self) -> impl Iterator<Item = &InvariantRecord> {
        self.invariants.iter().filter(|r| !r.passed)
    }
}

pub fn write_report(report: &Report, path: &Path) -> Result<(), ReportError> {
    std::fs::write(path, report.to_json()).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_report(path: &Path) -> Result<Report, ReportError> {
    let text = std::fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Report::from_json(&text)
}

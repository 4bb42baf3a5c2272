//! Experiment configuration.
//!
//! The file is flat `key = value` text with bracketed arrays (TOML). Named
//! thresholds go under a `[tolerances]` table or as dotted keys
//! (`tolerances.cone = 1e-7`). Command-line overrides use the same syntax.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use moduli_core::{AlgebraElement, GroupId, LieContext, RepStrategy, Tolerances};

pub const DEFAULT_SUITE_SAMPLES: usize = 100;
pub const DEFAULT_TAYLOR_COCYCLES: usize = 20;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    group_id: String,
    genus: i64,
    #[serde(default)]
    central_target: Vec<f64>,
    #[serde(default)]
    central_twist: i64,
    rep_strategy: String,
    #[serde(default)]
    rep_file: Option<PathBuf>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    sample_count: i64,
    #[serde(default)]
    output_path: Option<PathBuf>,
    #[serde(default)]
    base_weights: Option<Vec<f64>>,
    #[serde(default)]
    suite_samples: Option<i64>,
    #[serde(default)]
    taylor_cocycles: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub group_id: GroupId,
    pub genus: usize,
    /// Coordinates of the central value in the basis of the center of the algebra.
    pub central_target: Vec<f64>,
    /// Index into the group's discrete central elements; the relator target
    /// is `exp(central value)` times that element.
    pub central_twist: usize,
    pub rep_strategy: RepStrategy,
    pub rep_file: Option<PathBuf>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub sample_count: usize,
    pub output_path: Option<PathBuf>,
    /// Per-generator weights of the base metric on 1-cochains.
    pub base_weights: Option<Vec<f64>>,
    pub suite_samples: usize,
    pub taylor_cocycles: usize,
}

/// The configuration as echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub group_id: String,
    pub genus: usize,
    pub central_target: Vec<f64>,
    pub central_twist: usize,
    pub rep_strategy: String,
    pub rep_file: Option<String>,
    pub seed: u64,
    pub sample_count: usize,
    pub base_weights: Option<Vec<f64>>,
    pub suite_samples: usize,
    pub taylor_cocycles: usize,
    pub tolerances: BTreeMap<String, f64>,
}

fn non_negative(name: &str, v: i64) -> Result<usize, ConfigError> {
    usize::try_from(v)
        .map_err(|_| ConfigError::Invalid(format!("{name} must be non-negative, got {v}")))
}

/// Merges `patch` into `base`, descending into tables.
fn merge(base: &mut toml::Table, patch: toml::Table) {
    for (k, v) in patch {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(p)) => merge(b, p),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Parses one `key=value` override. Values that are not valid TOML are
/// taken as bare strings, so `group_id=su2` works without quotes.
pub fn parse_override(text: &str) -> Result<toml::Table, ConfigError> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| ConfigError::Parse(format!("override `{text}` is not key=value")))?;
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() {
        return Err(ConfigError::Parse(format!(
            "override `{text}` has an empty key"
        )));
    }
    toml::from_str(&format!("{key} = {value}"))
        .or_else(|_| {
            toml::from_str(&format!(
                "{key} = {}",
                toml::Value::String(value.to_string())
            ))
        })
        .map_err(|e| ConfigError::Parse(format!("override `{text}`: {e}")))
}

impl ExperimentConfig {
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::parse(&text, overrides)?;
        if let (Some(file), Some(dir)) = (&config.rep_file, path.parent()) {
            if file.is_relative() {
                config.rep_file = Some(dir.join(file));
            }
        }
        Ok(config)
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        for o in overrides {
            merge(&mut table, parse_override(o)?);
        }
        let raw: RawConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        Self::validate(raw)
    }

    fn validate(raw: RawConfig) -> Result<Self, ConfigError> {
        let group_id: GroupId = raw
            .group_id
            .parse()
            .map_err(|e: moduli_core::LieError| ConfigError::Invalid(e.to_string()))?;
        let genus = non_negative("genus", raw.genus)?;
        if genus == 0 {
            return Err(ConfigError::Invalid("genus must be at least 1".into()));
        }
        let rep_strategy: RepStrategy = raw
            .rep_strategy
            .parse()
            .map_err(|e: moduli_core::Error| ConfigError::Invalid(e.to_string()))?;
        if rep_strategy == RepStrategy::FromFile && raw.rep_file.is_none() {
            return Err(ConfigError::Invalid(
                "rep_strategy from-file needs rep_file".into(),
            ));
        }
        let center = LieContext::new(group_id).center_basis().len();
        let central_target = if raw.central_target.is_empty() {
            vec![0.0; center]
        } else {
            raw.central_target
        };
        if central_target.len() != center {
            return Err(ConfigError::Invalid(format!(
                "central_target has {} coordinates but the center of {group_id} has dimension {center}",
                central_target.len()
            )));
        }
        let mut tolerances = Tolerances::default();
        for (k, v) in &raw.tolerances {
            tolerances.set(k, *v).map_err(ConfigError::Invalid)?;
        }
        if let Some(w) = &raw.base_weights {
            if w.len() != 2 * genus || w.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
                return Err(ConfigError::Invalid(format!(
                    "base_weights needs {} positive entries",
                    2 * genus
                )));
            }
        }
        Ok(Self {
            group_id,
            genus,
            central_target,
            central_twist: non_negative("central_twist", raw.central_twist)?,
            rep_strategy,
            rep_file: raw.rep_file,
            seed: raw.seed,
            tolerances,
            sample_count: non_negative("sample_count", raw.sample_count)?,
            output_path: raw.output_path,
            base_weights: raw.base_weights,
            suite_samples: non_negative(
                "suite_samples",
                raw.suite_samples.unwrap_or(DEFAULT_SUITE_SAMPLES as i64),
            )?,
            taylor_cocycles: non_negative(
                "taylor_cocycles",
                raw.taylor_cocycles
                    .unwrap_or(DEFAULT_TAYLOR_COCYCLES as i64),
            )?,
        })
    }

    /// Full algebra coordinates of the central value.
    pub fn central_value(&self, ctx: &LieContext) -> AlgebraElement {
        let mut x = AlgebraElement::zero(ctx.dim());
        for (&i, &v) in ctx.center_basis().iter().zip(&self.central_target) {
            x.coeffs[i] = v;
        }
        x
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            group_id: self.group_id.to_string(),
            genus: self.genus,
            central_target: self.central_target.clone(),
            central_twist: self.central_twist,
            rep_strategy: self.rep_strategy.to_string(),
            rep_file: self.rep_file.as_ref().map(|p| p.display().to_string()),
            seed: self.seed,
            sample_count: self.sample_count,
            base_weights: self.base_weights.clone(),
            suite_samples: self.suite_samples,
            taylor_cocycles: self.taylor_cocycles,
            tolerances: self
                .tolerances
                .iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "group_id = \"su2\"\ngenus = 2\nrep_strategy = \"trivial\"\n";

    #[test]
    fn defaults_and_center() {
        let c = ExperimentConfig::parse(BASE, &[]).unwrap();
        assert_eq!(c.group_id, GroupId::SU2);
        assert!(c.central_target.is_empty());
        assert_eq!(c.seed, 0);
        assert_eq!(c.suite_samples, DEFAULT_SUITE_SAMPLES);
        assert_eq!(c.tolerances, Tolerances::default());
    }

    #[test]
    fn overrides_apply_in_order() {
        let c = ExperimentConfig::parse(
            BASE,
            &[
                "genus=3".into(),
                "tolerances.cone=1e-6".into(),
                "group_id=u2".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.genus, 3);
        assert_eq!(c.tolerances.get("cone"), 1e-6);
        assert_eq!(c.group_id, GroupId::U2);
        assert_eq!(c.central_target, vec![0.0]);
    }

    #[test]
    fn tolerance_table_merges_with_override() {
        let text = format!("{BASE}[tolerances]\ncocycle = 1e-7\n");
        let c = ExperimentConfig::parse(&text, &["tolerances.cone=2e-8".into()]).unwrap();
        assert_eq!(c.tolerances.get("cocycle"), 1e-7);
        assert_eq!(c.tolerances.get("cone"), 2e-8);
    }

    #[test]
    fn rejects_bad_values() {
        for o in [
            "genus=0",
            "tolerances.cone=-1",
            "tolerances.nope=1",
            "sample_count=-3",
            "central_target=[1.0]",
        ] {
            assert!(
                matches!(
                    ExperimentConfig::parse(BASE, &[o.into()]),
                    Err(ConfigError::Invalid(_))
                ),
                "{o}"
            );
        }
        assert!(matches!(
            ExperimentConfig::parse(BASE, &["colour=3".into()]),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse(BASE, &["genus".into()]),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse(BASE, &["rep_strategy=from-file".into()]),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn central_value_lands_in_center() {
        let c =
            ExperimentConfig::parse(BASE, &["group_id=u2".into(), "central_target=[3.5]".into()])
                .unwrap();
        let ctx = LieContext::new(GroupId::U2);
        assert_eq!(
            c.central_value(&ctx).coeffs.as_slice(),
            &[3.5, 0.0, 0.0, 0.0]
        );
    }
}

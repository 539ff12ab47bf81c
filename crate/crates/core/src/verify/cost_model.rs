//! Cost models for the simulated executor.
//!
//! `exact` mode lists a time per pattern id; `multiplicative` mode scales a
//! base time by one multiplier per offloaded block.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    Exact,
    Multiplicative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    pub mode: CostMode,
    #[serde(default)]
    pub noise: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub entries: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub block_multipliers: BTreeMap<String, f64>,
}

#[derive(Debug, Error)]
pub enum CostModelError {
    #[error("cannot read cost model {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid cost model: {0}")]
    Invalid(String),
    #[error("cost model has no entry for pattern `{0}`")]
    UncoveredPattern(String),
}

impl CostModel {
    pub fn exact(entries: BTreeMap<String, f64>, noise: f64) -> Result<Self, CostModelError> {
        let m = CostModel {
            mode: CostMode::Exact,
            noise,
            base_seconds: None,
            entries,
            block_multipliers: BTreeMap::new(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn multiplicative(
        base_seconds: f64,
        multipliers: impl IntoIterator<Item = (usize, f64)>,
        noise: f64,
    ) -> Result<Self, CostModelError> {
        let m = CostModel {
            mode: CostMode::Multiplicative,
            noise,
            base_seconds: Some(base_seconds),
            entries: BTreeMap::new(),
            block_multipliers: multipliers
                .into_iter()
                .map(|(b, v)| (b.to_string(), v))
                .collect(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CostModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CostModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CostModelError> {
        let m: CostModel =
            serde_json::from_str(text).map_err(|e| CostModelError::Invalid(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), CostModelError> {
        let bad = |msg: String| Err(CostModelError::Invalid(msg));
        if !(0.0..1.0).contains(&self.noise) {
            return bad(format!("noise {} must be in [0, 1)", self.noise));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match self.mode {
            CostMode::Exact => {
                if let Some((k, v)) = self.entries.iter().find(|(_, v)| !positive(**v)) {
                    return bad(format!("entry `{k}` = {v} is not a positive time"));
                }
            }
            CostMode::Multiplicative => {
                match self.base_seconds {
                    Some(b) if positive(b) => {}
                    _ => return bad("multiplicative mode needs a positive base_seconds".into()),
                }
                for (k, v) in &self.block_multipliers {
                    if k.parse::<usize>().is_err() {
                        return bad(format!("block multiplier key `{k}` is not a block id"));
                    }
                    if !positive(*v) {
                        return bad(format!("multiplier for block {k} = {v} is not positive"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Noise-free time for the pattern identified by `key` that offloads `selected`.
    pub fn seconds(
        &self,
        key: &str,
        selected: impl IntoIterator<Item = usize>,
    ) -> Result<f64, CostModelError> {
        match self.mode {
            CostMode::Exact => self
                .entries
                .get(key)
                .copied()
                .ok_or_else(|| CostModelError::UncoveredPattern(key.to_string())),
            CostMode::Multiplicative => {
                let mut t = self.base_seconds.expect("validated");
                for b in selected {
                    let m = self
                        .block_multipliers
                        .get(&b.to_string())
                        .ok_or_else(|| CostModelError::UncoveredPattern(key.to_string()))?;
                    t *= m;
                }
                Ok(t)
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cost model serializes")
    }
}

//! Offload pattern search.
//!
//! Measures the all-CPU baseline, then each candidate block offloaded on its
//! own, then (when at least two singles beat the baseline) all of the
//! improving blocks together, and keeps the fastest measured pattern.

pub mod cost_model;
pub mod executor;
pub mod report;

pub use cost_model::{CostMode, CostModel, CostModelError};
pub use executor::{
    noisy_samples, real_measure, simulated_measure, CommandExecutor, Executor, ExecutorError,
    SimulatedExecutor,
};
pub use report::{format_sig, speedup_report, MissingBaseline, ReportRow};

use crate::replace::CandidateBlock;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

pub const DEFAULT_REPETITIONS: usize = 3;

/// A set of candidate block ids to run on the accelerator. Empty is the
/// all-CPU baseline.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OffloadPattern {
    selected: BTreeSet<usize>,
}

impl OffloadPattern {
    pub fn baseline() -> Self {
        OffloadPattern::default()
    }

    pub fn from_ids(ids: impl IntoIterator<Item = usize>) -> Self {
        OffloadPattern {
            selected: ids.into_iter().collect(),
        }
    }

    pub fn selected(&self) -> &BTreeSet<usize> {
        &self.selected
    }

    pub fn is_baseline(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.selected.contains(&id)
    }

    /// Sorted ids joined by `-`, or `base` for the empty pattern.
    pub fn id(&self) -> String {
        if self.selected.is_empty() {
            return "base".to_string();
        }
        self.selected
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }

    pub fn parse_id(s: &str) -> Option<Self> {
        if s == "base" {
            return Some(Self::baseline());
        }
        let ids = s
            .split('-')
            .map(|p| p.parse().ok())
            .collect::<Option<BTreeSet<usize>>>()?;
        Some(OffloadPattern { selected: ids })
    }

    /// Tie-break order: fewer blocks first, then lexicographically smaller ids.
    fn tie_key(&self) -> (usize, Vec<usize>) {
        (self.selected.len(), self.selected.iter().copied().collect())
    }
}

impl fmt::Display for OffloadPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl Serialize for OffloadPattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

impl<'de> Deserialize<'de> for OffloadPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        OffloadPattern::parse_id(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("bad pattern id `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub pattern: OffloadPattern,
    pub samples: Vec<f64>,
    pub stat: f64,
    pub executor_tag: String,
}

impl Measurement {
    pub fn new(
        pattern: OffloadPattern,
        samples: Vec<f64>,
        executor_tag: impl Into<String>,
    ) -> Self {
        let stat = median(&samples);
        Measurement {
            pattern,
            samples,
            stat,
            executor_tag: executor_tag.into(),
        }
    }
}

/// Median of a nonempty sample; the mean of the middle pair for even lengths.
pub fn median(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty(), "median of empty sample");
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("measuring pattern {pattern} failed: {source}")]
    ExecutorFailure {
        pattern: String,
        source: ExecutorError,
    },
    #[error("block {0} is neither an exact match nor approved")]
    IneligibleCandidate(usize),
    #[error("repetitions must be at least 1")]
    ZeroRepetitions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exploration {
    pub best: OffloadPattern,
    /// Every measurement taken, in execution order.
    pub report: Vec<Measurement>,
}

impl Exploration {
    pub fn best_measurement(&self) -> &Measurement {
        self.report
            .iter()
            .find(|m| m.pattern == self.best)
            .expect("best pattern was measured")
    }
}

/// Search offload patterns over eligible candidates.
pub fn explore(
    candidates: &[CandidateBlock],
    executor: &mut dyn Executor,
    repetitions: usize,
) -> Result<Exploration, ExploreError> {
    if let Some(c) = candidates.iter().find(|c| !c.is_eligible()) {
        return Err(ExploreError::IneligibleCandidate(c.block_id));
    }
    let ids: Vec<usize> = candidates.iter().map(|c| c.block_id).collect();
    explore_blocks(&ids, executor, repetitions)
}

/// [`explore`] over bare block ids, measured in the given order.
pub fn explore_blocks(
    block_ids: &[usize],
    executor: &mut dyn Executor,
    repetitions: usize,
) -> Result<Exploration, ExploreError> {
    if repetitions == 0 {
        return Err(ExploreError::ZeroRepetitions);
    }
    let mut report = Vec::with_capacity(block_ids.len() + 2);
    let mut measure =
        |pattern: OffloadPattern, report: &mut Vec<Measurement>| -> Result<f64, ExploreError> {
            let fail = |source| ExploreError::ExecutorFailure {
                pattern: pattern.id(),
                source,
            };
            let samples = executor.measure(&pattern, repetitions).map_err(fail)?;
            if samples.len() != repetitions {
                return Err(fail(ExecutorError::InvalidSamples(format!(
                    "expected {repetitions} samples, got {}",
                    samples.len()
                ))));
            }
            if let Some(bad) = samples.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
                return Err(fail(ExecutorError::InvalidSamples(format!(
                    "non-positive sample {bad}"
                ))));
            }
            let m = Measurement::new(pattern, samples, executor.tag());
            let stat = m.stat;
            report.push(m);
            Ok(stat)
        };

    let base = measure(OffloadPattern::baseline(), &mut report)?;
    let mut improving = Vec::new();
    for &id in block_ids {
        if measure(OffloadPattern::from_ids([id]), &mut report)? < base {
            improving.push(id);
        }
    }
    if improving.len() >= 2 {
        measure(OffloadPattern::from_ids(improving), &mut report)?;
    }

    let best = report
        .iter()
        .min_by(|a, b| {
            a.stat
                .total_cmp(&b.stat)
                .then_with(|| a.pattern.tie_key().cmp(&b.pattern.tie_key()))
        })
        .map(|m| m.pattern.clone())
        .expect("baseline is always measured");
    Ok(Exploration { best, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn exact_model(entries: &[(&str, f64)]) -> CostModel {
        CostModel::exact(
            entries
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect::<BTreeMap<_, _>>(),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn pattern_ids() {
        assert_eq!(OffloadPattern::baseline().id(), "base");
        assert_eq!(OffloadPattern::from_ids([3, 1]).id(), "1-3");
        assert_eq!(
            OffloadPattern::parse_id("1-3"),
            Some(OffloadPattern::from_ids([1, 3]))
        );
        assert_eq!(
            OffloadPattern::parse_id("base"),
            Some(OffloadPattern::baseline())
        );
        assert_eq!(OffloadPattern::parse_id("1-x"), None);
    }

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[7.0]), 7.0);
    }

    #[test]
    fn single_slower_block_keeps_baseline() {
        let model = exact_model(&[("base", 10.0), ("0", 12.0)]);
        let mut ex = SimulatedExecutor::new(model, 1);
        let r = explore_blocks(&[0], &mut ex, 3).unwrap();
        assert!(r.best.is_baseline());
        assert_eq!(r.report.len(), 2);
    }

    #[test]
    fn antagonistic_union_loses_to_best_single() {
        let model = exact_model(&[("base", 100.0), ("0", 70.0), ("1", 60.0), ("0-1", 80.0)]);
        let mut ex = SimulatedExecutor::new(model, 1);
        let r = explore_blocks(&[0, 1], &mut ex, 1).unwrap();
        assert_eq!(r.best, OffloadPattern::from_ids([1]));
        assert_eq!(r.report.len(), 4);
    }

    #[test]
    fn ties_prefer_fewer_blocks() {
        let model = exact_model(&[("base", 100.0), ("0", 50.0), ("1", 50.0), ("0-1", 50.0)]);
        let mut ex = SimulatedExecutor::new(model, 1);
        let r = explore_blocks(&[0, 1], &mut ex, 1).unwrap();
        assert_eq!(r.best, OffloadPattern::from_ids([0]));
        let model = exact_model(&[("base", 5.0), ("0", 5.0)]);
        let r = explore_blocks(&[0], &mut SimulatedExecutor::new(model, 1), 1).unwrap();
        assert!(r.best.is_baseline());
    }

    #[test]
    fn executor_failure_names_pattern() {
        let model = exact_model(&[("base", 100.0)]);
        let err = explore_blocks(&[0], &mut SimulatedExecutor::new(model, 1), 1).unwrap_err();
        match err {
            ExploreError::ExecutorFailure { pattern, .. } => assert_eq!(pattern, "0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_candidates_is_baseline() {
        let model = exact_model(&[("base", 1.0)]);
        let r = explore_blocks(&[], &mut SimulatedExecutor::new(model, 1), 2).unwrap();
        assert!(r.best.is_baseline());
        assert_eq!(r.report.len(), 1);
    }
}

//! Statistical estimators, preset experiment drivers, and their declarative
//! configuration. Presets fan independent seeded runs out over the fan-out
//! backend and merge results in key order, so outputs are reproducible
//! byte-for-byte for a given config.

pub mod balls_bins;
pub mod estimators;
pub mod output;
pub mod presets;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::evolving::InitPolicy;
use crate::sorters::{SorterKind, TimeSeriesRecord};

/// Declarative experiment description. Field defaults are the documented
/// preset defaults; presets derive budgets from `n` where a field is unset.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: String,
    pub n_list: Vec<usize>,
    pub alpha: usize,
    /// Swap rates covered by the round-invariant grid of `lemma-checks`.
    pub alpha_list: Vec<usize>,
    pub sorter: SorterKind,
    pub init: InitPolicy,
    /// Base seed; runs use `seed, seed+1, ..`.
    pub seed: u64,
    /// Number of seeds.
    pub seeds: u64,
    pub steps: Option<u64>,
    pub rounds: Option<u64>,
    pub sample_every: Option<u64>,
    /// Fraction of the step budget discarded before sampling. Unset uses the
    /// per-sorter defaults (half of 4n^2, or a quarter of 32 n log2 n).
    pub burn_in_fraction: Option<f64>,
    pub instrument: bool,
    /// Cadence of the periodic instrumented checks.
    pub check_every: u64,
    pub max_instrumented_n: usize,
    /// Occupancy/round-length constant.
    pub c: f64,
    pub trials: u64,
    /// Convergence threshold multiple: hit when `I <= beta * n`.
    pub beta: Option<f64>,
    /// Claimed lower bound on per-round good-swap fractions.
    pub epsilon: f64,
    /// Allowed relative change of median(I)/n between consecutive n.
    pub ratio_tolerance: f64,
    /// Allowed max/min spread of normalized hitting times across n.
    pub spread_factor: f64,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            preset: "simulate".to_string(),
            n_list: vec![64],
            alpha: 1,
            alpha_list: vec![0, 1, 2],
            sorter: SorterKind::RepeatedInsertion,
            init: InitPolicy::UniformRandom,
            seed: 1,
            seeds: 1,
            steps: None,
            rounds: None,
            sample_every: None,
            burn_in_fraction: None,
            instrument: false,
            check_every: 5,
            max_instrumented_n: 256,
            c: 3.0,
            trials: 1000,
            beta: None,
            epsilon: 3.0 / 20_000.0,
            ratio_tolerance: 0.5,
            spread_factor: 3.0,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds).map(|k| self.seed.wrapping_add(k)).collect()
    }

    /// Step budget for one run at a given n.
    pub fn budget_steps(&self, n: usize) -> u64 {
        self.steps.unwrap_or_else(|| match self.sorter {
            SorterKind::QuickThenInsertion => (32.0 * nlog2n(n)).ceil() as u64,
            _ => 4 * (n as u64) * (n as u64),
        })
    }

    /// Steps discarded before sampling starts.
    pub fn burn_in_steps(&self, n: usize) -> u64 {
        match self.burn_in_fraction {
            Some(f) => (f * self.budget_steps(n) as f64).round() as u64,
            None => match self.sorter {
                SorterKind::QuickThenInsertion => (8.0 * nlog2n(n)).ceil() as u64,
                _ => 2 * (n as u64) * (n as u64),
            },
        }
    }

    pub fn effective_sample_every(&self, n: usize) -> u64 {
        self.sample_every.unwrap_or(n as u64).max(1)
    }
}

pub(crate) fn nlog2n(n: usize) -> f64 {
    n as f64 * (n as f64).log2()
}

/// Machine-readable result of one preset invocation.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub metrics: BTreeMap<String, serde_json::Value>,
    pub violations: BTreeMap<String, u64>,
    pub pass: bool,
}

impl ExperimentSummary {
    pub fn new(config: ExperimentConfig) -> Self {
        let seeds = config.seed_list();
        Self {
            config,
            seeds,
            metrics: BTreeMap::new(),
            violations: BTreeMap::new(),
            pass: true,
        }
    }

    pub fn violation(&mut self, key: &str, count: u64) {
        *self.violations.entry(key.to_string()).or_insert(0) += count;
        if count > 0 {
            self.pass = false;
        }
    }

    pub fn metric<V: Serialize>(&mut self, key: &str, value: V) {
        self.metrics.insert(
            key.to_string(),
            serde_json::to_value(value).expect("metric serializes"),
        );
    }

    pub fn total_violations(&self) -> u64 {
        self.violations.values().sum()
    }
}

/// Summary plus any sampled series, ready for the output writers.
#[derive(Clone, Debug)]
pub struct PresetOutput {
    pub summary: ExperimentSummary,
    pub series: Vec<(String, Vec<TimeSeriesRecord>)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_toml_fields() {
        let config =
            ExperimentConfig::from_toml_str("preset = \"steady-state\"\nseeds = 4\n").unwrap();
        assert_eq!(config.preset, "steady-state");
        assert_eq!(config.seeds, 4);
        assert_eq!(config.alpha, 1);
        assert_eq!(config.seed_list(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn unknown_toml_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml_str("presett = \"x\"\n").is_err());
    }

    #[test]
    fn default_budgets_follow_the_sorter() {
        let mut config = ExperimentConfig::default();
        assert_eq!(config.budget_steps(64), 4 * 64 * 64);
        assert_eq!(config.burn_in_steps(64), 2 * 64 * 64);
        config.sorter = SorterKind::QuickThenInsertion;
        assert_eq!(config.budget_steps(64), (32.0 * nlog2n(64)).ceil() as u64);
        assert_eq!(config.burn_in_steps(64), (8.0 * nlog2n(64)).ceil() as u64);
        config.burn_in_fraction = Some(0.25);
        assert_eq!(
            config.burn_in_steps(64),
            (0.25 * config.budget_steps(64) as f64).round() as u64
        );
    }
}

//! Experiment configuration, read from TOML.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ingest::{load_csv, LabelColumn};
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::rankers::RankerConfig;
use crate::search::Strategy;
use crate::synthetic::SyntheticSpec;
use crate::types::Dataset;

/// A strategy as named in a configuration. Unlike [`Strategy`], plain RFE
/// is sized by the dataset it runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StrategySpec {
    Frfe,
    Ksrfe { k: usize },
    /// One feature removed per step.
    Rfe,
    RfeSteps { n_steps: usize },
}

impl StrategySpec {
    pub fn id(&self) -> String {
        match self {
            StrategySpec::Frfe => "frfe".into(),
            StrategySpec::Ksrfe { k } => format!("{k}-srfe"),
            StrategySpec::Rfe => "rfe".into(),
            StrategySpec::RfeSteps { n_steps } => format!("rfe@{n_steps}"),
        }
    }

    pub fn resolve(&self, n_features: usize) -> Strategy {
        match *self {
            StrategySpec::Frfe => Strategy::Frfe,
            StrategySpec::Ksrfe { k } => Strategy::Ksrfe { k },
            StrategySpec::Rfe => Strategy::RfeFixed { n_steps: n_features },
            StrategySpec::RfeSteps { n_steps } => Strategy::RfeFixed { n_steps },
        }
    }

    /// Identifier of the RFE baseline matched to this strategy's step count.
    pub fn baseline_id(&self) -> Option<String> {
        match self {
            StrategySpec::Frfe => Some("rfe-f".into()),
            StrategySpec::Ksrfe { k } => Some(format!("rfe-{k}")),
            _ => None,
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "rfe" {
            return Ok(StrategySpec::Rfe);
        }
        Ok(match s.parse::<Strategy>()? {
            Strategy::Frfe => StrategySpec::Frfe,
            Strategy::Ksrfe { k } => StrategySpec::Ksrfe { k },
            Strategy::RfeFixed { n_steps } => StrategySpec::RfeSteps { n_steps },
        })
    }
}

impl TryFrom<String> for StrategySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StrategySpec> for String {
    fn from(s: StrategySpec) -> String {
        s.id()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum DatasetSource {
    Csv {
        path: PathBuf,
        #[serde(default)]
        label: LabelColumn,
    },
    Synthetic {
        synthetic: SyntheticSpec,
        #[serde(default)]
        name: Option<String>,
    },
}

impl DatasetSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DatasetSource::Csv { path, label } => load_csv(path, label),
            DatasetSource::Synthetic { synthetic, name } => {
                let mut d = synthetic.generate()?;
                if let Some(name) = name {
                    d.name.clone_from(name);
                }
                Ok(d)
            }
        }
    }
}

fn default_rankers() -> Vec<RankerConfig> {
    vec![RankerConfig::default()]
}

fn default_folds() -> usize {
    5
}

fn default_repetitions() -> usize {
    10
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

fn default_alpha() -> f64 {
    0.05
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSource>,
    pub strategies: Vec<StrategySpec>,
    #[serde(default = "default_rankers")]
    pub rankers: Vec<RankerConfig>,
    /// Folds of the inner cross-validation that scores subsets.
    #[serde(default = "default_folds")]
    pub cv_k: usize,
    /// Folds of the outer split; repetition `r` tests on fold `r mod outer_k`
    /// of split `r / outer_k`.
    #[serde(default = "default_folds")]
    pub outer_k: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Score maximized by the inner cross-validation.
    #[serde(default)]
    pub metric: Metric,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Pair every FRFE and k-SRFE run with RFE over the same number of steps.
    #[serde(default = "yes")]
    pub baselines: bool,
    /// Write a trace and a curve file per run.
    #[serde(default = "yes")]
    pub traces: bool,
}

impl ExperimentConfig {
    pub fn new(datasets: Vec<DatasetSource>, strategies: Vec<StrategySpec>) -> Self {
        ExperimentConfig {
            datasets,
            strategies,
            rankers: default_rankers(),
            cv_k: 5,
            outer_k: 5,
            repetitions: 10,
            seed: 0,
            out: default_out(),
            metric: Metric::Accuracy,
            alpha: 0.05,
            baselines: true,
            traces: true,
        }
    }

    /// Parse a TOML configuration; relative dataset paths are taken relative
    /// to the file's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut config = Self::from_toml(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for source in &mut config.datasets {
            if let DatasetSource::Csv { path, .. } = source {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.into()));
        if self.datasets.is_empty() {
            return fail("at least one dataset is required");
        }
        if self.strategies.is_empty() {
            return fail("at least one strategy is required");
        }
        if self.rankers.is_empty() {
            return fail("at least one ranker is required");
        }
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1");
        }
        if self.cv_k < 2 || self.outer_k < 2 {
            return fail("cv_k and outer_k must be at least 2");
        }
        if self.alpha != 0.05 && self.alpha != 0.10 {
            return fail("alpha must be 0.05 or 0.10");
        }
        for s in &self.strategies {
            match s {
                StrategySpec::Ksrfe { k } if *k < 2 => return fail("k-SRFE needs k >= 2"),
                StrategySpec::RfeSteps { n_steps } if *n_steps < 2 => return fail("RFE needs at least 2 steps"),
                _ => {}
            }
        }
        let mut ids: Vec<String> = self.strategies.iter().map(StrategySpec::id).collect();
        if self.baselines {
            ids.extend(self.strategies.iter().filter_map(StrategySpec::baseline_id));
        }
        let n = ids.len();
        ids.sort();
        ids.dedup();
        if ids.len() != n {
            return fail("strategy identifiers must be unique");
        }
        Ok(())
    }

    /// Label per ranker: its kind, numbered when several share a kind.
    pub fn ranker_labels(&self) -> Vec<String> {
        self.rankers
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let shared = self.rankers.iter().filter(|o| o.kind == r.kind).count() > 1;
                if shared { format!("{}{}", r.kind, i) } else { r.kind.to_string() }
            })
            .collect()
    }
}

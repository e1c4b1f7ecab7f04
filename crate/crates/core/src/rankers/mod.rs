//! Classifiers that can rank the features they were trained on.

pub mod forest;
pub mod logistic;

use std::fmt;
use std::str::FromStr;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::FeatureRanking;

pub use forest::{Forest, ForestParams};
pub use logistic::{LogisticModel, LogisticParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RankerKind {
    #[default]
    Logistic,
    Forest,
}

impl RankerKind {
    pub fn name(self) -> &'static str {
        match self {
            RankerKind::Logistic => "logistic",
            RankerKind::Forest => "forest",
        }
    }
}

impl fmt::Display for RankerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RankerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" | "lr" => Ok(RankerKind::Logistic),
            "forest" | "rf" => Ok(RankerKind::Forest),
            other => Err(Error::Config(format!("unknown ranker `{other}`"))),
        }
    }
}

/// Which wrapped classifier to use and its parameters. Only the block matching
/// `kind` is read.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RankerConfig {
    pub kind: RankerKind,
    pub seed: u64,
    pub logistic: LogisticParams,
    pub forest: ForestParams,
}

impl RankerConfig {
    pub fn logistic(seed: u64) -> Self {
        RankerConfig { kind: RankerKind::Logistic, seed, ..Default::default() }
    }

    pub fn forest(seed: u64) -> Self {
        RankerConfig { kind: RankerKind::Forest, seed, ..Default::default() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        RankerConfig { seed, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            RankerKind::Logistic => self.logistic.validate(),
            RankerKind::Forest => self.forest.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Logistic(LogisticModel),
    Forest(Forest),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    /// Original indices of the columns the model was trained on, in column order.
    pub feature_subset: Vec<usize>,
    pub model: ModelKind,
}

/// Train a ranker on `x` whose columns are the original features `feature_subset`.
pub fn train(
    config: &RankerConfig,
    x: ArrayView2<'_, f64>,
    y: &[usize],
    n_classes: usize,
    feature_subset: &[usize],
) -> Result<TrainedModel> {
    config.validate()?;
    if x.nrows() != y.len() {
        return Err(Error::domain(format!("{} rows but {} labels", x.nrows(), y.len())));
    }
    if x.ncols() != feature_subset.len() {
        return Err(Error::domain("feature subset length differs from column count"));
    }
    if x.ncols() == 0 {
        return Err(Error::domain("cannot train on zero features"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("training data contains non-finite values"));
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::domain(format!("label {bad} outside 0..{n_classes}")));
    }
    let first = y.first().copied();
    if first.is_none() || y.iter().all(|&l| Some(l) == first) {
        return Err(Error::domain("training labels contain fewer than two classes"));
    }
    let model = match config.kind {
        RankerKind::Logistic => ModelKind::Logistic(logistic::fit(&config.logistic, x, y, n_classes)),
        RankerKind::Forest => ModelKind::Forest(forest::fit(&config.forest, config.seed, x, y, n_classes)),
    };
    Ok(TrainedModel { feature_subset: feature_subset.to_vec(), model })
}

impl TrainedModel {
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        if x.ncols() != self.feature_subset.len() {
            return Err(Error::domain(format!(
                "model trained on {} columns, got {}",
                self.feature_subset.len(),
                x.ncols()
            )));
        }
        Ok(match &self.model {
            ModelKind::Logistic(m) => m.predict(x),
            ModelKind::Forest(f) => f.predict(x),
        })
    }

    /// Importance score per column, in column order.
    pub fn importances(&self) -> Vec<f64> {
        match &self.model {
            ModelKind::Logistic(m) => m.importances(),
            ModelKind::Forest(f) => f.importances(),
        }
    }

    /// Trained features ordered by decreasing importance; ties go to the
    /// smaller original index.
    pub fn rank_features(&self) -> FeatureRanking {
        let scores = self.importances();
        let mut cols: Vec<usize> = (0..scores.len()).collect();
        cols.sort_by(|&a, &b| {
            scores[b]
                .total_cmp(&scores[a])
                .then_with(|| self.feature_subset[a].cmp(&self.feature_subset[b]))
        });
        FeatureRanking::new(cols.into_iter().map(|c| self.feature_subset[c]).collect())
            .expect("feature subset has distinct indices")
    }
}

/// Index of the largest value; ties go to the smallest index.
pub(crate) fn argmax_first<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

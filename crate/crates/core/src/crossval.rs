//! Stratified k-fold cross-validation returning per-fold scores and rankings.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{confusion, Metric};
use crate::preprocess::{apply_minmax, fit_minmax};
use crate::rankers::{train, RankerConfig};
use crate::seed;
use crate::types::{Dataset, FeatureRanking, FoldAssignment};

/// Assign examples to `k` folds. Within each class the examples are shuffled
/// and dealt round-robin; the dealing position carries over from one class to
/// the next so overall fold sizes also differ by at most one.
pub fn stratified_folds(labels: &[usize], k: usize, seed_value: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::domain("stratified folds need k >= 2"));
    }
    if k > labels.len() {
        return Err(Error::domain(format!("{k} folds requested for {} examples", labels.len())));
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut fold_of = vec![0usize; labels.len()];
    let mut next = 0usize;
    for (&class, members) in by_class.iter_mut() {
        if members.len() < k {
            log::warn!("class {class} has {} examples, fewer than {k} folds", members.len());
        }
        members.shuffle(&mut seed::rng(seed::derive(seed_value, &[class as u64])));
        for &i in members.iter() {
            fold_of[i] = next;
            next = (next + 1) % k;
        }
    }
    FoldAssignment::new(fold_of, k, seed_value)
}

/// Validation scores and rankings of one feature subset, in fold order.
#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub per_fold_scores: Vec<f64>,
    pub fold_rankings: Vec<FeatureRanking>,
}

impl CvOutcome {
    pub fn mean_score(&self) -> f64 {
        self.per_fold_scores.iter().sum::<f64>() / self.per_fold_scores.len() as f64
    }
}

/// Anything that can score a feature subset the way cross-validation does.
pub trait SubsetScorer {
    fn evaluate(&self, subset: &[usize]) -> Result<CvOutcome>;

    /// Number of features in the full problem.
    fn n_features(&self) -> usize;
}

/// Cross-validate `subset`: per fold, scale on the training rows, train the
/// ranker, score the validation rows and record the fold model's ranking.
pub fn cv_evaluate(
    subset: &[usize],
    dataset: &Dataset,
    folds: &FoldAssignment,
    ranker: &RankerConfig,
    metric: Metric,
) -> Result<CvOutcome> {
    if subset.is_empty() {
        return Err(Error::domain("cannot cross-validate an empty feature subset"));
    }
    if folds.n_examples() != dataset.n_examples() {
        return Err(Error::domain("fold assignment does not match the dataset"));
    }
    if let Some(&bad) = subset.iter().find(|&&f| f >= dataset.n_features()) {
        return Err(Error::domain(format!("feature {bad} outside the dataset")));
    }
    let per_fold: Vec<(f64, FeatureRanking)> = (0..folds.k())
        .into_par_iter()
        .map(|fold| {
            evaluate_fold(subset, dataset, folds, ranker, metric, fold)
                .map_err(|e| Error::Fold { fold, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    let (per_fold_scores, fold_rankings) = per_fold.into_iter().unzip();
    Ok(CvOutcome { per_fold_scores, fold_rankings })
}

fn evaluate_fold(
    subset: &[usize],
    dataset: &Dataset,
    folds: &FoldAssignment,
    ranker: &RankerConfig,
    metric: Metric,
    fold: usize,
) -> Result<(f64, FeatureRanking)> {
    let train_rows = folds.training_indices(fold);
    let val_rows = folds.validation_indices(fold);
    let x_train = dataset.submatrix(&train_rows, subset);
    let x_val = dataset.submatrix(&val_rows, subset);
    let scaler = fit_minmax(x_train.view())?;
    let x_train = apply_minmax(&scaler, x_train.view())?;
    let x_val = apply_minmax(&scaler, x_val.view())?;
    let fold_ranker = ranker.with_seed(seed::derive(ranker.seed, &[fold as u64]));
    let y_train = dataset.labels_at(&train_rows);
    let model = train(&fold_ranker, x_train.view(), &y_train, dataset.n_classes(), subset)?;
    let predicted = model.predict(x_val.view())?;
    let cm = confusion(&dataset.labels_at(&val_rows), &predicted, dataset.n_classes())?;
    Ok((metric.evaluate(&cm)?, model.rank_features()))
}

/// Merge fold rankings by ascending mean rank position; ties go to the
/// smaller feature index.
pub fn aggregate_ranking(fold_rankings: &[FeatureRanking]) -> Result<FeatureRanking> {
    let first = fold_rankings
        .first()
        .ok_or_else(|| Error::domain("no rankings to aggregate"))?;
    let reference = first.index_set();
    let mut position_sum: BTreeMap<usize, usize> = reference.iter().map(|&f| (f, 0)).collect();
    for ranking in fold_rankings {
        if ranking.index_set() != reference {
            return Err(Error::domain("fold rankings cover different feature sets"));
        }
        for (pos, f) in ranking.order().iter().enumerate() {
            *position_sum.get_mut(f).expect("same index set") += pos;
        }
    }
    let mut order: Vec<(usize, usize)> = position_sum.into_iter().map(|(f, s)| (s, f)).collect();
    order.sort_unstable();
    FeatureRanking::new(order.into_iter().map(|(_, f)| f).collect())
}

/// Cross-validation over a fixed dataset, fold split, ranker and metric.
#[derive(Debug, Clone)]
pub struct CrossValidator<'a> {
    pub dataset: &'a Dataset,
    pub folds: FoldAssignment,
    pub ranker: RankerConfig,
    pub metric: Metric,
}

impl<'a> CrossValidator<'a> {
    pub fn new(dataset: &'a Dataset, cv_k: usize, seed_value: u64, ranker: RankerConfig, metric: Metric) -> Result<Self> {
        let folds = stratified_folds(dataset.labels(), cv_k, seed_value)?;
        Ok(CrossValidator { dataset, folds, ranker, metric })
    }
}

impl SubsetScorer for CrossValidator<'_> {
    fn evaluate(&self, subset: &[usize]) -> Result<CvOutcome> {
        cv_evaluate(subset, self.dataset, &self.folds, &self.ranker, self.metric)
    }

    fn n_features(&self) -> usize {
        self.dataset.n_features()
    }
}

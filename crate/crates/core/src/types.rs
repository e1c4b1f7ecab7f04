//! Domain types shared by the selectors, plus subset truncation.

use std::collections::{BTreeMap, BTreeSet};

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Examples × features matrix with class labels normalized to `0..n_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    features: Array2<f64>,
    labels: Vec<usize>,
    n_classes: usize,
    feature_names: Option<Vec<String>>,
    class_names: Vec<String>,
}

impl Dataset {
    /// Build a dataset from integer labels. Labels are remapped to contiguous
    /// ids in ascending order of their original value.
    pub fn new(name: impl Into<String>, features: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        let distinct: BTreeSet<usize> = labels.iter().copied().collect();
        let remap: BTreeMap<usize, usize> = distinct.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let normalized = labels.iter().map(|l| remap[l]).collect();
        let class_names = distinct.iter().map(|l| l.to_string()).collect();
        Self::from_parts(name.into(), features, normalized, class_names)
    }

    /// Build a dataset from string labels. Classes are ordered numerically when
    /// every label parses as a number, lexicographically otherwise.
    pub fn from_string_labels(
        name: impl Into<String>,
        features: Array2<f64>,
        labels: &[String],
    ) -> Result<Self> {
        let mut classes: Vec<String> = labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let numeric: Option<Vec<f64>> = classes.iter().map(|c| c.trim().parse::<f64>().ok()).collect();
        if let Some(values) = numeric {
            let mut paired: Vec<(f64, String)> = values.into_iter().zip(classes).collect();
            paired.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            classes = paired.into_iter().map(|(_, c)| c).collect();
        }
        let index: BTreeMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let normalized = labels.iter().map(|l| index[l.as_str()]).collect();
        Self::from_parts(name.into(), features, normalized, classes)
    }

    fn from_parts(
        name: String,
        features: Array2<f64>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n_classes = class_names.len();
        let dataset = Dataset {
            name,
            features,
            labels,
            n_classes,
            feature_names: None,
            class_names,
        };
        dataset.validate()?;
        Ok(dataset)
    }

    fn validate(&self) -> Result<()> {
        if self.features.nrows() != self.labels.len() {
            return Err(Error::domain(format!(
                "{} rows but {} labels",
                self.features.nrows(),
                self.labels.len()
            )));
        }
        if self.features.ncols() == 0 {
            return Err(Error::domain("dataset has no features"));
        }
        let present: BTreeSet<usize> = self.labels.iter().copied().collect();
        if present.len() < 2 {
            return Err(Error::domain("at least two distinct classes are required"));
        }
        if let Some(&bad) = self.labels.iter().find(|&&l| l >= self.n_classes) {
            return Err(Error::domain(format!("label {bad} outside 0..{}", self.n_classes)));
        }
        if let Some(((r, c), v)) = self.features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite value {v} at row {r}, column {c}")));
        }
        if let Some(names) = &self.feature_names {
            if names.len() != self.features.ncols() {
                return Err(Error::domain("feature name count differs from column count"));
            }
        }
        Ok(())
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        self.feature_names = Some(names);
        self.validate()?;
        Ok(self)
    }

    pub fn n_examples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows `rows` restricted to columns `cols`, in the given orders.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Array2<f64> {
        self.features.select(Axis(0), rows).select(Axis(1), cols)
    }

    pub fn labels_at(&self, rows: &[usize]) -> Vec<usize> {
        rows.iter().map(|&r| self.labels[r]).collect()
    }

    /// Dataset made of the given rows. The class space is kept, so a subset may
    /// leave some classes without examples.
    pub fn subset_rows(&self, rows: &[usize]) -> Result<Dataset> {
        let subset = Dataset {
            name: self.name.clone(),
            features: self.features.select(Axis(0), rows),
            labels: self.labels_at(rows),
            n_classes: self.n_classes,
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        };
        subset.validate()?;
        Ok(subset)
    }

    /// Row order that depends only on the content of the dataset: by class,
    /// then lexicographically by feature values.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n_examples()).collect();
        order.sort_by(|&a, &b| {
            self.labels[a].cmp(&self.labels[b]).then_with(|| {
                let (ra, rb) = (self.features.row(a), self.features.row(b));
                ra.iter()
                    .zip(rb.iter())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        order
    }

    pub fn canonicalized(&self) -> Dataset {
        let order = self.canonical_order();
        Dataset {
            features: self.features.select(Axis(0), &order),
            labels: self.labels_at(&order),
            ..self.clone()
        }
    }
}

/// Feature indices ordered from most to least important.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureRanking {
    order: Vec<usize>,
}

impl FeatureRanking {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let distinct: BTreeSet<usize> = order.iter().copied().collect();
        if distinct.len() != order.len() {
            return Err(Error::domain("ranking contains duplicate feature indices"));
        }
        Ok(FeatureRanking { order })
    }

    /// The identity ranking `0, 1, …, m-1`.
    pub fn identity(m: usize) -> Self {
        FeatureRanking { order: (0..m).collect() }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Sorted copy of the ranked indices.
    pub fn index_set(&self) -> Vec<usize> {
        let mut s = self.order.clone();
        s.sort_unstable();
        s
    }
}

/// The first `n` features of `ranking`, returned as an ascending index set.
pub fn select_top(ranking: &FeatureRanking, n: usize) -> Result<Vec<usize>> {
    if n == 0 || n > ranking.len() {
        return Err(Error::domain(format!(
            "cannot select {n} features from a ranking of length {}",
            ranking.len()
        )));
    }
    let mut top = ranking.order[..n].to_vec();
    top.sort_unstable();
    Ok(top)
}

/// Example → fold map for k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    k: usize,
    seed: u64,
}

impl FoldAssignment {
    pub fn new(fold_of: Vec<usize>, k: usize, seed: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain("at least two folds are required"));
        }
        let mut sizes = vec![0usize; k];
        for &f in &fold_of {
            if f >= k {
                return Err(Error::domain(format!("fold index {f} outside 0..{k}")));
            }
            sizes[f] += 1;
        }
        if sizes.contains(&0) {
            return Err(Error::domain("every fold must contain at least one example"));
        }
        Ok(FoldAssignment { fold_of, k, seed })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    pub fn n_examples(&self) -> usize {
        self.fold_of.len()
    }

    pub fn validation_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] == fold).collect()
    }

    pub fn training_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] != fold).collect()
    }
}

/// Cached evaluation of one subset size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub per_fold_scores: Vec<f64>,
    pub fold_rankings: Vec<FeatureRanking>,
    pub aggregated_ranking: FeatureRanking,
    /// Position of this evaluation in the run (0 = first).
    pub sequence: usize,
}

impl TraceEntry {
    pub fn mean_score(&self) -> f64 {
        self.per_fold_scores.iter().sum::<f64>() / self.per_fold_scores.len() as f64
    }

    /// Sample standard deviation of the fold scores (0 for a single fold).
    pub fn score_sd(&self) -> f64 {
        let n = self.per_fold_scores.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean_score();
        let ss: f64 = self.per_fold_scores.iter().map(|s| (s - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }
}

/// Memo of every subset size evaluated during one search.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    entries: BTreeMap<usize, TraceEntry>,
}

impl SearchTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record the evaluation of `size`. A size may be recorded only once.
    pub fn insert(
        &mut self,
        size: usize,
        per_fold_scores: Vec<f64>,
        fold_rankings: Vec<FeatureRanking>,
        aggregated_ranking: FeatureRanking,
    ) -> Result<&TraceEntry> {
        if self.entries.contains_key(&size) {
            return Err(Error::domain(format!("subset size {size} evaluated twice")));
        }
        if per_fold_scores.is_empty() {
            return Err(Error::domain("trace entry without fold scores"));
        }
        let sequence = self.entries.len();
        let entry = TraceEntry {
            per_fold_scores,
            fold_rankings,
            aggregated_ranking,
            sequence,
        };
        Ok(self.entries.entry(size).or_insert(entry))
    }

    pub fn get(&self, size: usize) -> Option<&TraceEntry> {
        self.entries.get(&size)
    }

    pub fn contains(&self, size: usize) -> bool {
        self.entries.contains_key(&size)
    }

    pub fn mean_score(&self, size: usize) -> Option<f64> {
        self.get(size).map(TraceEntry::mean_score)
    }

    pub fn eval_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sizes in ascending order.
    pub fn sizes(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (usize, &TraceEntry)> + '_ {
        self.entries.iter().map(|(&s, e)| (s, e))
    }

    /// Sizes in the order they were evaluated.
    pub fn evaluation_order(&self) -> Vec<usize> {
        let mut sizes: Vec<(usize, usize)> = self.entries.iter().map(|(&s, e)| (e.sequence, s)).collect();
        sizes.sort_unstable();
        sizes.into_iter().map(|(_, s)| s).collect()
    }

    /// Size with the highest mean score; ties go to the smaller size.
    pub fn best_size(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (size, entry) in self.iter() {
            let score = entry.mean_score();
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((size, score));
            }
        }
        best.map(|(s, _)| s)
    }

    /// Smallest traced size strictly larger than `size`.
    pub fn next_larger(&self, size: usize) -> Option<usize> {
        self.entries.range(size + 1..).next().map(|(&s, _)| s)
    }
}

/// Outcome of a selector run.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Selected feature indices, ascending.
    pub selected: Vec<usize>,
    pub best_size: usize,
    /// The size the line search itself converged to. Equals `best_size`
    /// whenever the score curve was unimodal.
    pub search_best: usize,
    pub trace: SearchTrace,
    /// Seconds spent in search and final selection.
    pub wall_time: f64,
}

impl SelectionResult {
    pub fn eval_count(&self) -> usize {
        self.trace.eval_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn ranking(v: &[usize]) -> FeatureRanking {
        FeatureRanking::new(v.to_vec()).unwrap()
    }

    #[test]
    fn select_top_examples() {
        assert_eq!(select_top(&ranking(&[3, 1, 2]), 2).unwrap(), vec![1, 3]);
        assert_eq!(select_top(&ranking(&[0]), 1).unwrap(), vec![0]);
        assert_eq!(select_top(&ranking(&[5, 4, 3, 2, 1, 0]), 6).unwrap(), vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn select_top_rejects_bad_sizes() {
        assert!(select_top(&ranking(&[0, 1]), 0).is_err());
        assert!(select_top(&ranking(&[0, 1]), 3).is_err());
    }

    #[test]
    fn duplicate_ranking_rejected() {
        assert!(FeatureRanking::new(vec![1, 1]).is_err());
    }

    #[test]
    fn dataset_invariants() {
        let x = array![[0.0], [1.0]];
        assert!(Dataset::new("a", x.clone(), vec![3, 3]).is_err());
        assert!(Dataset::new("a", x.clone(), vec![0]).is_err());
        assert!(Dataset::new("a", array![[f64::NAN], [1.0]], vec![0, 1]).is_err());
        let d = Dataset::new("a", x, vec![7, 2]).unwrap();
        assert_eq!(d.labels(), &[1, 0]);
        assert_eq!(d.class_names(), &["2".to_string(), "7".to_string()]);
    }

    #[test]
    fn string_labels_sorted_numerically() {
        let x = array![[0.0], [1.0], [2.0]];
        let labels: Vec<String> = ["10", "9", "10"].iter().map(|s| s.to_string()).collect();
        let d = Dataset::from_string_labels("a", x, &labels).unwrap();
        assert_eq!(d.labels(), &[1, 0, 1]);
    }

    #[test]
    fn trace_rejects_reevaluation_and_breaks_ties_small() {
        let mut t = SearchTrace::new();
        t.insert(5, vec![0.5], vec![], ranking(&[0])).unwrap();
        t.insert(3, vec![0.5], vec![], ranking(&[0])).unwrap();
        t.insert(9, vec![0.4], vec![], ranking(&[0])).unwrap();
        assert!(t.insert(5, vec![0.9], vec![], ranking(&[0])).is_err());
        assert_eq!(t.eval_count(), 3);
        assert_eq!(t.best_size(), Some(3));
        assert_eq!(t.evaluation_order(), vec![5, 3, 9]);
        assert_eq!(t.next_larger(5), Some(9));
        assert_eq!(t.next_larger(9), None);
    }

    #[test]
    fn canonical_order_ignores_input_order() {
        let x = array![[0.3, 1.0], [0.1, 2.0], [0.2, 0.0], [0.1, 1.0]];
        let d = Dataset::new("a", x, vec![1, 0, 1, 0]).unwrap();
        let perm = [2, 0, 3, 1];
        let p = d.subset_rows(&perm).unwrap();
        assert_eq!(d.canonicalized().features(), p.canonicalized().features());
        assert_eq!(d.canonicalized().labels(), p.canonicalized().labels());
    }

    proptest! {
        #[test]
        fn select_top_nests(perm in Just((0..20usize).collect::<Vec<_>>()).prop_shuffle(), a in 1usize..=20, b in 1usize..=20) {
            let r = FeatureRanking::new(perm).unwrap();
            let (a, b) = (a.min(b), a.max(b));
            let small: BTreeSet<usize> = select_top(&r, a).unwrap().into_iter().collect();
            let large: BTreeSet<usize> = select_top(&r, b).unwrap().into_iter().collect();
            prop_assert!(small.is_subset(&large));
            prop_assert_eq!(large.len(), b);
        }
    }
}

//! Confusion-matrix based evaluation measures.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts indexed `[true class][predicted class]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    /// Square matrix from explicit counts.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let c = counts.len();
        if c == 0 || counts.iter().any(|row| row.len() != c) {
            return Err(Error::domain("confusion matrix must be square and non-empty"));
        }
        Ok(ConfusionMatrix { counts })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    fn col_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|row| row[j]).sum()
    }

    /// Number of classes with no true examples.
    pub fn absent_classes(&self) -> usize {
        (0..self.n_classes()).filter(|&i| self.row_sum(i) == 0).count()
    }

    fn nonempty_total(&self) -> Result<u64> {
        match self.total() {
            0 => Err(Error::domain("confusion matrix is empty")),
            t => Ok(t),
        }
    }

    fn present_recalls(&self) -> Result<Vec<f64>> {
        let recalls: Vec<f64> = (0..self.n_classes())
            .filter_map(|i| {
                let row = self.row_sum(i);
                (row > 0).then(|| self.counts[i][i] as f64 / row as f64)
            })
            .collect();
        if recalls.is_empty() {
            return Err(Error::domain("confusion matrix has no true examples"));
        }
        let absent = self.n_classes() - recalls.len();
        if absent > 0 {
            log::warn!("{absent} class(es) absent from evaluation; excluded from recall averaging");
        }
        Ok(recalls)
    }
}

/// Build a `n_classes × n_classes` confusion matrix.
pub fn confusion(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::domain(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::domain("no labels to compare"));
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::domain(format!("label outside 0..{n_classes}")));
        }
        counts[t][p] += 1;
    }
    ConfusionMatrix::from_counts(counts)
}

/// Confusion matrix sized by the largest label seen.
pub fn confusion_auto(y_true: &[usize], y_pred: &[usize]) -> Result<ConfusionMatrix> {
    let c = y_true.iter().chain(y_pred).max().map_or(0, |&m| m + 1);
    confusion(y_true, y_pred, c)
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.nonempty_total()?;
    let diag: u64 = (0..cm.n_classes()).map(|i| cm.counts[i][i]).sum();
    Ok(diag as f64 / total as f64)
}

/// Cohen's kappa. Returns 0 when chance agreement is 1.
pub fn kappa(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.nonempty_total()? as f64;
    let p_o = accuracy(cm)?;
    let p_e: f64 = (0..cm.n_classes())
        .map(|i| cm.row_sum(i) as f64 * cm.col_sum(i) as f64)
        .sum::<f64>()
        / (total * total);
    if p_e >= 1.0 {
        return Ok(0.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Mean per-class recall over classes present in the true labels.
pub fn macro_recall(cm: &ConfusionMatrix) -> Result<f64> {
    let recalls = cm.present_recalls()?;
    Ok(recalls.iter().sum::<f64>() / recalls.len() as f64)
}

/// Geometric mean of per-class recalls over classes present in the true labels.
pub fn g_mean(cm: &ConfusionMatrix) -> Result<f64> {
    let recalls = cm.present_recalls()?;
    if recalls.contains(&0.0) {
        return Ok(0.0);
    }
    let log_mean = recalls.iter().map(|r| r.ln()).sum::<f64>() / recalls.len() as f64;
    Ok(log_mean.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Accuracy,
    Kappa,
    MacroRecall,
    GMean,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Accuracy, Metric::Kappa, Metric::MacroRecall, Metric::GMean];

    pub fn evaluate(self, cm: &ConfusionMatrix) -> Result<f64> {
        match self {
            Metric::Accuracy => accuracy(cm),
            Metric::Kappa => kappa(cm),
            Metric::MacroRecall => macro_recall(cm),
            Metric::GMean => g_mean(cm),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Kappa => "kappa",
            Metric::MacroRecall => "macro_recall",
            Metric::GMean => "g_mean",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown metric `{s}`")))
    }
}

/// All four measures for one confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub accuracy: f64,
    pub kappa: f64,
    pub macro_recall: f64,
    pub g_mean: f64,
}

impl MetricValues {
    pub fn from_confusion(cm: &ConfusionMatrix) -> Result<Self> {
        Ok(MetricValues {
            accuracy: accuracy(cm)?,
            kappa: kappa(cm)?,
            macro_recall: macro_recall(cm)?,
            g_mean: g_mean(cm)?,
        })
    }

    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::Kappa => self.kappa,
            Metric::MacroRecall => self.macro_recall,
            Metric::GMean => self.g_mean,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cm(rows: &[&[u64]]) -> ConfusionMatrix {
        ConfusionMatrix::from_counts(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn confusion_counts() {
        assert_eq!(confusion(&[0, 1], &[0, 1], 2).unwrap(), cm(&[&[1, 0], &[0, 1]]));
        assert_eq!(confusion(&[0, 0], &[1, 1], 2).unwrap(), cm(&[&[0, 2], &[0, 0]]));
        assert_eq!(
            confusion(&[0, 1, 1, 2], &[0, 1, 2, 2], 3).unwrap(),
            cm(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]])
        );
        assert!(confusion(&[0, 1], &[0], 2).is_err());
        assert!(confusion(&[0, 2], &[0, 1], 2).is_err());
        assert!(confusion(&[], &[], 2).is_err());
    }

    #[test]
    fn accuracy_values() {
        assert_eq!(accuracy(&cm(&[&[1, 0], &[0, 1]])).unwrap(), 1.0);
        assert_eq!(accuracy(&cm(&[&[0, 2], &[0, 0]])).unwrap(), 0.0);
        assert_abs_diff_eq!(accuracy(&cm(&[&[50, 10], &[5, 35]])).unwrap(), 0.85, epsilon = 1e-12);
        assert!(accuracy(&cm(&[&[0, 0], &[0, 0]])).is_err());
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(&cm(&[&[1, 0], &[0, 1]])).unwrap(), 1.0);
        assert_eq!(kappa(&cm(&[&[25, 25], &[25, 25]])).unwrap(), 0.0);
        // p_o = 0.85, p_e = (60·55 + 40·45) / 100² = 0.51
        assert_abs_diff_eq!(kappa(&cm(&[&[50, 10], &[5, 35]])).unwrap(), 0.34 / 0.49, epsilon = 1e-12);
        assert_eq!(kappa(&cm(&[&[4, 0], &[0, 0]])).unwrap(), 0.0);
    }

    #[test]
    fn recall_values() {
        assert_eq!(macro_recall(&cm(&[&[1, 0], &[0, 1]])).unwrap(), 1.0);
        assert_abs_diff_eq!(macro_recall(&cm(&[&[9, 1], &[2, 8]])).unwrap(), 0.85, epsilon = 1e-12);
        assert_abs_diff_eq!(macro_recall(&cm(&[&[0, 2], &[0, 2]])).unwrap(), 0.5, epsilon = 1e-12);
        assert_eq!(g_mean(&cm(&[&[1, 0], &[0, 1]])).unwrap(), 1.0);
        assert_eq!(g_mean(&cm(&[&[0, 2], &[0, 2]])).unwrap(), 0.0);
        assert_abs_diff_eq!(g_mean(&cm(&[&[9, 1], &[2, 8]])).unwrap(), (0.72f64).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn absent_class_is_skipped() {
        let m = cm(&[&[3, 1, 0], &[0, 0, 0], &[1, 0, 3]]);
        assert_eq!(m.absent_classes(), 1);
        assert_abs_diff_eq!(macro_recall(&m).unwrap(), 0.75, epsilon = 1e-12);
        assert!(macro_recall(&cm(&[&[0, 0], &[0, 0]])).is_err());
    }

    fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<u64>>> {
        (2usize..5).prop_flat_map(|c| prop::collection::vec(prop::collection::vec(0u64..20, c), c))
    }

    proptest! {
        #[test]
        fn gmean_bounded_by_macro_recall(mut counts in matrix_strategy()) {
            for (i, row) in counts.iter_mut().enumerate() {
                row[i] += 1;
            }
            let m = ConfusionMatrix::from_counts(counts).unwrap();
            let g = g_mean(&m).unwrap();
            let r = macro_recall(&m).unwrap();
            prop_assert!(g >= 0.0 && g <= r + 1e-12);
        }

        #[test]
        fn metrics_invariant_under_class_relabeling(counts in matrix_strategy(), seed in any::<u64>()) {
            prop_assume!(counts.iter().flatten().sum::<u64>() > 0);
            let c = counts.len();
            let mut perm: Vec<usize> = (0..c).collect();
            use rand::seq::SliceRandom;
            perm.shuffle(&mut crate::seed::rng(seed));
            let mut permuted = vec![vec![0; c]; c];
            for i in 0..c {
                for j in 0..c {
                    permuted[perm[i]][perm[j]] = counts[i][j];
                }
            }
            let a = ConfusionMatrix::from_counts(counts).unwrap();
            let b = ConfusionMatrix::from_counts(permuted).unwrap();
            prop_assert!((accuracy(&a).unwrap() - accuracy(&b).unwrap()).abs() < 1e-12);
            prop_assert!((kappa(&a).unwrap() - kappa(&b).unwrap()).abs() < 1e-12);
            if a.absent_classes() < c {
                prop_assert!((macro_recall(&a).unwrap() - macro_recall(&b).unwrap()).abs() < 1e-12);
                prop_assert!((g_mean(&a).unwrap() - g_mean(&b).unwrap()).abs() < 1e-12);
            }
        }

        #[test]
        fn kappa_one_iff_diagonal(counts in matrix_strategy()) {
            let m = ConfusionMatrix::from_counts(counts.clone()).unwrap();
            prop_assume!(m.total() > 0);
            let diagonal = (0..counts.len()).all(|i| (0..counts.len()).all(|j| i == j || counts[i][j] == 0));
            let nonzero_classes = (0..counts.len()).filter(|&i| counts[i][i] > 0).count();
            let k = kappa(&m).unwrap();
            if diagonal && nonzero_classes > 1 {
                prop_assert!((k - 1.0).abs() < 1e-12);
            } else {
                prop_assert!(k < 1.0 - 1e-12);
            }
        }
    }
}

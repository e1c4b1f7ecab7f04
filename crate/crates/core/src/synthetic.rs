//! Synthetic classification data for tests, examples and scaled experiments.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::seed;
use crate::types::Dataset;

/// Two balanced classes; the first `informative` columns are Gaussian with a
/// class-dependent mean shift that weakens with the column index, the
/// remaining `noise` columns are standard Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_examples: usize,
    pub informative: usize,
    pub noise: usize,
    /// Distance between the class means of the strongest informative column.
    pub separation: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Mean shift of informative column `j` (half the distance between class means).
    pub fn shift(&self, j: usize) -> f64 {
        0.5 * self.separation / (1.0 + 0.15 * j as f64)
    }

    pub fn generate(&self) -> Result<Dataset> {
        let m = self.informative + self.noise;
        let mut rng = seed::rng(self.seed);
        let labels: Vec<usize> = (0..self.n_examples).map(|i| i % 2).collect();
        let mut x = Array2::<f64>::zeros((self.n_examples, m));
        for (i, &label) in labels.iter().enumerate() {
            let sign = if label == 1 { 1.0 } else { -1.0 };
            for j in 0..m {
                let z: f64 = StandardNormal.sample(&mut rng);
                x[[i, j]] = if j < self.informative { z + sign * self.shift(j) } else { z };
            }
        }
        let names = (0..m)
            .map(|j| if j < self.informative { format!("inf{j}") } else { format!("noise{}", j - self.informative) })
            .collect();
        Dataset::new(format!("synthetic-{}x{}", self.n_examples, m), x, labels)?.with_feature_names(names)
    }
}

/// Column 0 is uniform on `[0, 1]` and the label is `x₀ > 0.5`; the other
/// `noise` columns are independent uniform noise.
pub fn threshold_dataset(n_examples: usize, noise: usize, seed_value: u64) -> Dataset {
    let mut rng = seed::rng(seed_value);
    let mut x = Array2::<f64>::zeros((n_examples, noise + 1));
    for i in 0..n_examples {
        for j in 0..=noise {
            x[[i, j]] = rng.random::<f64>();
        }
    }
    // Guarantee both classes.
    if n_examples >= 2 {
        x[[0, 0]] = 0.25;
        x[[1, 0]] = 0.75;
    }
    let labels = (0..n_examples).map(|i| usize::from(x[[i, 0]] > 0.5)).collect();
    Dataset::new("threshold", x, labels).expect("threshold dataset is valid")
}

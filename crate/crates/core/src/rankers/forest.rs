//! Bagged CART trees with Gini splits and per-tree feature sampling.

use ndarray::{ArrayView1, ArrayView2, Axis};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Fraction of the columns each tree may split on, sampled once per tree.
    pub feature_fraction: f64,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 30,
            feature_fraction: 0.3,
            max_depth: None,
            min_leaf: 1,
        }
    }
}

impl ForestParams {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::Config("forest n_trees must be at least 1".into()));
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return Err(Error::Config("forest feature_fraction must lie in (0, 1]".into()));
        }
        if self.min_leaf == 0 {
            return Err(Error::Config("forest min_leaf must be at least 1".into()));
        }
        Ok(())
    }

    /// Columns sampled for each tree out of `n_features`: `⌈fraction · n⌉`.
    pub fn features_per_tree(&self, n_features: usize) -> usize {
        // The epsilon keeps e.g. 0.3 · 10 from rounding up to 4.
        let k = (self.feature_fraction * n_features as f64 - 1e-9).ceil() as usize;
        k.clamp(1, n_features)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        class: usize,
    },
    Split {
        column: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    /// Columns this tree was allowed to split on, ascending.
    sampled: Vec<usize>,
    /// Weighted Gini decrease per column of the training matrix.
    importance: Vec<f64>,
}

impl Tree {
    pub fn sampled_columns(&self) -> &[usize] {
        &self.sampled
    }

    /// Columns that appear in at least one split.
    pub fn split_columns(&self) -> Vec<usize> {
        let mut cols: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { column, .. } => Some(*column),
                Node::Leaf { .. } => None,
            })
            .collect();
        cols.sort_unstable();
        cols.dedup();
        cols
    }

    fn predict_row(&self, row: ArrayView1<'_, f64>) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class } => return *class,
                Node::Split { column, threshold, left, right } => {
                    at = if row[*column] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Single split on `column`: values `<= threshold` go to `below`.
    pub fn stump(n_columns: usize, column: usize, threshold: f64, below: usize, above: usize) -> Tree {
        Tree {
            nodes: vec![
                Node::Split { column, threshold, left: 1, right: 2 },
                Node::Leaf { class: below },
                Node::Leaf { class: above },
            ],
            sampled: vec![column],
            importance: vec![0.0; n_columns],
        }
    }

    /// Tree that always predicts `class`.
    pub fn constant(n_columns: usize, class: usize) -> Tree {
        Tree {
            nodes: vec![Node::Leaf { class }],
            sampled: vec![],
            importance: vec![0.0; n_columns],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
    n_classes: usize,
    n_columns: usize,
}

impl Forest {
    pub fn from_trees(trees: Vec<Tree>, n_classes: usize) -> Self {
        let n_columns = trees.first().map_or(0, |t| t.importance.len());
        Forest { trees, n_classes, n_columns }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Majority vote; ties go to the smallest class index.
    pub(crate) fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<usize> {
        x.axis_iter(Axis(0))
            .map(|row| {
                let mut votes = vec![0usize; self.n_classes];
                for tree in &self.trees {
                    votes[tree.predict_row(row)] += 1;
                }
                super::argmax_first(&votes)
            })
            .collect()
    }

    /// Total Gini decrease per column summed over trees.
    pub(crate) fn importances(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.n_columns];
        for tree in &self.trees {
            for (t, v) in total.iter_mut().zip(&tree.importance) {
                *t += v;
            }
        }
        total
    }
}

pub(crate) fn fit(params: &ForestParams, seed: u64, x: ArrayView2<'_, f64>, y: &[usize], n_classes: usize) -> Forest {
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| grow_tree(params, seed::derive(seed, &[t as u64]), x, y, n_classes))
        .collect();
    Forest { trees, n_classes, n_columns: x.ncols() }
}

fn grow_tree(params: &ForestParams, seed: u64, x: ArrayView2<'_, f64>, y: &[usize], n_classes: usize) -> Tree {
    let mut rng = seed::rng(seed);
    let (n, f) = x.dim();
    let mut sampled = index::sample(&mut rng, f, params.features_per_tree(f)).into_vec();
    sampled.sort_unstable();
    let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();

    let mut builder = Builder {
        params,
        x,
        y,
        n_classes,
        nodes: Vec::new(),
        importance: vec![0.0; f],
        sampled: &sampled,
    };
    builder.grow(rows, 0);
    let Builder { nodes, importance, .. } = builder;
    Tree { nodes, sampled, importance }
}

struct Builder<'a> {
    params: &'a ForestParams,
    x: ArrayView2<'a, f64>,
    y: &'a [usize],
    n_classes: usize,
    nodes: Vec<Node>,
    importance: Vec<f64>,
    sampled: &'a [usize],
}

/// `n · gini` for the class counts, i.e. `n − Σ c² / n`.
fn weighted_gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let sq: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
    n as f64 - sq / n as f64
}

struct SplitChoice {
    column: usize,
    threshold: f64,
    impurity: f64,
}

impl Builder<'_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let mut counts = vec![0usize; self.n_classes];
        for &r in &rows {
            counts[self.y[r]] += 1;
        }
        let majority = super::argmax_first(&counts);
        self.nodes.push(Node::Leaf { class: majority });

        let n = rows.len();
        let impurity = weighted_gini(&counts, n);
        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        if impurity <= 1e-12 || n < 2 * self.params.min_leaf || !depth_ok {
            return id;
        }
        let Some(split) = self.best_split(&rows, &counts) else {
            return id;
        };
        let decrease = impurity - split.impurity;
        if decrease <= 1e-12 {
            return id;
        }
        self.importance[split.column] += decrease;
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.x[[r, split.column]] <= split.threshold);
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[id] = Node::Split {
            column: split.column,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    fn best_split(&self, rows: &[usize], counts: &[usize]) -> Option<SplitChoice> {
        let n = rows.len();
        let min_leaf = self.params.min_leaf;
        let mut best: Option<SplitChoice> = None;
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
        let mut left = vec![0usize; self.n_classes];
        let mut right = vec![0usize; self.n_classes];
        for &column in self.sampled {
            order.clear();
            order.extend(rows.iter().map(|&r| (self.x[[r, column]], self.y[r])));
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            left.iter_mut().for_each(|c| *c = 0);
            right.copy_from_slice(counts);
            for i in 0..n - 1 {
                let (value, class) = order[i];
                left[class] += 1;
                right[class] -= 1;
                let n_left = i + 1;
                if n_left < min_leaf || n - n_left < min_leaf || order[i + 1].0 <= value {
                    continue;
                }
                let impurity = weighted_gini(&left, n_left) + weighted_gini(&right, n - n_left);
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    best = Some(SplitChoice {
                        column,
                        threshold: 0.5 * (value + order[i + 1].0),
                        impurity,
                    });
                }
            }
        }
        best
    }
}

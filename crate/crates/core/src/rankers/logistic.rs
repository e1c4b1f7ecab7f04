//! One-vs-rest logistic regression trained by full-batch gradient descent on
//! the L2-regularized log-loss.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    /// Weight of the `½‖w‖²` penalty (the intercept is not penalized).
    pub l2_strength: f64,
    pub max_epochs: usize,
    /// Initial step size; each epoch backtracks until the Armijo condition holds.
    pub learning_rate: f64,
    /// Stop once the gradient norm falls below this.
    pub tolerance: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2_strength: 1e-2,
            max_epochs: 300,
            learning_rate: 1.0,
            tolerance: 1e-4,
        }
    }
}

impl LogisticParams {
    pub(crate) fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.l2_strength) || !positive(self.learning_rate) || !positive(self.tolerance) {
            return Err(Error::Config(
                "logistic l2_strength, learning_rate and tolerance must be positive".into(),
            ));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("logistic max_epochs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    /// One row per class.
    coef: Array2<f64>,
    intercept: Array1<f64>,
}

impl LogisticModel {
    pub fn from_parts(coef: Array2<f64>, intercept: Array1<f64>) -> Self {
        assert_eq!(coef.nrows(), intercept.len());
        LogisticModel { coef, intercept }
    }

    pub fn coefficients(&self) -> &Array2<f64> {
        &self.coef
    }

    pub fn intercepts(&self) -> &Array1<f64> {
        &self.intercept
    }

    pub(crate) fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<usize> {
        let scores = x.dot(&self.coef.t()) + &self.intercept;
        scores
            .axis_iter(Axis(0))
            .map(|row| super::argmax_first(&row.to_vec()))
            .collect()
    }

    /// L2 norm of each feature's coefficients across the one-vs-rest heads.
    pub(crate) fn importances(&self) -> Vec<f64> {
        self.coef
            .axis_iter(Axis(1))
            .map(|col| col.dot(&col).sqrt())
            .collect()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn loss_from_logits(z: ArrayView1<'_, f64>, targets: ArrayView1<'_, f64>, w: ArrayView1<'_, f64>, l2: f64) -> f64 {
    let n = z.len() as f64;
    let data: f64 = z.iter().zip(targets).map(|(&z, &t)| softplus(z) - t * z).sum();
    data / n + 0.5 * l2 * w.dot(&w)
}

fn gradient_from_logits(
    x: ArrayView2<'_, f64>,
    z: ArrayView1<'_, f64>,
    targets: ArrayView1<'_, f64>,
    w: ArrayView1<'_, f64>,
    l2: f64,
) -> (Array1<f64>, f64) {
    let n = z.len() as f64;
    let residual: Array1<f64> = z.iter().zip(targets).map(|(&z, &t)| sigmoid(z) - t).collect();
    let grad_w = x.t().dot(&residual) / n + &(&w * l2);
    (grad_w, residual.sum() / n)
}

/// Regularized binary log-loss and its gradient with respect to `(w, b)`.
///
/// `targets` are 0/1 indicators. The loss is
/// `mean(ln(1 + e^z) − t·z) + ½·l2·‖w‖²` with `z = x·w + b`.
pub fn loss_and_gradient(
    x: ArrayView2<'_, f64>,
    targets: ArrayView1<'_, f64>,
    w: ArrayView1<'_, f64>,
    b: f64,
    l2: f64,
) -> (f64, Array1<f64>, f64) {
    let z = x.dot(&w) + b;
    let loss = loss_from_logits(z.view(), targets, w, l2);
    let (gw, gb) = gradient_from_logits(x, z.view(), targets, w, l2);
    (loss, gw, gb)
}

fn fit_head(params: &LogisticParams, x: ArrayView2<'_, f64>, targets: ArrayView1<'_, f64>) -> (Array1<f64>, f64) {
    let l2 = params.l2_strength;
    let mut w = Array1::<f64>::zeros(x.ncols());
    let mut b = 0.0;
    let mut z = Array1::<f64>::zeros(x.nrows());
    let mut loss = loss_from_logits(z.view(), targets, w.view(), l2);
    let mut step = params.learning_rate;

    for _ in 0..params.max_epochs {
        let (gw, gb) = gradient_from_logits(x, z.view(), targets, w.view(), l2);
        let sq_norm = gw.dot(&gw) + gb * gb;
        if sq_norm.sqrt() < params.tolerance {
            break;
        }
        // Backtracking line search on the Armijo condition.
        loop {
            let w_new = &w - &(&gw * step);
            let b_new = b - step * gb;
            let z_new = x.dot(&w_new) + b_new;
            let loss_new = loss_from_logits(z_new.view(), targets, w_new.view(), l2);
            if loss_new <= loss - 0.5 * step * sq_norm || step < 1e-12 {
                w = w_new;
                b = b_new;
                z = z_new;
                loss = loss_new;
                break;
            }
            step *= 0.5;
        }
        step *= 2.0;
    }
    (w, b)
}

pub(crate) fn fit(params: &LogisticParams, x: ArrayView2<'_, f64>, y: &[usize], n_classes: usize) -> LogisticModel {
    let x = x.as_standard_layout();
    let heads: Vec<(Array1<f64>, f64)> = (0..n_classes)
        .into_par_iter()
        .map(|class| {
            let targets: Array1<f64> = y.iter().map(|&l| if l == class { 1.0 } else { 0.0 }).collect();
            fit_head(params, x.view(), targets.view())
        })
        .collect();
    let mut coef = Array2::zeros((n_classes, x.ncols()));
    let mut intercept = Array1::zeros(n_classes);
    for (c, (w, b)) in heads.into_iter().enumerate() {
        coef.row_mut(c).assign(&w);
        intercept[c] = b;
    }
    LogisticModel { coef, intercept }
}

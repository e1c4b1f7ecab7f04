//! Min-max scaling fitted on training rows.

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    min: Vec<f64>,
    range: Vec<f64>,
}

impl MinMaxScaler {
    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn range(&self) -> &[f64] {
        &self.range
    }

    pub fn n_features(&self) -> usize {
        self.min.len()
    }
}

pub fn fit_minmax(train: ArrayView2<'_, f64>) -> Result<MinMaxScaler> {
    if train.nrows() == 0 {
        return Err(Error::domain("cannot fit a scaler on zero rows"));
    }
    let (min, range) = train
        .axis_iter(Axis(1))
        .map(|col| {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi - lo)
        })
        .unzip();
    Ok(MinMaxScaler { min, range })
}

/// Scale `rows` column-wise. Constant training columns map to 0; values outside
/// the fitted range are not clipped.
pub fn apply_minmax(scaler: &MinMaxScaler, rows: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    if rows.ncols() != scaler.n_features() {
        return Err(Error::domain(format!(
            "scaler fitted on {} columns, got {}",
            scaler.n_features(),
            rows.ncols()
        )));
    }
    let mut out = rows.to_owned();
    for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
        let (lo, range) = (scaler.min[j], scaler.range[j]);
        if range > 0.0 {
            col.mapv_inplace(|x| (x - lo) / range);
        } else {
            col.fill(0.0);
        }
    }
    Ok(out)
}

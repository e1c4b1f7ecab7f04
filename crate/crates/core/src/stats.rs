//! Rank-based tests for comparing several algorithms over several datasets.
//!
//! Scores are always "higher is better"; negate costs such as subset size or
//! run time before passing them in.

use statrs::distribution::{ContinuousCDF, FisherSnedecor, Normal};

use crate::error::{Error, Result};

/// Ranks of `values` with 1 for the largest, ties sharing their average rank.
pub fn descending_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    average_ranks(values, &order)
}

/// Ranks of `values` with 1 for the smallest, ties sharing their average rank.
pub fn ascending_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    average_ranks(values, &order)
}

fn average_ranks(values: &[f64], order: &[usize]) -> Vec<f64> {
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) share ranks i+1..=j.
        let avg = (i + j + 1) as f64 / 2.0;
        for &o in &order[i..j] {
            ranks[o] = avg;
        }
        i = j;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanResult {
    /// Mean rank of each algorithm over datasets, 1 = best.
    pub avg_ranks: Vec<f64>,
    pub chi_square: f64,
    /// Iman–Davenport statistic, F-distributed with `(A−1, (A−1)(D−1))` df.
    pub f_statistic: f64,
    pub p_value: f64,
}

/// Friedman test on an `A × D` score table, `scores[algorithm][dataset]`.
///
/// The p-value is the Iman–Davenport F form.
pub fn friedman_test(scores: &[Vec<f64>]) -> Result<FriedmanResult> {
    let a = scores.len();
    if a < 3 {
        return Err(Error::domain("Friedman test needs at least 3 algorithms"));
    }
    let d = scores[0].len();
    if d < 2 {
        return Err(Error::domain("Friedman test needs at least 2 datasets"));
    }
    if scores.iter().any(|row| row.len() != d) {
        return Err(Error::domain("score table is ragged"));
    }
    if scores.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::domain("score table holds non-finite values"));
    }

    let mut rank_sums = vec![0.0; a];
    for j in 0..d {
        let column: Vec<f64> = scores.iter().map(|row| row[j]).collect();
        for (sum, r) in rank_sums.iter_mut().zip(descending_ranks(&column)) {
            *sum += r;
        }
    }
    let avg_ranks: Vec<f64> = rank_sums.iter().map(|s| s / d as f64).collect();

    let (af, df) = (a as f64, d as f64);
    let sq: f64 = avg_ranks.iter().map(|r| r * r).sum();
    let chi_square = (12.0 * df / (af * (af + 1.0)) * (sq - af * (af + 1.0).powi(2) / 4.0)).max(0.0);
    let denom = df * (af - 1.0) - chi_square;
    let (f_statistic, p_value) = if chi_square <= 1e-12 {
        (0.0, 1.0)
    } else if denom <= 1e-12 {
        // Every dataset ranks the algorithms identically and without ties.
        (f64::INFINITY, 0.0)
    } else {
        let f = (df - 1.0) * chi_square / denom;
        let dist = FisherSnedecor::new(af - 1.0, (af - 1.0) * (df - 1.0)).expect("positive degrees of freedom");
        (f, dist.sf(f))
    };
    Ok(FriedmanResult { avg_ranks, chi_square, f_statistic, p_value })
}

/// Two-tailed Nemenyi critical values `q_α` for 2..=20 algorithms.
const Q_05: [f64; 19] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313, 3.354, 3.391, 3.426, 3.458,
    3.489, 3.517, 3.544,
];
const Q_10: [f64; 19] = [
    1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978, 3.030, 3.077, 3.120, 3.159, 3.196, 3.230,
    3.261, 3.291, 3.319,
];

/// Critical value `q_α` for `n_algorithms` at `alpha` ∈ {0.05, 0.10}.
pub fn nemenyi_q(n_algorithms: usize, alpha: f64) -> Result<f64> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_05
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_10
    } else {
        return Err(Error::domain(format!("unsupported alpha {alpha}; use 0.05 or 0.10")));
    };
    match n_algorithms {
        2..=20 => Ok(table[n_algorithms - 2]),
        _ => Err(Error::domain(format!("Nemenyi table covers 2 to 20 algorithms, got {n_algorithms}"))),
    }
}

/// Nemenyi critical distance between average ranks.
pub fn nemenyi_cd(n_algorithms: usize, n_datasets: usize, alpha: f64) -> Result<f64> {
    if n_datasets == 0 {
        return Err(Error::domain("Nemenyi test needs at least 1 dataset"));
    }
    let q = nemenyi_q(n_algorithms, alpha)?;
    let a = n_algorithms as f64;
    Ok(q * (a * (a + 1.0) / (6.0 * n_datasets as f64)).sqrt())
}

/// Whether two average ranks are within the critical distance.
pub fn connected(rank_a: f64, rank_b: f64, cd: f64) -> bool {
    (rank_a - rank_b).abs() < cd
}

/// Pairs `(i, j)`, `i < j`, of algorithms not significantly different.
pub fn connected_pairs(avg_ranks: &[f64], cd: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..avg_ranks.len() {
        for j in i + 1..avg_ranks.len() {
            if connected(avg_ranks[i], avg_ranks[j], cd) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Largest number of nonzero differences handled by exact enumeration.
pub const WILCOXON_EXACT_MAX: usize = 20;

/// Two-sided Wilcoxon signed-rank p-value for paired samples.
///
/// Zero differences are dropped and tied magnitudes share average ranks.
/// Up to [`WILCOXON_EXACT_MAX`] pairs the null distribution is enumerated
/// exactly; above, a tie-corrected normal approximation with continuity
/// correction is used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain("paired samples differ in length"));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::domain("paired samples hold non-finite values"));
    }
    let n = diffs.len();
    if n < 5 {
        return Err(Error::InsufficientData(format!("{n} nonzero differences, need at least 5")));
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = ascending_ranks(&magnitudes);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();

    let p = if n <= WILCOXON_EXACT_MAX { exact_p(&ranks, w_plus) } else { normal_p(&ranks, w_plus) };
    Ok(p.min(1.0))
}

fn exact_p(ranks: &[f64], w_plus: f64) -> f64 {
    // Average ranks are multiples of 1/2, so doubled ranks are integers.
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let all = 2f64.powi(ranks.len() as i32);
    let w = (2.0 * w_plus).round() as usize;
    let lower: f64 = counts[..=w].iter().sum::<f64>() / all;
    let upper: f64 = counts[w..].iter().sum::<f64>() / all;
    2.0 * lower.min(upper)
}

fn normal_p(ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    for group in sorted.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    2.0 * normal.sf(z)
}

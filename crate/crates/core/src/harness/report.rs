//! Summary tables and the significance report built from run records.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::output::{fmt_num, RunRecord};
use crate::error::{Error, Result};
use crate::stats::{connected_pairs, friedman_test, nemenyi_cd, wilcoxon_signed_rank};

/// Per-record value compared across algorithms; higher is better after
/// `oriented` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Accuracy,
    Kappa,
    MacroRecall,
    GMean,
    /// Selected subset size, smaller is better.
    Size,
}

impl Measure {
    pub const ALL: [Measure; 5] = [Measure::Accuracy, Measure::Kappa, Measure::MacroRecall, Measure::GMean, Measure::Size];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Accuracy => "accuracy",
            Measure::Kappa => "kappa",
            Measure::MacroRecall => "macro_recall",
            Measure::GMean => "g_mean",
            Measure::Size => "selected_size",
        }
    }

    pub fn value(self, r: &RunRecord) -> f64 {
        match self {
            Measure::Accuracy => r.metrics.accuracy,
            Measure::Kappa => r.metrics.kappa,
            Measure::MacroRecall => r.metrics.macro_recall,
            Measure::GMean => r.metrics.g_mean,
            Measure::Size => r.selected_size() as f64,
        }
    }

    fn oriented(self, r: &RunRecord) -> f64 {
        match self {
            Measure::Size => -self.value(r),
            _ => self.value(r),
        }
    }
}

/// Name under which a record is compared: the strategy id, qualified by the
/// ranker when records use more than one.
pub fn algorithm_labels(records: &[RunRecord]) -> Vec<String> {
    let mut rankers: Vec<&str> = records.iter().map(|r| r.ranker.as_str()).collect();
    rankers.sort_unstable();
    rankers.dedup();
    records
        .iter()
        .map(|r| if rankers.len() > 1 { format!("{}/{}", r.strategy, r.ranker) } else { r.strategy.clone() })
        .collect()
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in items {
        if !out.iter().any(|o| o == s) {
            out.push(s.to_string());
        }
    }
    out
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; 0 for fewer than two values.
pub fn sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub(crate) const SUMMARY_COLUMNS: [&str; 16] = [
    "dataset",
    "strategy",
    "ranker",
    "runs",
    "size_mean",
    "size_sd",
    "eval_count_mean",
    "eval_count_total",
    "accuracy_mean",
    "accuracy_sd",
    "kappa_mean",
    "kappa_sd",
    "macro_recall_mean",
    "macro_recall_sd",
    "g_mean_mean",
    "g_mean_sd",
];

/// (dataset, strategy, ranker)
type GroupKey = (String, String, String);

fn groups(records: &[RunRecord]) -> Vec<(GroupKey, Vec<&RunRecord>)> {
    let mut order: Vec<GroupKey> = Vec::new();
    let mut map: BTreeMap<GroupKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.dataset.clone(), r.strategy.clone(), r.ranker.clone());
        if !map.contains_key(&key) {
            order.push(key.clone());
        }
        map.entry(key).or_default().push(r);
    }
    order.into_iter().map(|k| { let v = map.remove(&k).expect("key from map"); (k, v) }).collect()
}

/// Mean and SD of size, evaluations and metrics per (dataset, strategy, ranker).
pub fn summary_rows(records: &[RunRecord]) -> Vec<Vec<String>> {
    groups(records)
        .into_iter()
        .map(|((dataset, strategy, ranker), runs)| {
            let col = |f: &dyn Fn(&RunRecord) -> f64| runs.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let sizes = col(&|r| r.selected_size() as f64);
            let evals = col(&|r| r.eval_count as f64);
            let mut row = vec![
                dataset,
                strategy,
                ranker,
                runs.len().to_string(),
                fmt_num(mean(&sizes)),
                fmt_num(sd(&sizes)),
                fmt_num(mean(&evals)),
                runs.iter().map(|r| r.eval_count).sum::<usize>().to_string(),
            ];
            for m in [Measure::Accuracy, Measure::Kappa, Measure::MacroRecall, Measure::GMean] {
                let v = col(&|r| m.value(r));
                row.push(fmt_num(mean(&v)));
                row.push(fmt_num(sd(&v)));
            }
            row
        })
        .collect()
}

/// Mean and SD of wall time per (dataset, strategy, ranker).
pub fn timing_rows(records: &[RunRecord]) -> Vec<Vec<String>> {
    groups(records)
        .into_iter()
        .map(|((dataset, strategy, ranker), runs)| {
            let t: Vec<f64> = runs.iter().map(|r| r.wall_time).collect();
            vec![dataset, strategy, ranker, runs.len().to_string(), fmt_num(mean(&t)), fmt_num(sd(&t))]
        })
        .collect()
}

/// Oriented values indexed by (dataset, repetition) for each algorithm.
type Paired = BTreeMap<(String, usize), f64>;

/// Friedman/Nemenyi and pairwise Wilcoxon results for every measure.
///
/// Friedman blocks are datasets (values averaged over repetitions) when the
/// records span several datasets, and repetitions otherwise. Wilcoxon pairs
/// runs that share a dataset and repetition.
pub fn significance_report(records: &[RunRecord], alpha: f64) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no run records".into()));
    }
    let labels = algorithm_labels(records);
    let algorithms = first_seen(labels.iter().map(String::as_str));
    let datasets = first_seen(records.iter().map(|r| r.dataset.as_str()));
    let by_dataset = datasets.len() > 1;

    let mut out = String::new();
    writeln!(out, "alpha: {}", fmt_num(alpha)).unwrap();
    writeln!(out, "algorithms: {}", algorithms.join(", ")).unwrap();
    writeln!(out, "friedman blocks: {}", if by_dataset { "datasets" } else { "repetitions" }).unwrap();

    for measure in Measure::ALL {
        let mut values: Vec<Paired> = vec![Paired::new(); algorithms.len()];
        for (r, label) in records.iter().zip(&labels) {
            let a = algorithms.iter().position(|x| x == label).expect("label listed");
            values[a].insert((r.dataset.clone(), r.repetition), measure.oriented(r));
        }
        writeln!(out).unwrap();
        writeln!(out, "== {} ==", measure.name()).unwrap();
        if measure == Measure::Size {
            writeln!(out, "(smaller is better; ranks computed on negated sizes)").unwrap();
        }
        friedman_section(&mut out, &algorithms, &values, &datasets, by_dataset, alpha);
        wilcoxon_section(&mut out, &algorithms, &values);
    }
    Ok(out)
}

fn friedman_section(out: &mut String, algorithms: &[String], values: &[Paired], datasets: &[String], by_dataset: bool, alpha: f64) {
    let table: Vec<Vec<f64>> = if by_dataset {
        let complete: Vec<&String> =
            datasets.iter().filter(|d| values.iter().all(|v| v.keys().any(|(vd, _)| vd == *d))).collect();
        values
            .iter()
            .map(|v| {
                complete
                    .iter()
                    .map(|d| mean(&v.iter().filter(|((vd, _), _)| vd == *d).map(|(_, x)| *x).collect::<Vec<_>>()))
                    .collect()
            })
            .collect()
    } else {
        let keys: Vec<&(String, usize)> = values[0].keys().filter(|k| values.iter().all(|v| v.contains_key(*k))).collect();
        values.iter().map(|v| keys.iter().map(|k| v[*k]).collect()).collect()
    };
    let blocks = table.first().map_or(0, Vec::len);
    writeln!(out, "blocks: {blocks}").unwrap();
    match friedman_test(&table) {
        Ok(f) => {
            let ranks: Vec<String> =
                algorithms.iter().zip(&f.avg_ranks).map(|(a, r)| format!("{a} {}", fmt_num(*r))).collect();
            writeln!(out, "mean ranks: {}", ranks.join(", ")).unwrap();
            writeln!(
                out,
                "friedman: chi2 = {}, iman-davenport F = {}, p = {}",
                fmt_num(f.chi_square),
                fmt_num(f.f_statistic),
                fmt_num(f.p_value)
            )
            .unwrap();
            nemenyi_line(out, algorithms, &f.avg_ranks, blocks, alpha);
        }
        Err(e) => {
            writeln!(out, "friedman: not computed ({e})").unwrap();
            if blocks > 0 && algorithms.len() == 2 {
                let ranks = two_way_ranks(&table);
                let shown: Vec<String> =
                    algorithms.iter().zip(&ranks).map(|(a, r)| format!("{a} {}", fmt_num(*r))).collect();
                writeln!(out, "mean ranks: {}", shown.join(", ")).unwrap();
                nemenyi_line(out, algorithms, &ranks, blocks, alpha);
            }
        }
    }
}

fn two_way_ranks(table: &[Vec<f64>]) -> Vec<f64> {
    let d = table[0].len() as f64;
    let mut sums = [0.0, 0.0];
    for (a, b) in table[0].iter().zip(&table[1]) {
        let r = crate::stats::descending_ranks(&[*a, *b]);
        sums[0] += r[0];
        sums[1] += r[1];
    }
    vec![sums[0] / d, sums[1] / d]
}

fn nemenyi_line(out: &mut String, algorithms: &[String], ranks: &[f64], blocks: usize, alpha: f64) {
    match nemenyi_cd(algorithms.len(), blocks, alpha) {
        Ok(cd) => {
            let pairs: Vec<String> = connected_pairs(ranks, cd)
                .into_iter()
                .map(|(i, j)| format!("{} ~ {}", algorithms[i], algorithms[j]))
                .collect();
            let shown = if pairs.is_empty() { "none".to_string() } else { pairs.join(", ") };
            writeln!(out, "nemenyi CD = {}; not significantly different: {shown}", fmt_num(cd)).unwrap();
        }
        Err(e) => writeln!(out, "nemenyi: not computed ({e})").unwrap(),
    }
}

fn wilcoxon_section(out: &mut String, algorithms: &[String], values: &[Paired]) {
    writeln!(out, "wilcoxon signed-rank:").unwrap();
    for i in 0..algorithms.len() {
        for j in i + 1..algorithms.len() {
            let keys: Vec<&(String, usize)> = values[i].keys().filter(|k| values[j].contains_key(*k)).collect();
            let a: Vec<f64> = keys.iter().map(|k| values[i][*k]).collect();
            let b: Vec<f64> = keys.iter().map(|k| values[j][*k]).collect();
            let result = match wilcoxon_signed_rank(&a, &b) {
                Ok(p) => format!("p = {}", fmt_num(p)),
                Err(e) => format!("not computed ({e})"),
            };
            writeln!(out, "  {} vs {} (n = {}): {result}", algorithms[i], algorithms[j], keys.len()).unwrap();
        }
    }
}

//! Outer-split experiments over datasets, strategies and repetitions.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::output::{emit_curve, file_token, read_records, write_records, write_table, write_text, write_trace, RunRecord};
use super::report::{significance_report, summary_rows, timing_rows, SUMMARY_COLUMNS};
use crate::crossval::stratified_folds;
use crate::error::{Error, Result};
use crate::metrics::{confusion, MetricValues};
use crate::preprocess::{apply_minmax, fit_minmax};
use crate::rankers::{train, RankerConfig};
use crate::search::{select, SearchConfig, Strategy};
use crate::seed::{self, key_of};
use crate::types::{Dataset, SelectionResult};

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub dataset: String,
    pub strategy: String,
    pub ranker: String,
    pub repetition: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    /// Records as persisted in `records.csv`, wall times included.
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
    /// Contents of `stats.txt`.
    pub report: String,
}

/// Outer training and test rows for repetition `rep`.
pub fn outer_split(dataset: &Dataset, outer_k: usize, master: u64, rep: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let split_seed = seed::derive(master, &[key_of("outer"), key_of(&dataset.name), (rep / outer_k) as u64]);
    let folds = stratified_folds(dataset.labels(), outer_k, split_seed)?;
    let test_fold = rep % outer_k;
    Ok((folds.training_indices(test_fold), folds.validation_indices(test_fold)))
}

/// Retrain on `train` restricted to `selected` and score on `test`.
pub fn holdout_metrics(
    dataset: &Dataset,
    train_rows: &[usize],
    test_rows: &[usize],
    selected: &[usize],
    ranker: &RankerConfig,
) -> Result<MetricValues> {
    let x_train = dataset.submatrix(train_rows, selected);
    let scaler = fit_minmax(x_train.view())?;
    let x_train = apply_minmax(&scaler, x_train.view())?;
    let model = train(ranker, x_train.view(), &dataset.labels_at(train_rows), dataset.n_classes(), selected)?;
    let x_test = apply_minmax(&scaler, dataset.submatrix(test_rows, selected).view())?;
    let predicted = model.predict(x_test.view())?;
    MetricValues::from_confusion(&confusion(&dataset.labels_at(test_rows), &predicted, dataset.n_classes())?)
}

struct Unit<'a> {
    dataset: &'a Dataset,
    ranker: &'a RankerConfig,
    ranker_label: &'a str,
    ranker_index: usize,
    repetition: usize,
}

#[derive(Default)]
struct UnitOutput {
    records: Vec<RunRecord>,
    failures: Vec<RunFailure>,
}

impl Unit<'_> {
    fn failure(&self, strategy: &str, message: String) -> RunFailure {
        log::warn!("{} {strategy} {} rep {}: {message}", self.dataset.name, self.ranker_label, self.repetition);
        RunFailure {
            dataset: self.dataset.name.clone(),
            strategy: strategy.to_string(),
            ranker: self.ranker_label.to_string(),
            repetition: self.repetition,
            message,
        }
    }

    fn run(&self, config: &ExperimentConfig) -> UnitOutput {
        let mut out = UnitOutput::default();
        let (train_rows, test_rows) = match outer_split(self.dataset, config.outer_k, config.seed, self.repetition) {
            Ok(split) => split,
            Err(e) => {
                for s in &config.strategies {
                    out.failures.push(self.failure(&s.id(), e.to_string()));
                }
                return out;
            }
        };
        let train = match self.dataset.subset_rows(&train_rows) {
            Ok(t) => t,
            Err(e) => {
                for s in &config.strategies {
                    out.failures.push(self.failure(&s.id(), e.to_string()));
                }
                return out;
            }
        };
        let name = key_of(&self.dataset.name);
        let rep = self.repetition as u64;
        // Shared by every strategy so paired runs see identical folds and models.
        let inner_seed = seed::derive(config.seed, &[key_of("inner"), name, rep]);
        let ranker = self.ranker.with_seed(seed::derive(config.seed, &[key_of("ranker"), name, self.ranker_index as u64, rep]));

        for spec in &config.strategies {
            let strategy = spec.resolve(train.n_features());
            let run = self.run_one(config, &train, &train_rows, &test_rows, strategy, &spec.id(), &ranker, inner_seed);
            match run {
                Ok((record, result)) => {
                    out.records.push(record);
                    if let (true, Some(id)) = (config.baselines, spec.baseline_id()) {
                        let n_steps = result.eval_count().max(2);
                        let baseline = Strategy::RfeFixed { n_steps };
                        match self.run_one(config, &train, &train_rows, &test_rows, baseline, &id, &ranker, inner_seed) {
                            Ok((record, _)) => out.records.push(record),
                            Err(e) => out.failures.push(self.failure(&id, e.to_string())),
                        }
                    }
                }
                Err(e) => {
                    out.failures.push(self.failure(&spec.id(), e.to_string()));
                    if let (true, Some(id)) = (config.baselines, spec.baseline_id()) {
                        out.failures.push(self.failure(&id, "paired search failed".into()));
                    }
                }
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn run_one(
        &self,
        config: &ExperimentConfig,
        train: &Dataset,
        train_rows: &[usize],
        test_rows: &[usize],
        strategy: Strategy,
        id: &str,
        ranker: &RankerConfig,
        inner_seed: u64,
    ) -> Result<(RunRecord, SelectionResult)> {
        let search = SearchConfig { strategy, cv_k: config.cv_k, seed: inner_seed, ranker: ranker.clone(), metric: config.metric };
        let result = select(train, &search)?;
        let metrics = holdout_metrics(self.dataset, train_rows, test_rows, &result.selected, ranker)?;
        if config.traces {
            let stem = format!(
                "{}-{}-{}-{}",
                file_token(&self.dataset.name),
                file_token(id),
                file_token(self.ranker_label),
                self.repetition
            );
            write_trace(&result.trace, config.out.join(format!("trace-{stem}.jsonl")))?;
            emit_curve(&result.trace, config.out.join(format!("curve-{stem}.csv")))?;
        }
        log::info!(
            "{} {id} {} rep {}: {} features, accuracy {:.4}",
            self.dataset.name,
            self.ranker_label,
            self.repetition,
            result.selected.len(),
            metrics.accuracy
        );
        let record = RunRecord {
            dataset: self.dataset.name.clone(),
            strategy: id.to_string(),
            ranker: self.ranker_label.to_string(),
            repetition: self.repetition,
            selected: result.selected.clone(),
            eval_count: result.eval_count(),
            metrics,
            wall_time: result.wall_time,
        };
        Ok((record, result))
    }
}

fn load_all(config: &ExperimentConfig) -> Result<Vec<Dataset>> {
    let mut datasets: Vec<Dataset> = Vec::new();
    for source in &config.datasets {
        let mut d = source.load()?.canonicalized();
        let base = d.name.clone();
        let mut n = 1;
        while datasets.iter().any(|o| o.name == d.name) {
            n += 1;
            d.name = format!("{base}-{n}");
        }
        datasets.push(d);
    }
    Ok(datasets)
}

/// Run every (dataset, ranker, repetition, strategy) combination and write
/// `records.csv`, `timings.csv`, `summary.csv`, `timing_summary.csv`,
/// `stats.txt` and, when enabled, one trace and curve per run into
/// `config.out`.
///
/// Each repetition holds out one outer fold; selection and the final model
/// only see the remaining rows. Failed runs are logged, listed in
/// `failures.csv` and skipped; the call fails only if no run succeeds.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    fs::create_dir_all(&config.out)?;
    let datasets = load_all(config)?;
    let labels = config.ranker_labels();

    let mut units = Vec::new();
    for dataset in &datasets {
        for (ranker_index, (ranker, ranker_label)) in config.rankers.iter().zip(&labels).enumerate() {
            for repetition in 0..config.repetitions {
                units.push(Unit { dataset, ranker, ranker_label, ranker_index, repetition });
            }
        }
    }
    let outputs: Vec<UnitOutput> = units.par_iter().map(|u| u.run(config)).collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for o in outputs {
        records.extend(o.records);
        failures.extend(o.failures);
    }
    write_failures(&config.out, &failures)?;
    if records.is_empty() {
        return Err(Error::InsufficientData(format!("all {} runs failed", failures.len())));
    }

    write_records(&config.out, &records)?;
    // Aggregate what was persisted, so the tables agree with the raw files.
    let persisted = read_records(&config.out)?;
    write_table(&config.out.join("summary.csv"), &SUMMARY_COLUMNS, &summary_rows(&persisted))?;
    write_table(
        &config.out.join("timing_summary.csv"),
        &["dataset", "strategy", "ranker", "runs", "wall_time_mean", "wall_time_sd"],
        &timing_rows(&persisted),
    )?;
    let report = significance_report(&persisted, config.alpha)?;
    write_text(&config.out.join("stats.txt"), &report)?;
    Ok(ExperimentOutcome { records: persisted, failures, report })
}

fn write_failures(dir: &Path, failures: &[RunFailure]) -> Result<()> {
    let path = dir.join("failures.csv");
    if failures.is_empty() {
        if path.exists() {
            fs::remove_file(path)?;
        }
        return Ok(());
    }
    let rows: Vec<Vec<String>> = failures
        .iter()
        .map(|f| vec![f.dataset.clone(), f.strategy.clone(), f.ranker.clone(), f.repetition.to_string(), f.message.clone()])
        .collect();
    write_table(&path, &["dataset", "strategy", "ranker", "repetition", "message"], &rows)
}

/// Rebuild the significance report from a results directory or records file.
pub fn compare(records: impl AsRef<Path>, alpha: f64) -> Result<String> {
    significance_report(&read_records(records)?, alpha)
}

